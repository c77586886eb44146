#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "netdepth/depth.hpp"

namespace netdepth {

// Path-weight model standing in for measured gradient magnitudes: a path of
// length l gets weight gamma^l, gamma in (0,1]. gamma = 1 reduces to the
// uniform path average.
struct AttenuationModel {
    double gamma = 1.0;
};

struct WeightedDepthReport {
    std::string label;  // "1.0", "0.5", ..., or "custom"
    double value = 0.0;
    std::map<int, double> weight_mass;  // normalized weight per length; sums to 1
};

// Canonical rendering of a gamma value for labels and CSV headers ("1.0",
// "0.9", "1e-06").
std::string gamma_label(double gamma);

// Weighted mean path length sum(c_l * gamma^l * l) / sum(c_l * gamma^l),
// evaluated in the log domain so tiny gamma and long paths cannot underflow.
WeightedDepthReport gradient_weighted_depth(const PathPolynomial& poly,
                                            const AttenuationModel& model);

// Same, with explicit per-length weights (all paths of one length share one
// weight). Weights must cover the polynomial's support and not all be zero.
WeightedDepthReport gradient_weighted_depth_custom(const PathPolynomial& poly,
                                                   const std::map<int, double>& weights);

// Two-column CSV with a required "length,weight" header. Throws Error with
// the line number for malformed, duplicate, or negative entries.
std::map<int, double> parse_weights_csv(std::istream& in);
std::map<int, double> load_weights_csv(const std::string& path);

}  // namespace netdepth
