#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "netdepth/graph.hpp"
#include "netdepth/numeric.hpp"

namespace netdepth {

// What counts as one unit of depth along a path. Conv always counts; Fc
// counting can be switched off (--fc-depth off).
struct DepthWeights {
    bool count_fc = true;
    uint64_t operator()(const Node& n) const {
        if (n.type == OpType::Conv) return 1;
        if (n.type == OpType::Fc) return count_fc ? 1 : 0;
        return 0;
    }
};

// Exact distribution of input->output path lengths: coeff(l) is the number of
// paths traversing exactly l weighted layers. A path picks exactly one
// predecessor at every add/concat. Coefficients are exact 64-bit integers;
// exceeding that capacity is an error, never a silent wraparound.
class PathPolynomial {
  public:
    static PathPolynomial from_coeffs(const std::map<int, uint64_t>& coeffs);

    uint64_t coeff(int length) const;
    const std::vector<uint64_t>& coeffs() const { return coeffs_; }  // index = length
    uint64_t total_paths() const { return total_; }
    int l_min() const { return l_min_; }
    int l_max() const { return l_max_; }

    friend bool operator==(const PathPolynomial&, const PathPolynomial&) = default;

  private:
    explicit PathPolynomial(std::vector<uint64_t> coeffs);
    friend PathPolynomial path_polynomial(const Graph&, const DepthWeights&);

    std::vector<uint64_t> coeffs_;
    uint64_t total_ = 0;
    int l_min_ = 0;
    int l_max_ = 0;
};

// Forward DP in topological order: the input starts at {0:1}, weighted nodes
// shift the incoming distribution by +1, pools pass it through, and merges sum
// their predecessors' distributions. Throws AnalysisError naming the node
// where a coefficient overflows.
PathPolynomial path_polynomial(const Graph& g, const DepthWeights& weights = {});

// Floating-point fallback for graphs whose exact path counts exceed 64 bits.
struct ApproxPathStats {
    long double total_paths = 0;
    long double mean_length = 0;
    int l_min = 0;
    int l_max = 0;
};
ApproxPathStats path_polynomial_approx(const Graph& g, const DepthWeights& weights = {});

// Mean path length as an exact rational: sum(l * c_l) / sum(c_l).
Rational effective_depth_general(const PathPolynomial& poly);

// Explicit DFS enumeration of all input->output paths; the independent oracle
// for the polynomial DP. Returns the sorted multiset of path lengths and
// throws AnalysisError("path explosion: ...") when more than `cap` paths
// exist.
std::vector<int> enumerate_paths(const Graph& g, const DepthWeights& weights,
                                 uint64_t cap);

// A concat whose predecessor branches are clean chains originating from one
// common fork node, with at least one weighted layer among the branches.
struct InceptionModule {
    int concat = -1;
    int fork = -1;
    std::vector<uint64_t> branch_depths;  // weighted layers per branch
    std::vector<int> internal_nodes;      // branch chain nodes
};
std::vector<InceptionModule> detect_inception_modules(const Graph& g,
                                                      const DepthWeights& weights = {});

// Every concat is a module, a parameter-free pad (clean branch structure but
// no weighted layers, e.g. channel-padding shortcuts), or irregular.
struct ConcatClassification {
    std::vector<InceptionModule> modules;
    std::vector<int> pads;
    std::vector<int> irregular;
};
ConcatClassification classify_concats(const Graph& g, const DepthWeights& weights = {});

enum class DepthConvention { LayerCount, ModuleBased };

// LayerCount: weighted layers along the longest input->output path.
uint64_t nominal_depth_layer(const Graph& g, const DepthWeights& weights = {});

// ModuleBased: one unit per detected module plus the weighted layers outside
// modules along the longest path. Falls back to LayerCount (with the flag set)
// when the graph has no detectable modules.
struct ModuleDepth {
    uint64_t value = 0;
    bool fallback = false;
};
ModuleDepth nominal_depth_module(const Graph& g, const DepthWeights& weights = {});

uint64_t nominal_depth(const Graph& g, DepthConvention convention,
                       const DepthWeights& weights = {});

enum class Family { Vgg, ResNet, GoogLeNet, Ambiguous };
const char* family_name(Family f);

// Closed-form per-family estimate:
//   single path             -> nominal depth
//   add merges              -> (l_min + l_max) / 2
//   concat modules          -> sum of per-module mean branch depths plus the
//                              weighted layers outside modules
//   add + concat modules    -> Ambiguous; falls back to the general mean
struct FamilyEstimate {
    Family family = Family::Vgg;
    double value = 0.0;
};
FamilyEstimate effective_depth_family(const Graph& g, const DepthWeights& weights,
                                      int l_min, int l_max, double general_mean);

}  // namespace netdepth
