#include "netdepth/grad_depth.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace netdepth {

namespace {

// log-sum-exp over terms log(c_l) + log(w_l), tracking both the mass and the
// length-weighted mass.
WeightedDepthReport weighted_mean(const PathPolynomial& poly,
                                  const std::map<int, double>& log_weights,
                                  std::string label) {
    struct Term {
        int length;
        double log_term;
    };
    std::vector<Term> terms;
    double max_log = -std::numeric_limits<double>::infinity();
    for (int l = poly.l_min(); l <= poly.l_max(); ++l) {
        uint64_t c = poly.coeff(l);
        if (c == 0) continue;
        auto it = log_weights.find(l);
        if (it == log_weights.end()) continue;  // zero weight
        double t = std::log(static_cast<double>(c)) + it->second;
        terms.push_back({l, t});
        max_log = std::max(max_log, t);
    }
    if (terms.empty()) throw AnalysisError("all path weights are zero");

    double mass = 0.0;
    double weighted = 0.0;
    for (const Term& t : terms) {
        double e = std::exp(t.log_term - max_log);
        mass += e;
        weighted += e * static_cast<double>(t.length);
    }
    WeightedDepthReport report;
    report.label = std::move(label);
    report.value = weighted / mass;
    for (const Term& t : terms) {
        report.weight_mass[t.length] = std::exp(t.log_term - max_log) / mass;
    }
    return report;
}

}  // namespace

std::string gamma_label(double gamma) {
    std::ostringstream os;
    os << gamma;
    std::string s = os.str();
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

WeightedDepthReport gradient_weighted_depth(const PathPolynomial& poly,
                                            const AttenuationModel& model) {
    if (!(model.gamma > 0.0) || model.gamma > 1.0) {
        throw AnalysisError("gamma must be in (0, 1]");
    }
    const double log_gamma = std::log(model.gamma);
    std::map<int, double> log_weights;
    for (int l = poly.l_min(); l <= poly.l_max(); ++l) {
        if (poly.coeff(l) > 0) log_weights[l] = log_gamma * static_cast<double>(l);
    }
    return weighted_mean(poly, log_weights, gamma_label(model.gamma));
}

WeightedDepthReport gradient_weighted_depth_custom(const PathPolynomial& poly,
                                                   const std::map<int, double>& weights) {
    std::map<int, double> log_weights;
    for (int l = poly.l_min(); l <= poly.l_max(); ++l) {
        if (poly.coeff(l) == 0) continue;
        auto it = weights.find(l);
        if (it == weights.end()) {
            throw AnalysisError("missing weight for path length " + std::to_string(l));
        }
        if (it->second < 0.0) {
            throw AnalysisError("negative weight for path length " + std::to_string(l));
        }
        if (it->second > 0.0) log_weights[l] = std::log(it->second);
    }
    return weighted_mean(poly, log_weights, "custom");
}

std::map<int, double> parse_weights_csv(std::istream& in) {
    std::map<int, double> weights;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string length_field, weight_field;
        if (!std::getline(row, length_field, ',') || !std::getline(row, weight_field)) {
            throw Error("weights csv line " + std::to_string(lineno) + ": expected length,weight");
        }
        if (!saw_header) {
            if (length_field != "length" || weight_field != "weight") {
                throw Error("weights csv line 1: header must be 'length,weight'");
            }
            saw_header = true;
            continue;
        }
        try {
            size_t pos = 0;
            int length = std::stoi(length_field, &pos);
            if (pos != length_field.size() || length < 0) throw std::invalid_argument("");
            double w = std::stod(weight_field, &pos);
            if (pos != weight_field.size()) throw std::invalid_argument("");
            if (w < 0.0) {
                throw Error("weights csv line " + std::to_string(lineno) + ": negative weight");
            }
            if (!weights.emplace(length, w).second) {
                throw Error("weights csv line " + std::to_string(lineno) +
                            ": duplicate length " + std::to_string(length));
            }
        } catch (const std::invalid_argument&) {
            throw Error("weights csv line " + std::to_string(lineno) + ": malformed row '" +
                        line + "'");
        }
    }
    if (!saw_header) throw Error("weights csv: missing 'length,weight' header");
    return weights;
}

std::map<int, double> load_weights_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open weights csv '" + path + "'");
    return parse_weights_csv(in);
}

}  // namespace netdepth
