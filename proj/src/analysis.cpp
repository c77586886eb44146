#include "netdepth/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>

namespace netdepth {

namespace {

std::string approx_count_string(long double total) {
    char buf[64];
    snprintf(buf, sizeof(buf), "%.6Lg", total);
    return buf;
}

// Gradient-weighted depth over floating-point coefficients; mirrors the exact
// log-domain evaluation in grad_depth.cpp.
WeightedDepthReport approx_weighted_depth(const std::vector<std::pair<int, long double>>& coeffs,
                                          double gamma, const std::string& label) {
    long double log_gamma = logl(static_cast<long double>(gamma));
    long double max_log = -std::numeric_limits<long double>::infinity();
    std::vector<std::pair<int, long double>> terms;
    for (const auto& [l, c] : coeffs) {
        long double t = logl(c) + log_gamma * l;
        terms.emplace_back(l, t);
        max_log = std::max(max_log, t);
    }
    long double mass = 0.0L;
    long double weighted = 0.0L;
    for (const auto& [l, t] : terms) {
        long double e = expl(t - max_log);
        mass += e;
        weighted += e * l;
    }
    WeightedDepthReport report;
    report.label = label;
    report.value = static_cast<double>(weighted / mass);
    for (const auto& [l, t] : terms) {
        report.weight_mass[l] = static_cast<double>(expl(t - max_log) / mass);
    }
    return report;
}

// Approx path accumulation keeping the coefficient vector for the gamma sweep.
std::vector<std::pair<int, long double>> approx_coeffs(const Graph& g,
                                                       const DepthWeights& weights) {
    std::vector<std::vector<long double>> polys(static_cast<size_t>(g.node_count()));
    int output = -1;
    for (int idx : topo_order(g)) {
        const Node& n = g.node(idx);
        std::vector<long double> acc;
        if (n.type == OpType::Input) {
            acc = {1.0L};
        } else {
            for (int p : g.preds(idx)) {
                const auto& src = polys[static_cast<size_t>(p)];
                if (acc.size() < src.size()) acc.resize(src.size(), 0.0L);
                for (size_t l = 0; l < src.size(); ++l) acc[l] += src[l];
            }
        }
        if (weights(n) == 1) acc.insert(acc.begin(), 0.0L);
        if (n.type == OpType::Output) output = idx;
        polys[static_cast<size_t>(idx)] = std::move(acc);
    }
    std::vector<std::pair<int, long double>> out;
    const auto& coeffs = polys[static_cast<size_t>(output)];
    for (size_t l = 0; l < coeffs.size(); ++l) {
        if (coeffs[l] > 0.0L) out.emplace_back(static_cast<int>(l), coeffs[l]);
    }
    return out;
}

}  // namespace

AnalysisResult analyze_graph(const Graph& g, const AnalysisOptions& opts) {
    ValidationReport report = validate(g);
    if (!report.ok) {
        throw ValidationError("graph '" + g.name() + "' is invalid: " + report.summary());
    }
    ShapeMap shapes = infer_shapes(g);
    DepthWeights weights{opts.fc_depth};

    AnalysisResult result;
    result.name = g.name();
    result.input_shape = g.input_shape();
    result.num_classes = opts.num_classes;

    result.nominal_layer = nominal_depth_layer(g, weights);
    ModuleDepth module_depth = nominal_depth_module(g, weights);
    result.nominal_module = module_depth.value;
    result.module_fallback = module_depth.fallback;
    if (module_depth.fallback) result.warnings.push_back("module_fallback");

    std::optional<PathPolynomial> poly;
    try {
        poly = path_polynomial(g, weights);
    } catch (const AnalysisError&) {
        if (!opts.approx_paths) throw;
    }

    if (poly) {
        Rational d_eff = effective_depth_general(*poly);
        result.d_eff_exact = d_eff;
        result.d_eff_general = d_eff.value();
        result.path_count = poly->total_paths();
        result.path_count_str = std::to_string(poly->total_paths());
        result.l_min = poly->l_min();
        result.l_max = poly->l_max();
        for (double gamma : opts.gammas) {
            result.grad.push_back(gradient_weighted_depth(*poly, AttenuationModel{gamma}));
        }
        if (opts.custom_weights) {
            result.grad.push_back(gradient_weighted_depth_custom(*poly, *opts.custom_weights));
        }
    } else {
        result.approx = true;
        result.warnings.push_back("approx_paths");
        ApproxPathStats stats = path_polynomial_approx(g, weights);
        auto coeffs = approx_coeffs(g, weights);
        result.d_eff_general = static_cast<double>(stats.mean_length);
        result.path_count = 0;
        result.path_count_str = approx_count_string(stats.total_paths);
        result.l_min = stats.l_min;
        result.l_max = stats.l_max;
        for (double gamma : opts.gammas) {
            if (!(gamma > 0.0) || gamma > 1.0) {
                throw AnalysisError("gamma must be in (0, 1]");
            }
            result.grad.push_back(approx_weighted_depth(coeffs, gamma, gamma_label(gamma)));
        }
        if (opts.custom_weights) {
            throw AnalysisError("custom weights require exact path accumulation");
        }
    }

    result.family = effective_depth_family(g, weights, result.l_min, result.l_max,
                                           result.d_eff_general);
    if (result.family.family == Family::Ambiguous) {
        result.warnings.push_back("family_ambiguous");
    }

    result.cost = count_costs(g, shapes);

    if (opts.run_oracle) {
        std::vector<int> lengths = enumerate_paths(g, weights, opts.oracle_cap);
        // poly is always set here: a graph small enough to enumerate cannot
        // have overflowed the exact accumulation.
        std::vector<int> expanded;
        expanded.reserve(lengths.size());
        for (int l = poly->l_min(); l <= poly->l_max(); ++l) {
            for (uint64_t c = 0; c < poly->coeff(l); ++c) expanded.push_back(l);
        }
        if (expanded != lengths) {
            throw AnalysisError("oracle mismatch: enumeration disagrees with the polynomial");
        }
        result.oracle_paths = lengths.size();
    }
    return result;
}

std::vector<AnalysisResult> analyze_graphs_serial(const std::vector<Graph>& graphs,
                                                  const AnalysisOptions& opts) {
    std::vector<AnalysisResult> results;
    results.reserve(graphs.size());
    for (const Graph& g : graphs) results.push_back(analyze_graph(g, opts));
    return results;
}

std::vector<AnalysisResult> analyze_graphs_parallel(const std::vector<Graph>& graphs,
                                                    const AnalysisOptions& opts) {
    const int n = static_cast<int>(graphs.size());
    std::vector<AnalysisResult> results(graphs.size());
    std::vector<std::exception_ptr> errors(graphs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            results[static_cast<size_t>(i)] =
                analyze_graph(graphs[static_cast<size_t>(i)], opts);
        } catch (...) {
            errors[static_cast<size_t>(i)] = std::current_exception();
        }
    }
    // Report the earliest failure so behavior matches the serial loop.
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

std::vector<AnalysisResult> analyze_graphs(const std::vector<Graph>& graphs,
                                           const AnalysisOptions& opts, ExecutionMode mode) {
    return mode == ExecutionMode::Serial ? analyze_graphs_serial(graphs, opts)
                                         : analyze_graphs_parallel(graphs, opts);
}

}  // namespace netdepth
