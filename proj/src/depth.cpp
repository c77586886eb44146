#include "netdepth/depth.hpp"

#include <algorithm>
#include <optional>
#include <unordered_set>

namespace netdepth {

PathPolynomial::PathPolynomial(std::vector<uint64_t> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    if (coeffs_.empty()) throw AnalysisError("empty path polynomial (no paths)");
    l_max_ = static_cast<int>(coeffs_.size()) - 1;
    l_min_ = 0;
    while (coeffs_[static_cast<size_t>(l_min_)] == 0) ++l_min_;
    for (uint64_t c : coeffs_) total_ = checked_add(total_, c, "total path count");
}

PathPolynomial PathPolynomial::from_coeffs(const std::map<int, uint64_t>& coeffs) {
    std::vector<uint64_t> dense;
    for (const auto& [length, count] : coeffs) {
        if (length < 0) throw AnalysisError("negative path length in polynomial");
        if (static_cast<size_t>(length) >= dense.size()) {
            dense.resize(static_cast<size_t>(length) + 1, 0);
        }
        dense[static_cast<size_t>(length)] = count;
    }
    return PathPolynomial(std::move(dense));
}

uint64_t PathPolynomial::coeff(int length) const {
    if (length < 0 || static_cast<size_t>(length) >= coeffs_.size()) return 0;
    return coeffs_[static_cast<size_t>(length)];
}

PathPolynomial path_polynomial(const Graph& g, const DepthWeights& weights) {
    std::vector<std::vector<uint64_t>> polys(static_cast<size_t>(g.node_count()));
    int output = -1;
    for (int idx : topo_order(g)) {
        const Node& n = g.node(idx);
        std::vector<uint64_t> acc;
        if (n.type == OpType::Input) {
            acc = {1};
        } else {
            std::string context = "path count at node " + n.id;
            for (int p : g.preds(idx)) {
                const auto& src = polys[static_cast<size_t>(p)];
                if (acc.size() < src.size()) acc.resize(src.size(), 0);
                for (size_t l = 0; l < src.size(); ++l) {
                    acc[l] = checked_add(acc[l], src[l], context.c_str());
                }
            }
        }
        if (weights(n) == 1) acc.insert(acc.begin(), 0);
        if (n.type == OpType::Output) output = idx;
        polys[static_cast<size_t>(idx)] = std::move(acc);
    }
    if (output < 0) throw ValidationError("graph has no output node");
    return PathPolynomial(std::move(polys[static_cast<size_t>(output)]));
}

ApproxPathStats path_polynomial_approx(const Graph& g, const DepthWeights& weights) {
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
    if (output < 0) throw ValidationError("graph has no output node");

    const auto& coeffs = polys[static_cast<size_t>(output)];
    ApproxPathStats stats;
    long double weighted = 0.0L;
    stats.l_min = -1;
    for (size_t l = 0; l < coeffs.size(); ++l) {
        if (coeffs[l] <= 0.0L) continue;
        if (stats.l_min < 0) stats.l_min = static_cast<int>(l);
        stats.l_max = static_cast<int>(l);
        stats.total_paths += coeffs[l];
        weighted += coeffs[l] * static_cast<long double>(l);
    }
    if (stats.total_paths <= 0.0L) throw AnalysisError("empty path polynomial (no paths)");
    stats.mean_length = weighted / stats.total_paths;
    return stats;
}

Rational effective_depth_general(const PathPolynomial& poly) {
    u128 weighted = 0;
    const auto& coeffs = poly.coeffs();
    for (size_t l = 0; l < coeffs.size(); ++l) {
        weighted += static_cast<u128>(coeffs[l]) * l;
    }
    return Rational(weighted, poly.total_paths());
}

std::vector<int> enumerate_paths(const Graph& g, const DepthWeights& weights,
                                 uint64_t cap) {
    int input = -1;
    for (int i = 0; i < g.node_count(); ++i) {
        if (g.node(i).type == OpType::Input) input = i;
    }
    if (input < 0) throw ValidationError("graph has no input node");

    std::vector<int> lengths;
    // Iterative DFS; each frame tracks how many successors have been tried.
    struct Frame {
        int node;
        size_t next_succ;
        int length;
    };
    std::vector<Frame> stack{{input, 0, static_cast<int>(weights(g.node(input)))}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        const Node& n = g.node(f.node);
        if (n.type == OpType::Output) {
            if (lengths.size() >= cap) {
                throw AnalysisError("path explosion: > " + std::to_string(cap) + " paths");
            }
            lengths.push_back(f.length);
            stack.pop_back();
            continue;
        }
        const auto& succs = g.succs(f.node);
        if (f.next_succ >= succs.size()) {
            stack.pop_back();
            continue;
        }
        int v = succs[f.next_succ++];
        stack.push_back({v, 0, f.length + static_cast<int>(weights(g.node(v)))});
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
}

namespace {

struct BranchWalk {
    int fork = -1;
    std::vector<int> chain;  // nodes strictly between fork and concat
};

// Follow single-predecessor links upward from a concat predecessor until the
// first node with out-degree >= 2 (the fork). Any merge or the input node on
// the way disqualifies the branch.
std::optional<BranchWalk> walk_branch(const Graph& g, int start) {
    BranchWalk walk;
    int cur = start;
    while (true) {
        if (g.succs(cur).size() >= 2) {
            walk.fork = cur;
            return walk;
        }
        if (g.preds(cur).size() != 1) return std::nullopt;
        walk.chain.push_back(cur);
        cur = g.preds(cur)[0];
    }
}

}  // namespace

ConcatClassification classify_concats(const Graph& g, const DepthWeights& weights) {
    ConcatClassification out;
    for (int idx : topo_order(g)) {
        if (g.node(idx).type != OpType::Concat) continue;
        InceptionModule module;
        module.concat = idx;
        bool ok = true;
        bool any_weighted = false;
        for (int p : g.preds(idx)) {
            auto walk = walk_branch(g, p);
            if (!walk || (module.fork >= 0 && walk->fork != module.fork)) {
                ok = false;
                break;
            }
            module.fork = walk->fork;
            uint64_t depth = 0;
            for (int n : walk->chain) depth += weights(g.node(n));
            if (depth > 0) any_weighted = true;
            module.branch_depths.push_back(depth);
            module.internal_nodes.insert(module.internal_nodes.end(), walk->chain.begin(),
                                         walk->chain.end());
        }
        if (!ok) {
            out.irregular.push_back(idx);
        } else if (any_weighted) {
            out.modules.push_back(std::move(module));
        } else {
            // No weighted layers on any branch: reshaping plumbing such as a
            // parameter-free channel-padding shortcut, not a module.
            out.pads.push_back(idx);
        }
    }
    return out;
}

std::vector<InceptionModule> detect_inception_modules(const Graph& g,
                                                      const DepthWeights& weights) {
    return classify_concats(g, weights).modules;
}

uint64_t nominal_depth_layer(const Graph& g, const DepthWeights& weights) {
    return longest_weighted_path(g, [&](const Node& n) { return weights(n); });
}

ModuleDepth nominal_depth_module(const Graph& g, const DepthWeights& weights) {
    auto modules = detect_inception_modules(g, weights);
    if (modules.empty()) {
        return {nominal_depth_layer(g, weights), true};
    }
    std::unordered_set<int> internal;
    for (const auto& m : modules) {
        internal.insert(m.internal_nodes.begin(), m.internal_nodes.end());
    }
    uint64_t outside = longest_weighted_path(g, [&](const Node& n) -> uint64_t {
        if (internal.count(g.index_of(n.id))) return 0;
        return weights(n);
    });
    return {modules.size() + outside, false};
}

uint64_t nominal_depth(const Graph& g, DepthConvention convention,
                       const DepthWeights& weights) {
    if (convention == DepthConvention::LayerCount) return nominal_depth_layer(g, weights);
    return nominal_depth_module(g, weights).value;
}

const char* family_name(Family f) {
    switch (f) {
        case Family::Vgg: return "vgg";
        case Family::ResNet: return "resnet";
        case Family::GoogLeNet: return "googlenet";
        case Family::Ambiguous: return "ambiguous";
    }
    return "?";
}

FamilyEstimate effective_depth_family(const Graph& g, const DepthWeights& weights,
                                      int l_min, int l_max, double general_mean) {
    bool has_add = false;
    bool has_concat = false;
    for (const Node& n : g.nodes()) {
        if (n.type == OpType::Add) has_add = true;
        if (n.type == OpType::Concat) has_concat = true;
    }

    if (!has_add && !has_concat) {
        return {Family::Vgg, static_cast<double>(nominal_depth_layer(g, weights))};
    }

    auto concats = classify_concats(g, weights);
    if (!has_add && !concats.modules.empty() && concats.irregular.empty()) {
        std::unordered_set<int> internal;
        double module_sum = 0.0;
        for (const auto& m : concats.modules) {
            uint64_t total = 0;
            for (uint64_t d : m.branch_depths) total += d;
            module_sum += static_cast<double>(total) /
                          static_cast<double>(m.branch_depths.size());
            internal.insert(m.internal_nodes.begin(), m.internal_nodes.end());
        }
        uint64_t outside = longest_weighted_path(g, [&](const Node& n) -> uint64_t {
            if (internal.count(g.index_of(n.id))) return 0;
            return weights(n);
        });
        return {Family::GoogLeNet, module_sum + static_cast<double>(outside)};
    }

    if (has_add && concats.modules.empty() && concats.irregular.empty()) {
        return {Family::ResNet, (static_cast<double>(l_min) + static_cast<double>(l_max)) / 2.0};
    }

    return {Family::Ambiguous, general_mean};
}

}  // namespace netdepth
