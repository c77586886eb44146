#include "netdepth/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace netdepth {

const char* op_name(OpType t) {
    switch (t) {
        case OpType::Input: return "input";
        case OpType::Conv: return "conv";
        case OpType::Fc: return "fc";
        case OpType::MaxPool: return "maxpool";
        case OpType::AvgPool: return "avgpool";
        case OpType::GlobalAvgPool: return "gap";
        case OpType::Add: return "add";
        case OpType::Concat: return "concat";
        case OpType::Output: return "output";
    }
    return "?";
}

Node make_input(std::string id) { return Node{std::move(id), OpType::Input}; }

Node make_output(std::string id) { return Node{std::move(id), OpType::Output}; }

Node make_conv(std::string id, int64_t kernel, int64_t stride, int64_t padding,
               int64_t out_channels, bool bias) {
    return make_conv_rect(std::move(id), kernel, kernel, stride, padding, out_channels, bias);
}

Node make_conv_rect(std::string id, int64_t kernel_h, int64_t kernel_w, int64_t stride,
                    int64_t padding, int64_t out_channels, bool bias) {
    Node n{std::move(id), OpType::Conv};
    n.kernel_h = kernel_h;
    n.kernel_w = kernel_w;
    n.stride = stride;
    n.padding = padding;
    n.out_channels = out_channels;
    n.bias = bias;
    return n;
}

Node make_fc(std::string id, int64_t out_features, bool bias) {
    Node n{std::move(id), OpType::Fc};
    n.out_features = out_features;
    n.bias = bias;
    return n;
}

static Node make_pool(std::string id, OpType t, int64_t kernel, int64_t stride,
                      int64_t padding) {
    Node n{std::move(id), t};
    n.kernel_h = kernel;
    n.kernel_w = kernel;
    n.stride = stride;
    n.padding = padding;
    return n;
}

Node make_maxpool(std::string id, int64_t kernel, int64_t stride, int64_t padding) {
    return make_pool(std::move(id), OpType::MaxPool, kernel, stride, padding);
}

Node make_avgpool(std::string id, int64_t kernel, int64_t stride, int64_t padding) {
    return make_pool(std::move(id), OpType::AvgPool, kernel, stride, padding);
}

Node make_gap(std::string id) { return Node{std::move(id), OpType::GlobalAvgPool}; }

Node make_add(std::string id) { return Node{std::move(id), OpType::Add}; }

Node make_concat(std::string id) { return Node{std::move(id), OpType::Concat}; }

std::string Shape::to_string() const {
    std::ostringstream os;
    if (is_spatial()) {
        os << "(" << channels << "," << height << "," << width << ")";
    } else {
        os << "(" << features << ")";
    }
    return os.str();
}

Graph::Graph(std::string name, Shape input_shape, std::vector<Node> nodes,
             std::vector<std::pair<std::string, std::string>> edges)
    : name_(std::move(name)), input_shape_(input_shape), nodes_(std::move(nodes)) {
    for (int i = 0; i < node_count(); ++i) {
        auto [it, inserted] = index_.emplace(nodes_[static_cast<size_t>(i)].id, i);
        if (!inserted) throw Error("duplicate node id '" + nodes_[static_cast<size_t>(i)].id + "'");
    }
    preds_.resize(nodes_.size());
    succs_.resize(nodes_.size());
    edges_.reserve(edges.size());
    for (const auto& [from, to] : edges) {
        int u = index_of(from);
        int v = index_of(to);
        if (u < 0) throw Error("edge references unknown node '" + from + "'");
        if (v < 0) throw Error("edge references unknown node '" + to + "'");
        edges_.emplace_back(u, v);
        succs_[static_cast<size_t>(u)].push_back(v);
        preds_[static_cast<size_t>(v)].push_back(u);
    }
    auto by_id = [this](int a, int b) {
        return nodes_[static_cast<size_t>(a)].id < nodes_[static_cast<size_t>(b)].id;
    };
    for (auto& p : preds_) std::stable_sort(p.begin(), p.end(), by_id);
    for (auto& s : succs_) std::stable_sort(s.begin(), s.end(), by_id);
}

int Graph::index_of(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

bool operator==(const Graph& a, const Graph& b) {
    if (a.name_ != b.name_ || a.input_shape_ != b.input_shape_) return false;
    if (a.nodes_.size() != b.nodes_.size() || a.edges_.size() != b.edges_.size()) return false;
    // Node identity is by id; declaration order is not significant.
    for (const Node& n : a.nodes_) {
        int j = b.index_of(n.id);
        if (j < 0 || !(b.node(j) == n)) return false;
    }
    auto edge_ids = [](const Graph& g) {
        std::vector<std::pair<std::string, std::string>> out;
        out.reserve(g.edges_.size());
        for (auto [u, v] : g.edges_) {
            out.emplace_back(g.node(u).id, g.node(v).id);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return edge_ids(a) == edge_ids(b);
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i].message;
    }
    return os.str();
}

namespace {

// Kahn's algorithm with a min-heap on node id. Returns an empty vector when
// the graph has a cycle.
std::vector<int> try_topo_order(const Graph& g) {
    const int n = g.node_count();
    std::vector<int> indegree(static_cast<size_t>(n), 0);
    for (auto [u, v] : g.edges()) {
        (void)u;
        ++indegree[static_cast<size_t>(v)];
    }
    auto greater_id = [&g](int a, int b) { return g.node(a).id > g.node(b).id; };
    std::priority_queue<int, std::vector<int>, decltype(greater_id)> ready(greater_id);
    for (int i = 0; i < n; ++i) {
        if (indegree[static_cast<size_t>(i)] == 0) ready.push(i);
    }
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));
    while (!ready.empty()) {
        int u = ready.top();
        ready.pop();
        order.push_back(u);
        for (int v : g.succs(u)) {
            if (--indegree[static_cast<size_t>(v)] == 0) ready.push(v);
        }
    }
    if (static_cast<int>(order.size()) != n) order.clear();
    return order;
}

Shape conv_like_output(const Node& n, const Shape& in, int64_t out_channels) {
    auto out_dim = [&](int64_t dim, int64_t kernel) {
        int64_t numer = dim + 2 * n.padding - kernel;
        if (numer < 0) {
            throw ValidationError("shape underflow at node " + n.id);
        }
        return numer / n.stride + 1;
    };
    return Shape::spatial(out_channels, out_dim(in.height, n.kernel_h),
                          out_dim(in.width, n.kernel_w));
}

Shape node_output_shape(const Graph& g, int idx, const ShapeMap& shapes) {
    const Node& n = g.node(idx);
    const auto& preds = g.preds(idx);
    auto pred_shape = [&](size_t k) { return shapes[static_cast<size_t>(preds[k])]; };

    switch (n.type) {
        case OpType::Input:
            return g.input_shape();
        case OpType::Conv: {
            Shape in = pred_shape(0);
            if (!in.is_spatial()) throw ValidationError("conv after flatten at node " + n.id);
            return conv_like_output(n, in, n.out_channels);
        }
        case OpType::MaxPool:
        case OpType::AvgPool: {
            Shape in = pred_shape(0);
            if (!in.is_spatial()) throw ValidationError("pool after flatten at node " + n.id);
            return conv_like_output(n, in, in.channels);
        }
        case OpType::GlobalAvgPool: {
            Shape in = pred_shape(0);
            if (!in.is_spatial()) throw ValidationError("gap after flatten at node " + n.id);
            return Shape::spatial(in.channels, 1, 1);
        }
        case OpType::Fc:
            // Implicit flatten when fed from a spatial node.
            return Shape::flat(n.out_features);
        case OpType::Add: {
            Shape first = pred_shape(0);
            for (size_t k = 1; k < preds.size(); ++k) {
                if (!(pred_shape(k) == first)) {
                    throw ValidationError("add shape mismatch at node " + n.id);
                }
            }
            return first;
        }
        case OpType::Concat: {
            Shape first = pred_shape(0);
            Shape out = first;
            for (size_t k = 1; k < preds.size(); ++k) {
                Shape s = pred_shape(k);
                if (s.rank != first.rank ||
                    (first.is_spatial() &&
                     (s.height != first.height || s.width != first.width))) {
                    throw ValidationError("concat spatial mismatch at node " + n.id);
                }
                if (first.is_spatial()) {
                    out.channels += s.channels;
                } else {
                    out.features += s.features;
                }
            }
            return out;
        }
        case OpType::Output:
            return pred_shape(0);
    }
    throw ValidationError("unknown node kind at node " + n.id);
}

// Arity and attribute checks that do not need shapes.
void structural_violations(const Graph& g, std::vector<Violation>& out) {
    int inputs = 0;
    int outputs = 0;
    for (int i = 0; i < g.node_count(); ++i) {
        const Node& n = g.node(i);
        const size_t indeg = g.preds(i).size();
        auto flag = [&](const std::string& rule, const std::string& msg) {
            out.push_back({n.id, rule, msg + " at node " + n.id});
        };
        switch (n.type) {
            case OpType::Input:
                ++inputs;
                if (indeg != 0) flag("arity", "input with predecessors");
                break;
            case OpType::Output:
                ++outputs;
                if (indeg != 1) flag("arity", "output requires exactly one predecessor");
                if (!g.succs(i).empty()) flag("arity", "output with successors");
                break;
            case OpType::Add:
            case OpType::Concat:
                if (indeg < 2) flag("arity", "merge requires >= 2 predecessors");
                break;
            default:
                if (indeg != 1) flag("arity", "node requires exactly one predecessor");
                break;
        }
        if (n.type == OpType::Conv) {
            if (n.kernel_h < 1 || n.kernel_w < 1) flag("attrs", "conv kernel must be positive");
            if (n.stride < 1) flag("attrs", "conv stride must be positive");
            if (n.padding < 0) flag("attrs", "conv padding must be nonnegative");
            if (n.out_channels < 1) flag("attrs", "conv out_channels must be positive");
        }
        if (is_pool(n.type)) {
            if (n.kernel_h < 1) flag("attrs", "pool kernel must be positive");
            if (n.stride < 1) flag("attrs", "pool stride must be positive");
            if (n.padding < 0) flag("attrs", "pool padding must be nonnegative");
        }
        if (n.type == OpType::Fc && n.out_features < 1) {
            flag("attrs", "fc out_features must be positive");
        }
    }
    if (inputs != 1) {
        out.push_back({"", "single-input",
                       "graph must have exactly one input node (found " +
                           std::to_string(inputs) + ")"});
    }
    if (outputs != 1) {
        out.push_back({"", "single-output",
                       "graph must have exactly one output node (found " +
                           std::to_string(outputs) + ")"});
    }
    if (g.input_shape().channels < 1 || g.input_shape().height < 1 ||
        g.input_shape().width < 1) {
        out.push_back({"", "input-shape", "input shape dimensions must be positive"});
    }
}

void reachability_violations(const Graph& g, std::vector<Violation>& out) {
    int input = -1;
    int output = -1;
    for (int i = 0; i < g.node_count(); ++i) {
        if (g.node(i).type == OpType::Input) input = i;
        if (g.node(i).type == OpType::Output) output = i;
    }
    if (input < 0 || output < 0) return;

    auto sweep = [&](int start, bool forward) {
        std::vector<char> seen(static_cast<size_t>(g.node_count()), 0);
        std::vector<int> stack{start};
        seen[static_cast<size_t>(start)] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : forward ? g.succs(u) : g.preds(u)) {
                if (!seen[static_cast<size_t>(v)]) {
                    seen[static_cast<size_t>(v)] = 1;
                    stack.push_back(v);
                }
            }
        }
        return seen;
    };
    auto from_input = sweep(input, true);
    auto to_output = sweep(output, false);
    for (int i = 0; i < g.node_count(); ++i) {
        if (!from_input[static_cast<size_t>(i)] || !to_output[static_cast<size_t>(i)]) {
            out.push_back({g.node(i).id, "connectivity",
                           "node " + g.node(i).id + " lies on no input-output path"});
        }
    }
}

}  // namespace

ValidationReport validate(const Graph& g) {
    ValidationReport report;
    structural_violations(g, report.violations);

    std::vector<int> order = try_topo_order(g);
    if (order.empty() && g.node_count() > 0) {
        report.violations.push_back({"", "acyclicity", "graph contains a cycle"});
    }
    reachability_violations(g, report.violations);

    // Shape rules only make sense once the structure is sound.
    if (report.violations.empty()) {
        ShapeMap shapes(static_cast<size_t>(g.node_count()));
        for (int idx : order) {
            try {
                shapes[static_cast<size_t>(idx)] = node_output_shape(g, idx, shapes);
            } catch (const ValidationError& e) {
                std::string rule = "shape";
                std::string msg = e.what();
                if (msg.find("underflow") != std::string::npos) rule = "shape underflow";
                if (msg.find("add shape") != std::string::npos) rule = "add shape mismatch";
                if (msg.find("concat spatial") != std::string::npos) {
                    rule = "concat spatial mismatch";
                }
                report.violations.push_back({g.node(idx).id, rule, msg});
                break;
            }
        }
    }

    report.ok = report.violations.empty();
    return report;
}

std::vector<int> topo_order(const Graph& g) {
    std::vector<int> order = try_topo_order(g);
    if (order.empty() && g.node_count() > 0) {
        throw ValidationError("graph contains a cycle");
    }
    return order;
}

std::vector<std::string> topo_order_ids(const Graph& g) {
    std::vector<std::string> ids;
    for (int idx : topo_order(g)) ids.push_back(g.node(idx).id);
    return ids;
}

ShapeMap infer_shapes(const Graph& g) {
    ShapeMap shapes(static_cast<size_t>(g.node_count()));
    for (int idx : topo_order(g)) {
        shapes[static_cast<size_t>(idx)] = node_output_shape(g, idx, shapes);
    }
    return shapes;
}

uint64_t longest_weighted_path(const Graph& g,
                               const std::function<uint64_t(const Node&)>& weight) {
    std::vector<int64_t> best(static_cast<size_t>(g.node_count()), -1);
    int output = -1;
    for (int idx : topo_order(g)) {
        const Node& n = g.node(idx);
        if (n.type == OpType::Output) output = idx;
        int64_t incoming = n.type == OpType::Input ? 0 : -1;
        for (int p : g.preds(idx)) {
            incoming = std::max(incoming, best[static_cast<size_t>(p)]);
        }
        if (incoming >= 0) {
            best[static_cast<size_t>(idx)] =
                incoming + static_cast<int64_t>(weight(n));
        }
    }
    if (output < 0 || best[static_cast<size_t>(output)] < 0) {
        throw ValidationError("graph has no input-output path");
    }
    return static_cast<uint64_t>(best[static_cast<size_t>(output)]);
}

}  // namespace netdepth
