#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "netdepth/numeric.hpp"

namespace netdepth {

enum class OpType {
    Input,
    Conv,
    Fc,
    MaxPool,
    AvgPool,
    GlobalAvgPool,
    Add,
    Concat,
    Output,
};

const char* op_name(OpType t);

// Conv and Fc are the only weighted transformations: they are what depth,
// parameter, and MAC accounting count. BN and activations are intentionally
// not part of the node vocabulary.
inline bool is_weighted(OpType t) { return t == OpType::Conv || t == OpType::Fc; }
inline bool is_merge(OpType t) { return t == OpType::Add || t == OpType::Concat; }
inline bool is_pool(OpType t) { return t == OpType::MaxPool || t == OpType::AvgPool; }

struct Node {
    std::string id;
    OpType type = OpType::Input;
    // Conv / pool geometry. Unused fields stay at their defaults.
    int64_t kernel_h = 0;
    int64_t kernel_w = 0;
    int64_t stride = 1;
    int64_t padding = 0;
    int64_t out_channels = 0;  // Conv
    int64_t out_features = 0;  // Fc
    bool bias = true;          // Conv/Fc only

    friend bool operator==(const Node&, const Node&) = default;
};

Node make_input(std::string id = "input");
Node make_output(std::string id = "output");
Node make_conv(std::string id, int64_t kernel, int64_t stride, int64_t padding,
               int64_t out_channels, bool bias = true);
Node make_conv_rect(std::string id, int64_t kernel_h, int64_t kernel_w, int64_t stride,
                    int64_t padding, int64_t out_channels, bool bias = true);
Node make_fc(std::string id, int64_t out_features, bool bias = true);
Node make_maxpool(std::string id, int64_t kernel, int64_t stride, int64_t padding = 0);
Node make_avgpool(std::string id, int64_t kernel, int64_t stride, int64_t padding = 0);
Node make_gap(std::string id);
Node make_add(std::string id);
Node make_concat(std::string id);

// Tensor shape as tracked by shape inference: spatial (C,H,W) until the first
// Fc, flat (features) afterwards.
struct Shape {
    enum class Rank { Spatial, Flat };
    Rank rank = Rank::Spatial;
    int64_t channels = 0;
    int64_t height = 0;
    int64_t width = 0;
    int64_t features = 0;

    static Shape spatial(int64_t c, int64_t h, int64_t w) {
        return Shape{Rank::Spatial, c, h, w, 0};
    }
    static Shape flat(int64_t f) { return Shape{Rank::Flat, 0, 0, 0, f}; }

    bool is_spatial() const { return rank == Rank::Spatial; }
    int64_t flattened() const { return is_spatial() ? channels * height * width : features; }
    std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;
};

// Immutable single-input/single-output computation DAG. All analyses are pure
// functions over const graphs, so instances can be shared across threads.
class Graph {
  public:
    Graph(std::string name, Shape input_shape, std::vector<Node> nodes,
          std::vector<std::pair<std::string, std::string>> edges);

    const std::string& name() const { return name_; }
    const Shape& input_shape() const { return input_shape_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(int idx) const { return nodes_[static_cast<size_t>(idx)]; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

    // -1 when the id is unknown.
    int index_of(const std::string& id) const;

    // Predecessor/successor index lists, sorted by node id; parallel edges
    // appear once per edge.
    const std::vector<int>& preds(int idx) const { return preds_[static_cast<size_t>(idx)]; }
    const std::vector<int>& succs(int idx) const { return succs_[static_cast<size_t>(idx)]; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    friend bool operator==(const Graph& a, const Graph& b);

  private:
    std::string name_;
    Shape input_shape_;
    std::vector<Node> nodes_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> preds_;
    std::vector<std::vector<int>> succs_;
    std::unordered_map<std::string, int> index_;
};

struct Violation {
    std::string node_id;  // empty for whole-graph rules
    std::string rule;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
    std::string summary() const;
};

ValidationReport validate(const Graph& g);

// Kahn's algorithm; ready nodes are taken in lexicographic id order so the
// result is deterministic. Throws ValidationError on cycles.
std::vector<int> topo_order(const Graph& g);
std::vector<std::string> topo_order_ids(const Graph& g);

using ShapeMap = std::vector<Shape>;  // indexed by node

// Forward shape propagation. Throws ValidationError naming the offending node
// when a spatial dimension underflows or an op is applied to the wrong rank.
ShapeMap infer_shapes(const Graph& g);

// Maximum, over all input->output paths, of the summed node weights.
// DAG dynamic programming; never enumerates paths.
uint64_t longest_weighted_path(const Graph& g,
                               const std::function<uint64_t(const Node&)>& weight);

}  // namespace netdepth
