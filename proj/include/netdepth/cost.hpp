#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netdepth/graph.hpp"

namespace netdepth {

// Cost accounting. For a conv node the number of weight applications is
//   W = k_h * k_w * C_in * C_out * H_out * W_out
// and for an fc node W = F_in * F_out. Reported FLOPs equal W and one MAC is
// two FLOPs, so MACs = W / 2; this pairing matches cost tables that put
// VGG-16 at roughly 15.5 GFLOPs / 7.7 GMACs for a 224x224 input. Bias terms
// add parameters but no MACs or FLOPs. BN, activations, pooling, and merges
// cost nothing.
struct NodeCost {
    std::string id;
    uint64_t params = 0;
    uint64_t macs = 0;
    uint64_t flops = 0;  // always exactly 2 * macs
};

struct CostReport {
    std::vector<NodeCost> per_node;  // topological order; zero-cost nodes included
    uint64_t params = 0;
    uint64_t macs = 0;
    uint64_t flops = 0;

    // Table renderings: millions / billions, one decimal, ties-to-even.
    std::string params_M() const;
    std::string macs_G() const;
    std::string flops_G() const;
};

CostReport count_costs(const Graph& g, const ShapeMap& shapes);

}  // namespace netdepth
