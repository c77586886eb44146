#include "netdepth/cost.hpp"

#include "netdepth/numeric.hpp"

namespace netdepth {

namespace {

uint64_t conv_params(const Node& n, const Shape& in) {
    uint64_t weights = checked_mul(
        checked_mul(static_cast<uint64_t>(n.kernel_h) * static_cast<uint64_t>(n.kernel_w),
                    static_cast<uint64_t>(in.channels), "parameter count"),
        static_cast<uint64_t>(n.out_channels), "parameter count");
    if (n.bias) weights = checked_add(weights, static_cast<uint64_t>(n.out_channels),
                                      "parameter count");
    return weights;
}

uint64_t conv_weight_applications(const Node& n, const Shape& in, const Shape& out) {
    uint64_t per_output = checked_mul(
        checked_mul(static_cast<uint64_t>(n.kernel_h) * static_cast<uint64_t>(n.kernel_w),
                    static_cast<uint64_t>(in.channels), "mac count"),
        static_cast<uint64_t>(n.out_channels), "mac count");
    return checked_mul(per_output,
                       static_cast<uint64_t>(out.height) * static_cast<uint64_t>(out.width),
                       "mac count");
}

}  // namespace

CostReport count_costs(const Graph& g, const ShapeMap& shapes) {
    CostReport report;
    for (int idx : topo_order(g)) {
        const Node& n = g.node(idx);
        NodeCost cost;
        cost.id = n.id;
        uint64_t weight_apps = 0;
        switch (n.type) {
            case OpType::Conv: {
                const Shape& in = shapes[static_cast<size_t>(g.preds(idx)[0])];
                cost.params = conv_params(n, in);
                weight_apps =
                    conv_weight_applications(n, in, shapes[static_cast<size_t>(idx)]);
                break;
            }
            case OpType::Fc: {
                const Shape& in = shapes[static_cast<size_t>(g.preds(idx)[0])];
                uint64_t f_in = static_cast<uint64_t>(in.flattened());
                cost.params = checked_mul(f_in, static_cast<uint64_t>(n.out_features),
                                          "parameter count");
                if (n.bias) {
                    cost.params = checked_add(
                        cost.params, static_cast<uint64_t>(n.out_features), "parameter count");
                }
                weight_apps = checked_mul(f_in, static_cast<uint64_t>(n.out_features),
                                          "mac count");
                break;
            }
            default:
                break;  // pooling, merges, input/output cost nothing
        }
        cost.macs = (weight_apps + 1) / 2;
        cost.flops = checked_mul(cost.macs, 2, "flop count");
        report.params = checked_add(report.params, cost.params, "total parameter count");
        report.macs = checked_add(report.macs, cost.macs, "total mac count");
        report.per_node.push_back(std::move(cost));
    }
    report.flops = checked_mul(report.macs, 2, "total flop count");
    return report;
}

std::string CostReport::params_M() const { return format_scaled(params, 1000000, 1); }

std::string CostReport::macs_G() const { return format_scaled(macs, 1000000000, 1); }

std::string CostReport::flops_G() const { return format_scaled(flops, 1000000000, 1); }

}  // namespace netdepth
