#include "netdepth/builders.hpp"

#include <algorithm>
#include <array>

namespace netdepth {

namespace {

struct GraphAssembler {
    std::vector<Node> nodes;
    std::vector<std::pair<std::string, std::string>> edges;

    std::string add(Node n, const std::vector<std::string>& from) {
        std::string id = n.id;
        nodes.push_back(std::move(n));
        for (const auto& f : from) edges.emplace_back(f, id);
        return id;
    }

    Graph finish(std::string name, Shape input_shape) && {
        return Graph(std::move(name), input_shape, std::move(nodes), std::move(edges));
    }
};

void check_input(const Shape& input_shape) {
    if (!input_shape.is_spatial()) throw Error("input shape must be spatial (CxHxW)");
    if (input_shape.height < 32 || input_shape.width < 32) {
        throw Error("input spatial dims must be >= 32");
    }
    if (input_shape.channels < 1) throw Error("input channels must be positive");
}

}  // namespace

Graph build_vgg(int variant, Shape input_shape, int64_t num_classes) {
    check_input(input_shape);
    // Convolutions per stage; channels are fixed across variants.
    std::array<int, 5> convs_per_stage{};
    switch (variant) {
        case 11: convs_per_stage = {1, 1, 2, 2, 2}; break;
        case 16: convs_per_stage = {2, 2, 3, 3, 3}; break;
        case 19: convs_per_stage = {2, 2, 4, 4, 4}; break;
        default: throw Error("unknown vgg variant " + std::to_string(variant));
    }
    const std::array<int64_t, 5> channels{64, 128, 256, 512, 512};

    GraphAssembler a;
    std::string prev = a.add(make_input(), {});
    for (int stage = 0; stage < 5; ++stage) {
        for (int i = 0; i < convs_per_stage[static_cast<size_t>(stage)]; ++i) {
            std::string id = "conv" + std::to_string(stage + 1) + "_" + std::to_string(i + 1);
            prev = a.add(make_conv(id, 3, 1, 1, channels[static_cast<size_t>(stage)]), {prev});
        }
        prev = a.add(make_maxpool("pool" + std::to_string(stage + 1), 2, 2), {prev});
    }
    prev = a.add(make_fc("fc1", 4096), {prev});
    prev = a.add(make_fc("fc2", 4096), {prev});
    prev = a.add(make_fc("fc3", num_classes), {prev});
    a.add(make_output(), {prev});
    return std::move(a).finish("vgg" + std::to_string(variant), input_shape);
}

namespace {

// Parameter-free shortcut: spatial downsampling via a 1x1 stride-s average
// pool, channel growth via concat of `ratio` duplicated branches. Cost- and
// shape-wise this matches zero padding, and it adds no path length.
std::string add_identity_pad(GraphAssembler& a, const std::string& prefix,
                             const std::string& from, int64_t stride, int64_t ratio) {
    if (ratio < 2) throw Error("identity pad requires a channel growth factor >= 2");
    std::vector<std::string> branches;
    for (int64_t i = 0; i < ratio; ++i) {
        branches.push_back(
            a.add(make_avgpool(prefix + "_pad" + std::to_string(i + 1), 1, stride), {from}));
    }
    return a.add(make_concat(prefix + "_padcat"), branches);
}

}  // namespace

Graph build_resnet(int variant, Shape input_shape, int64_t num_classes,
                   ShortcutPolicy policy) {
    check_input(input_shape);
    std::array<int, 4> blocks{};
    bool bottleneck = false;
    switch (variant) {
        case 18: blocks = {2, 2, 2, 2}; break;
        case 34: blocks = {3, 4, 6, 3}; break;
        case 50: blocks = {3, 4, 6, 3}; bottleneck = true; break;
        default: throw Error("unknown resnet variant " + std::to_string(variant));
    }
    const std::array<int64_t, 4> planes{64, 128, 256, 512};
    const std::array<int64_t, 4> strides{1, 2, 2, 2};
    const int64_t expansion = bottleneck ? 4 : 1;

    // BN is not modeled, and by convention it absorbs conv biases.
    const bool conv_bias = false;

    GraphAssembler a;
    std::string prev = a.add(make_input(), {});
    prev = a.add(make_conv("conv1", 7, 2, 3, 64, conv_bias), {prev});
    prev = a.add(make_maxpool("pool1", 3, 2, 1), {prev});

    int64_t in_channels = 64;
    for (int stage = 0; stage < 4; ++stage) {
        const int64_t width = planes[static_cast<size_t>(stage)];
        const int64_t out_channels = width * expansion;
        for (int block = 0; block < blocks[static_cast<size_t>(stage)]; ++block) {
            const int64_t stride = block == 0 ? strides[static_cast<size_t>(stage)] : 1;
            const std::string prefix =
                "s" + std::to_string(stage + 1) + "b" + std::to_string(block + 1);
            const std::string block_input = prev;

            std::string body;
            if (bottleneck) {
                // Stride lives on the 3x3, torchvision style.
                body = a.add(make_conv(prefix + "_conv1", 1, 1, 0, width, conv_bias),
                             {block_input});
                body = a.add(make_conv(prefix + "_conv2", 3, stride, 1, width, conv_bias),
                             {body});
                body = a.add(make_conv(prefix + "_conv3", 1, 1, 0, out_channels, conv_bias),
                             {body});
            } else {
                body = a.add(make_conv(prefix + "_conv1", 3, stride, 1, width, conv_bias),
                             {block_input});
                body = a.add(make_conv(prefix + "_conv2", 3, 1, 1, width, conv_bias), {body});
            }

            std::string shortcut = block_input;
            if (stride != 1 || in_channels != out_channels) {
                if (policy == ShortcutPolicy::Projection) {
                    shortcut = a.add(
                        make_conv(prefix + "_proj", 1, stride, 0, out_channels, conv_bias),
                        {block_input});
                } else {
                    shortcut = add_identity_pad(a, prefix, block_input, stride,
                                                out_channels / in_channels);
                }
            }
            prev = a.add(make_add(prefix + "_add"), {body, shortcut});
            in_channels = out_channels;
        }
    }
    prev = a.add(make_gap("gap"), {prev});
    prev = a.add(make_fc("fc", num_classes), {prev});
    a.add(make_output(), {prev});
    return std::move(a).finish("resnet" + std::to_string(variant), input_shape);
}

Graph build_googlenet(Shape input_shape, int64_t num_classes) {
    check_input(input_shape);

    struct InceptionCfg {
        const char* id;
        int64_t b1, reduce3, out3, reduce5, out5, pool_proj;
    };
    // The original channel allocation for the nine modules.
    const std::array<InceptionCfg, 9> modules{{
        {"i3a", 64, 96, 128, 16, 32, 32},
        {"i3b", 128, 128, 192, 32, 96, 64},
        {"i4a", 192, 96, 208, 16, 48, 64},
        {"i4b", 160, 112, 224, 24, 64, 64},
        {"i4c", 128, 128, 256, 24, 64, 64},
        {"i4d", 112, 144, 288, 32, 64, 64},
        {"i4e", 256, 160, 320, 32, 128, 128},
        {"i5a", 256, 160, 320, 32, 128, 128},
        {"i5b", 384, 192, 384, 48, 128, 128},
    }};

    GraphAssembler a;
    std::string prev = a.add(make_input(), {});
    prev = a.add(make_conv("conv1", 7, 2, 3, 64), {prev});
    prev = a.add(make_maxpool("pool1", 3, 2, 1), {prev});
    prev = a.add(make_conv("conv2", 1, 1, 0, 64), {prev});
    prev = a.add(make_conv("conv3", 3, 1, 1, 192), {prev});
    prev = a.add(make_maxpool("pool2", 3, 2, 1), {prev});

    int pool_no = 3;
    for (size_t m = 0; m < modules.size(); ++m) {
        const auto& cfg = modules[m];
        const std::string id = cfg.id;
        std::string b1 = a.add(make_conv(id + "_b1", 1, 1, 0, cfg.b1), {prev});
        std::string b2 = a.add(make_conv(id + "_b2r", 1, 1, 0, cfg.reduce3), {prev});
        b2 = a.add(make_conv(id + "_b2", 3, 1, 1, cfg.out3), {b2});
        std::string b3 = a.add(make_conv(id + "_b3r", 1, 1, 0, cfg.reduce5), {prev});
        b3 = a.add(make_conv(id + "_b3", 5, 1, 2, cfg.out5), {b3});
        std::string b4 = a.add(make_maxpool(id + "_b4p", 3, 1, 1), {prev});
        b4 = a.add(make_conv(id + "_b4", 1, 1, 0, cfg.pool_proj), {b4});
        prev = a.add(make_concat(id + "_cat"), {b1, b2, b3, b4});
        // Downsampling pools sit after i3b and i4e.
        if (id == "i3b" || id == "i4e") {
            prev = a.add(make_maxpool("pool" + std::to_string(pool_no++), 3, 2, 1), {prev});
        }
    }
    prev = a.add(make_gap("gap"), {prev});
    prev = a.add(make_fc("fc", num_classes), {prev});
    a.add(make_output(), {prev});
    return std::move(a).finish("googlenet", input_shape);
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{
        "vgg11", "vgg16", "vgg19", "resnet18", "resnet34", "resnet50", "googlenet"};
    return names;
}

bool is_builtin(const std::string& name) {
    const auto& names = builtin_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

Graph build_builtin(const std::string& name, Shape input_shape, int64_t num_classes,
                    ShortcutPolicy policy) {
    if (name == "vgg11") return build_vgg(11, input_shape, num_classes);
    if (name == "vgg16") return build_vgg(16, input_shape, num_classes);
    if (name == "vgg19") return build_vgg(19, input_shape, num_classes);
    if (name == "resnet18") return build_resnet(18, input_shape, num_classes, policy);
    if (name == "resnet34") return build_resnet(34, input_shape, num_classes, policy);
    if (name == "resnet50") return build_resnet(50, input_shape, num_classes, policy);
    if (name == "googlenet") return build_googlenet(input_shape, num_classes);
    throw Error("unknown architecture '" + name + "'");
}

}  // namespace netdepth
