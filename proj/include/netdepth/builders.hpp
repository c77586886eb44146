#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netdepth/graph.hpp"

namespace netdepth {

// How residual shortcuts handle stage transitions (downsampling or channel
// growth):
//  - Projection: a 1x1 convolution on the shortcut. It carries parameters and
//    MACs and adds one weighted layer to paths that take it.
//  - IdentityPad: parameter-free. Spatial downsampling becomes a 1x1 stride-2
//    average pool and channel growth a concat of duplicated branches, which is
//    shape- and cost-equivalent to zero padding; such shortcuts contribute
//    zero path length.
// Shape-preserving blocks always get plain identity shortcuts.
enum class ShortcutPolicy { Projection, IdentityPad };

Graph build_vgg(int variant, Shape input_shape, int64_t num_classes);

Graph build_resnet(int variant, Shape input_shape, int64_t num_classes,
                   ShortcutPolicy policy = ShortcutPolicy::Projection);

Graph build_googlenet(Shape input_shape, int64_t num_classes);

// Names accepted by the CLI's --arch flag.
const std::vector<std::string>& builtin_names();
bool is_builtin(const std::string& name);
Graph build_builtin(const std::string& name, Shape input_shape, int64_t num_classes,
                    ShortcutPolicy policy);

}  // namespace netdepth
