#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netdepth/builders.hpp"
#include "netdepth/cost.hpp"
#include "netdepth/depth.hpp"
#include "netdepth/grad_depth.hpp"
#include "netdepth/graph.hpp"

namespace netdepth {

// Which nominal-depth convention the human-readable report shows; CSV and
// JSON always carry both columns.
enum class ConventionMode { Layer, Module, Both };

struct AnalysisOptions {
    Shape input_shape = Shape::spatial(3, 224, 224);
    int64_t num_classes = 1000;
    ShortcutPolicy shortcut = ShortcutPolicy::Projection;
    ConventionMode convention = ConventionMode::Both;
    std::vector<double> gammas{1.0, 0.9, 0.7, 0.5};
    bool fc_depth = true;  // count fc layers toward path length
    bool run_oracle = false;
    uint64_t oracle_cap = 4096;
    // Floating-point path accumulation for graphs whose exact path counts
    // exceed 64 bits. Off by default; exact arithmetic covers every built-in.
    bool approx_paths = false;
    std::optional<std::map<int, double>> custom_weights;
};

struct AnalysisResult {
    std::string name;
    Shape input_shape;
    int64_t num_classes = 0;

    uint64_t nominal_layer = 0;
    uint64_t nominal_module = 0;
    bool module_fallback = false;

    bool approx = false;
    std::optional<Rational> d_eff_exact;  // set unless approx
    double d_eff_general = 0.0;
    FamilyEstimate family;
    std::vector<WeightedDepthReport> grad;  // one per gamma, then optional custom

    uint64_t path_count = 0;     // 0 when approx
    std::string path_count_str;  // exact integer or approx rendering
    int l_min = 0;
    int l_max = 0;

    CostReport cost;
    std::optional<uint64_t> oracle_paths;  // set when the enumeration oracle ran
    std::vector<std::string> warnings;
};

// Full pipeline over one validated graph: validate -> infer_shapes -> depth
// -> gradient-weighted depth -> cost (+ optional enumeration oracle).
AnalysisResult analyze_graph(const Graph& g, const AnalysisOptions& opts);

// Batch analysis. Analyses are pure functions over immutable graphs, so the
// parallel kernel distributes graphs across OpenMP threads; the serial
// reference runs the same pipeline in a plain loop and must produce identical
// results. When several graphs fail, the error of the earliest one in input
// order is reported in both modes.
enum class ExecutionMode { Serial, Parallel };
std::vector<AnalysisResult> analyze_graphs(const std::vector<Graph>& graphs,
                                           const AnalysisOptions& opts, ExecutionMode mode);
std::vector<AnalysisResult> analyze_graphs_serial(const std::vector<Graph>& graphs,
                                                  const AnalysisOptions& opts);
std::vector<AnalysisResult> analyze_graphs_parallel(const std::vector<Graph>& graphs,
                                                    const AnalysisOptions& opts);

}  // namespace netdepth
