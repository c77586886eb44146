// Compares the serial reference batch analysis against the OpenMP kernel on
// the same workload and checks that both produce identical reports.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "netdepth/analysis.hpp"
#include "netdepth/report.hpp"

using netdepth::AnalysisOptions;
using netdepth::AnalysisResult;
using netdepth::Graph;

namespace {

double run_ms(const std::vector<Graph>& graphs, const AnalysisOptions& opts,
              netdepth::ExecutionMode mode, int reps,
              std::vector<AnalysisResult>* last) {
    using clock = std::chrono::steady_clock;
    auto start = clock::now();
    for (int r = 0; r < reps; ++r) {
        *last = netdepth::analyze_graphs(graphs, opts, mode);
    }
    auto elapsed = std::chrono::duration<double, std::milli>(clock::now() - start);
    return elapsed.count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int graphs_n = 64;
    int reps = 3;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--graphs") && i + 1 < argc) {
            graphs_n = std::atoi(argv[++i]);
        } else if (!std::strcmp(argv[i], "--reps") && i + 1 < argc) {
            reps = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--graphs N] [--reps N]\n", argv[0]);
            return 1;
        }
    }
    if (graphs_n < 1 || reps < 1) {
        std::fprintf(stderr, "error: --graphs and --reps must be positive\n");
        return 1;
    }

    AnalysisOptions opts;
    std::vector<Graph> graphs;
    graphs.reserve(static_cast<size_t>(graphs_n));
    const auto& names = netdepth::builtin_names();
    for (int i = 0; i < graphs_n; ++i) {
        graphs.push_back(netdepth::build_builtin(names[static_cast<size_t>(i) % names.size()],
                                                 opts.input_shape, opts.num_classes,
                                                 opts.shortcut));
    }

    std::vector<AnalysisResult> serial, parallel;
    double serial_ms = run_ms(graphs, opts, netdepth::ExecutionMode::Serial, reps, &serial);
    double parallel_ms =
        run_ms(graphs, opts, netdepth::ExecutionMode::Parallel, reps, &parallel);

    // The parallel kernel must be a pure reordering of the serial reference.
    for (size_t i = 0; i < serial.size(); ++i) {
        if (netdepth::csv_row(serial[i]) != netdepth::csv_row(parallel[i])) {
            std::fprintf(stderr, "error: serial/parallel mismatch at graph %zu\n", i);
            return 1;
        }
    }

    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
    {
#pragma omp single
        threads = omp_get_num_threads();
    }
#endif
    std::printf("graphs          %d (built-ins, 3x224x224)\n", graphs_n);
    std::printf("reps            %d\n", reps);
    std::printf("threads         %d\n", threads);
    std::printf("serial          %.1f ms\n", serial_ms);
    std::printf("openmp          %.1f ms\n", parallel_ms);
    std::printf("speedup         %.2fx\n", serial_ms / parallel_ms);
    std::printf("results         identical\n");
    return 0;
}
