#pragma once

#include <string>
#include <vector>

#include "netdepth/analysis.hpp"

namespace netdepth {

enum class ReportFormat { Table, Csv, Json };

// Fixed column order:
//   architecture,nominal_layer,nominal_module,d_eff_general,d_eff_family,
//   d_eff_grad_g<gamma>...,[d_eff_grad_custom,]params_M,macs_G,flops_G,
//   path_count,l_min,l_max,warnings
// Depths use two decimals, cost columns one, ties-to-even. Output is
// byte-identical across runs on identical inputs.
std::string csv_header(const AnalysisOptions& opts);
std::string csv_row(const AnalysisResult& r);

std::string render_table(const AnalysisResult& r, const AnalysisOptions& opts);
std::string render_json(const AnalysisResult& r);
std::string render(const AnalysisResult& r, const AnalysisOptions& opts, ReportFormat format);

// Rows of (architecture, top-1 accuracy in percent), unique names, 0..100.
struct ReferenceAccuracy {
    struct Row {
        std::string architecture;
        double top1 = 0.0;
        std::string top1_text;  // as written in the file
    };
    std::vector<Row> rows;
    const Row* find(const std::string& architecture) const;
};

// Two-column CSV with a required "architecture,top1" header. Throws Error
// with the line number for malformed rows, duplicates, or out-of-range values.
ReferenceAccuracy parse_reference_accuracy(std::istream& in);
ReferenceAccuracy load_reference_accuracy(const std::string& path);

// architecture,macs_G,params_M,top1 sorted by exact MAC count ascending
// (stable on ties). Throws Error("no accuracy for <name>") when a result has
// no accuracy row.
std::string tradeoff_csv(const std::vector<AnalysisResult>& results,
                         const ReferenceAccuracy& accuracy);

}  // namespace netdepth
