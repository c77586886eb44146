#include "netdepth/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "netdepth/analysis.hpp"
#include "netdepth/archspec.hpp"
#include "netdepth/report.hpp"

namespace netdepth::cli {

namespace {

struct CommonFlags {
    std::string input_shape = "3x224x224";
    int64_t classes = 1000;
    std::string gammas = "1.0,0.9,0.7,0.5";
    std::string convention = "both";
    std::string shortcut = "projection";
    std::string fc_depth = "on";
    std::string weights_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--input-shape", flags.input_shape, "Input tensor as CxHxW")
        ->capture_default_str();
    cmd->add_option("--classes", flags.classes, "Classifier output classes")
        ->capture_default_str();
    cmd->add_option("--gamma", flags.gammas,
                    "Comma-separated attenuation factors in (0,1] for the "
                    "gradient-weighted depth sweep")
        ->capture_default_str();
    cmd->add_option("--depth-convention", flags.convention,
                    "Nominal depth convention to display")
        ->check(CLI::IsMember({"layer", "module", "both"}))
        ->capture_default_str();
    cmd->add_option("--shortcut", flags.shortcut, "Residual shortcut policy")
        ->check(CLI::IsMember({"projection", "identity"}))
        ->capture_default_str();
    cmd->add_option("--fc-depth", flags.fc_depth,
                    "Count fully connected layers toward path length")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cmd->add_option("--weights", flags.weights_path,
                    "CSV of per-length path weights (length,weight) reported as "
                    "an extra grad-weighted column");
}

Shape parse_input_shape(const std::string& text) {
    int64_t c = 0, h = 0, w = 0;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(text);
    if (!(in >> c >> sep1 >> h >> sep2 >> w) || sep1 != 'x' || sep2 != 'x' ||
        !in.eof() || c < 1 || h < 1 || w < 1) {
        throw Error("invalid --input-shape '" + text + "' (expected CxHxW)");
    }
    return Shape::spatial(c, h, w);
}

std::vector<double> parse_gammas(const std::string& text) {
    std::vector<double> gammas;
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) {
        try {
            size_t pos = 0;
            double g = std::stod(field, &pos);
            if (pos != field.size()) throw std::invalid_argument("");
            gammas.push_back(g);
        } catch (const std::exception&) {
            throw Error("invalid --gamma value '" + field + "'");
        }
        if (!(gammas.back() > 0.0) || gammas.back() > 1.0) {
            throw Error("--gamma values must be in (0, 1]");
        }
    }
    if (gammas.empty()) throw Error("--gamma requires at least one value");
    return gammas;
}

AnalysisOptions make_options(const CommonFlags& flags) {
    AnalysisOptions opts;
    opts.input_shape = parse_input_shape(flags.input_shape);
    opts.num_classes = flags.classes;
    if (opts.num_classes < 1) throw Error("--classes must be positive");
    opts.gammas = parse_gammas(flags.gammas);
    opts.convention = flags.convention == "layer"    ? ConventionMode::Layer
                      : flags.convention == "module" ? ConventionMode::Module
                                                     : ConventionMode::Both;
    opts.shortcut = flags.shortcut == "identity" ? ShortcutPolicy::IdentityPad
                                                 : ShortcutPolicy::Projection;
    opts.fc_depth = flags.fc_depth == "on";
    if (!flags.weights_path.empty()) {
        opts.custom_weights = load_weights_csv(flags.weights_path);
    }
    return opts;
}

Graph load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open spec file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_archspec(text.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line, e.col, path + ": " + std::string(e.what()));
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + std::string(e.what()));
    }
}

// A source is a built-in architecture name or a path to an archspec file.
Graph load_source(const std::string& source, const AnalysisOptions& opts) {
    if (is_builtin(source)) {
        return build_builtin(source, opts.input_shape, opts.num_classes, opts.shortcut);
    }
    return load_spec_file(source);
}

std::vector<Graph> load_sources(const std::vector<std::string>& sources,
                                const AnalysisOptions& opts) {
    std::vector<Graph> graphs;
    graphs.reserve(sources.size());
    for (const auto& s : sources) graphs.push_back(load_source(s, opts));
    return graphs;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Static analyzer for convolutional network graphs: exact path-length "
                 "distributions, nominal and effective depth, and parameter/MAC/FLOP "
                 "budgets"};
    app.name("netdepth");
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Analyze one architecture");
    CommonFlags analyze_flags;
    std::string arch, spec_path, format = "table";
    bool oracle = false, approx = false;
    uint64_t oracle_cap = 4096;
    auto* arch_opt = analyze->add_option("--arch", arch, "Built-in architecture name");
    arch_opt->check(CLI::IsMember(builtin_names()));
    auto* spec_opt = analyze->add_option("--spec", spec_path, "Path to an .archspec file");
    arch_opt->excludes(spec_opt);
    analyze->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    analyze->add_flag("--oracle", oracle,
                      "Cross-check the path polynomial against explicit enumeration");
    analyze->add_option("--oracle-cap", oracle_cap, "Path budget for --oracle")
        ->capture_default_str();
    analyze->add_flag("--approx", approx,
                      "Fall back to floating-point path accumulation on overflow");
    add_common_flags(analyze, analyze_flags);

    // compare
    auto* compare = app.add_subcommand(
        "compare", "Analyze several architectures into one CSV, one row per source");
    CommonFlags compare_flags;
    std::vector<std::string> compare_sources;
    compare->add_option("sources", compare_sources,
                        "Built-in names and/or .archspec paths")
        ->required();
    add_common_flags(compare, compare_flags);

    // tradeoff
    auto* tradeoff = app.add_subcommand(
        "tradeoff", "Join cost metrics with reference accuracies, sorted by MACs");
    CommonFlags tradeoff_flags;
    std::vector<std::string> tradeoff_sources;
    std::string accuracy_path;
    tradeoff->add_option("sources", tradeoff_sources,
                         "Built-in names and/or .archspec paths")
        ->required();
    tradeoff->add_option("--accuracy", accuracy_path, "Reference accuracy CSV")
        ->required();
    add_common_flags(tradeoff, tradeoff_flags);

    try {
        std::vector<const char*> argv;
        argv.push_back("netdepth");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (analyze->parsed()) {
            if ((arch.empty()) == (spec_path.empty())) {
                throw Error("analyze requires exactly one of --arch or --spec");
            }
            AnalysisOptions opts = make_options(analyze_flags);
            opts.run_oracle = oracle;
            opts.oracle_cap = oracle_cap;
            opts.approx_paths = approx;
            Graph g = load_source(arch.empty() ? spec_path : arch, opts);
            AnalysisResult result = analyze_graph(g, opts);
            ReportFormat rf = format == "csv"    ? ReportFormat::Csv
                              : format == "json" ? ReportFormat::Json
                                                 : ReportFormat::Table;
            out << render(result, opts, rf);
        } else if (compare->parsed()) {
            AnalysisOptions opts = make_options(compare_flags);
            std::vector<Graph> graphs = load_sources(compare_sources, opts);
            std::vector<AnalysisResult> results =
                analyze_graphs(graphs, opts, ExecutionMode::Parallel);
            out << csv_header(opts) << "\n";
            for (const auto& r : results) out << csv_row(r) << "\n";
        } else if (tradeoff->parsed()) {
            AnalysisOptions opts = make_options(tradeoff_flags);
            ReferenceAccuracy accuracy = load_reference_accuracy(accuracy_path);
            std::vector<Graph> graphs = load_sources(tradeoff_sources, opts);
            std::vector<AnalysisResult> results =
                analyze_graphs(graphs, opts, ExecutionMode::Parallel);
            out << tradeoff_csv(results, accuracy);
        }
    } catch (const AnalysisError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace netdepth::cli
