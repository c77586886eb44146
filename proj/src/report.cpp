#include "netdepth/report.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace netdepth {

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_warnings(const std::vector<std::string>& warnings) {
    std::string out;
    for (size_t i = 0; i < warnings.size(); ++i) {
        if (i) out += ';';
        out += warnings[i];
    }
    return out;
}

std::string d_eff_general_string(const AnalysisResult& r) {
    if (r.d_eff_exact) return r.d_eff_exact->to_decimal(2);
    return format_double(r.d_eff_general, 2);
}

std::string shape_string(const Shape& s) {
    std::ostringstream os;
    os << s.channels << "x" << s.height << "x" << s.width;
    return os.str();
}

}  // namespace

std::string csv_header(const AnalysisOptions& opts) {
    std::string out = "architecture,nominal_layer,nominal_module,d_eff_general,d_eff_family";
    for (double gamma : opts.gammas) out += ",d_eff_grad_g" + gamma_label(gamma);
    if (opts.custom_weights) out += ",d_eff_grad_custom";
    out += ",params_M,macs_G,flops_G,path_count,l_min,l_max,warnings";
    return out;
}

std::string csv_row(const AnalysisResult& r) {
    std::ostringstream os;
    os << csv_quote(r.name) << "," << r.nominal_layer << "," << r.nominal_module << ","
       << d_eff_general_string(r) << "," << format_double(r.family.value, 2);
    for (const auto& g : r.grad) os << "," << format_double(g.value, 2);
    os << "," << r.cost.params_M() << "," << r.cost.macs_G() << "," << r.cost.flops_G()
       << "," << r.path_count_str << "," << r.l_min << "," << r.l_max << ","
       << join_warnings(r.warnings);
    return os.str();
}

std::string render_table(const AnalysisResult& r, const AnalysisOptions& opts) {
    std::ostringstream os;
    os << "architecture     " << r.name << "\n";
    os << "input shape      " << shape_string(r.input_shape) << " (" << r.num_classes
       << " classes)\n";
    os << "nominal depth    ";
    if (opts.convention != ConventionMode::Module) {
        os << r.nominal_layer << " (layer)";
    }
    if (opts.convention == ConventionMode::Both) os << ", ";
    if (opts.convention != ConventionMode::Layer) {
        os << r.nominal_module << " (module";
        if (r.module_fallback) os << "; no concat modules, layer fallback";
        os << ")";
    }
    os << "\n";
    os << "path count       " << r.path_count_str << " (lengths " << r.l_min << ".."
       << r.l_max << ")";
    if (r.approx) os << " [approx]";
    os << "\n";
    os << "effective depth  " << d_eff_general_string(r);
    if (r.d_eff_exact && !r.d_eff_exact->is_integer()) {
        os << " (exact " << r.d_eff_exact->to_string() << ")";
    }
    os << "\n";
    os << "family estimate  " << format_double(r.family.value, 2) << " ("
       << family_name(r.family.family) << ")\n";
    for (const auto& g : r.grad) {
        os << "grad-weighted    "
           << (g.label == "custom" ? "custom weights" : "model attenuation(gamma=" + g.label + ")")
           << " -> " << format_double(g.value, 2) << "\n";
    }
    os << "params           " << r.cost.params << " (" << r.cost.params_M() << " M)\n";
    os << "macs             " << r.cost.macs << " (" << r.cost.macs_G() << " G)\n";
    os << "flops            " << r.cost.flops << " (" << r.cost.flops_G()
       << " G; 1 MAC = 2 FLOPs, bias adds params only)\n";
    if (r.oracle_paths) {
        os << "oracle           verified, " << *r.oracle_paths << " paths enumerated\n";
    }
    if (!r.warnings.empty()) {
        os << "warnings         " << join_warnings(r.warnings) << "\n";
    }
    return os.str();
}

std::string render_json(const AnalysisResult& r) {
    nlohmann::ordered_json j;
    j["architecture"] = r.name;
    j["input_shape"] = shape_string(r.input_shape);
    j["classes"] = r.num_classes;

    nlohmann::ordered_json depth;
    depth["nominal_layer"] = r.nominal_layer;
    depth["nominal_module"] = r.nominal_module;
    depth["module_fallback"] = r.module_fallback;
    nlohmann::ordered_json general;
    if (r.d_eff_exact) general["rational"] = r.d_eff_exact->to_string();
    general["decimal"] = d_eff_general_string(r);
    depth["effective_general"] = general;
    depth["effective_family"] = {{"value", format_double(r.family.value, 2)},
                                 {"family", family_name(r.family.family)}};
    depth["path_count"] = r.path_count_str;
    depth["approx"] = r.approx;
    depth["l_min"] = r.l_min;
    depth["l_max"] = r.l_max;
    j["depth"] = depth;

    nlohmann::ordered_json grad = nlohmann::ordered_json::array();
    for (const auto& g : r.grad) {
        nlohmann::ordered_json mass = nlohmann::ordered_json::object();
        for (const auto& [length, share] : g.weight_mass) {
            mass[std::to_string(length)] = share;
        }
        grad.push_back({{"weights", g.label == "custom" ? "custom" : "attenuation(gamma)"},
                        {"label", g.label},
                        {"value", format_double(g.value, 2)},
                        {"weight_mass", mass}});
    }
    j["grad_weighted"] = grad;

    nlohmann::ordered_json cost;
    cost["params"] = r.cost.params;
    cost["macs"] = r.cost.macs;
    cost["flops"] = r.cost.flops;
    cost["params_M"] = r.cost.params_M();
    cost["macs_G"] = r.cost.macs_G();
    cost["flops_G"] = r.cost.flops_G();
    nlohmann::ordered_json per_node = nlohmann::ordered_json::array();
    for (const auto& n : r.cost.per_node) {
        if (n.params == 0 && n.macs == 0) continue;
        per_node.push_back(
            {{"id", n.id}, {"params", n.params}, {"macs", n.macs}, {"flops", n.flops}});
    }
    cost["per_node"] = per_node;
    j["cost"] = cost;

    if (r.oracle_paths) j["oracle"] = {{"paths", *r.oracle_paths}};
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string render(const AnalysisResult& r, const AnalysisOptions& opts,
                   ReportFormat format) {
    switch (format) {
        case ReportFormat::Table: return render_table(r, opts);
        case ReportFormat::Csv: return csv_header(opts) + "\n" + csv_row(r) + "\n";
        case ReportFormat::Json: return render_json(r);
    }
    return {};
}

const ReferenceAccuracy::Row* ReferenceAccuracy::find(const std::string& architecture) const {
    for (const Row& row : rows) {
        if (row.architecture == architecture) return &row;
    }
    return nullptr;
}

ReferenceAccuracy parse_reference_accuracy(std::istream& in) {
    ReferenceAccuracy table;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string name, top1_text;
        if (!std::getline(row, name, ',') || !std::getline(row, top1_text)) {
            throw Error("accuracy csv line " + std::to_string(lineno) +
                        ": expected architecture,top1");
        }
        if (!saw_header) {
            if (name != "architecture" || top1_text != "top1") {
                throw Error("accuracy csv line 1: header must be 'architecture,top1'");
            }
            saw_header = true;
            continue;
        }
        double top1 = 0.0;
        try {
            size_t pos = 0;
            top1 = std::stod(top1_text, &pos);
            if (pos != top1_text.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw Error("accuracy csv line " + std::to_string(lineno) + ": malformed row '" +
                        line + "'");
        }
        if (top1 < 0.0 || top1 > 100.0) {
            throw Error("accuracy csv line " + std::to_string(lineno) +
                        ": top1 out of range [0, 100]");
        }
        if (table.find(name) != nullptr) {
            throw Error("accuracy csv line " + std::to_string(lineno) + ": duplicate name '" +
                        name + "'");
        }
        table.rows.push_back({name, top1, top1_text});
    }
    if (!saw_header) throw Error("accuracy csv: missing 'architecture,top1' header");
    return table;
}

ReferenceAccuracy load_reference_accuracy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open accuracy csv '" + path + "'");
    return parse_reference_accuracy(in);
}

std::string tradeoff_csv(const std::vector<AnalysisResult>& results,
                         const ReferenceAccuracy& accuracy) {
    for (const auto& r : results) {
        if (accuracy.find(r.name) == nullptr) {
            throw Error("no accuracy for " + r.name);
        }
    }
    std::vector<size_t> order(results.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return results[a].cost.macs < results[b].cost.macs;
    });
    std::string out = "architecture,macs_G,params_M,top1\n";
    for (size_t i : order) {
        const auto& r = results[i];
        out += csv_quote(r.name) + "," + r.cost.macs_G() + "," + r.cost.params_M() + "," +
               accuracy.find(r.name)->top1_text + "\n";
    }
    return out;
}

}  // namespace netdepth
