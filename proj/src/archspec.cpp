#include "netdepth/archspec.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace netdepth {

namespace {

struct Token {
    std::string text;
    int col = 0;  // 1-based column of the first character
};

std::vector<Token> tokenize_line(const std::string& line) {
    std::vector<Token> tokens;
    size_t i = 0;
    bool in_quotes = false;
    while (i < line.size()) {
        char c = line[i];
        if (!in_quotes && c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c)) && !in_quotes) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < line.size()) {
            char d = line[i];
            if (d == '"') in_quotes = !in_quotes;
            if (!in_quotes &&
                (std::isspace(static_cast<unsigned char>(d)) || d == '#')) {
                break;
            }
            ++i;
        }
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

std::optional<OpType> kind_from_string(const std::string& s) {
    if (s == "conv") return OpType::Conv;
    if (s == "fc") return OpType::Fc;
    if (s == "maxpool") return OpType::MaxPool;
    if (s == "avgpool") return OpType::AvgPool;
    if (s == "gap") return OpType::GlobalAvgPool;
    if (s == "add") return OpType::Add;
    if (s == "concat") return OpType::Concat;
    if (s == "output") return OpType::Output;
    return std::nullopt;
}

bool valid_id(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
            c != '.') {
            return false;
        }
    }
    return true;
}

int64_t parse_int(const std::string& s, int line, int col, const std::string& what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(line, col, "invalid " + what + " '" + s + "'");
    }
    errno = 0;
    long long v = std::strtoll(s.c_str(), nullptr, 10);
    if (errno != 0) throw ParseError(line, col, what + " out of range '" + s + "'");
    return static_cast<int64_t>(v);
}

struct Parser {
    std::string name;
    std::optional<Shape> input_shape;
    std::vector<Node> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::unordered_map<std::string, int> declared_line;  // id -> line

    void declare(const std::string& id, int line, int col) {
        if (!declared_line.emplace(id, line).second) {
            throw ParseError(line, col, "duplicate node id '" + id + "'");
        }
    }

    void parse_node_line(OpType kind, const std::vector<Token>& tokens, int line) {
        size_t arg_start = 1;
        std::string id;
        if (kind == OpType::Output) {
            id = "output";
            declare(id, line, tokens[0].col);
        } else {
            if (tokens.size() < 2 || tokens[1].text.find('=') != std::string::npos) {
                throw ParseError(line, tokens[0].col, "missing node id");
            }
            id = tokens[1].text;
            if (!valid_id(id)) {
                throw ParseError(line, tokens[1].col, "invalid node id '" + id + "'");
            }
            if (id == "input" || id == "output") {
                throw ParseError(line, tokens[1].col, "reserved node id '" + id + "'");
            }
            declare(id, line, tokens[1].col);
            arg_start = 2;
        }

        Node n{id, kind};
        bool have_kernel = false;
        bool have_out = false;
        bool have_from = false;

        for (size_t t = arg_start; t < tokens.size(); ++t) {
            const auto& tok = tokens[t];
            size_t eq = tok.text.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw ParseError(line, tok.col, "expected key=value, got '" + tok.text + "'");
            }
            std::string key = tok.text.substr(0, eq);
            std::string value = tok.text.substr(eq + 1);
            int vcol = tok.col + static_cast<int>(eq) + 1;

            if (key == "from") {
                have_from = true;
                size_t pos = 0;
                while (pos <= value.size()) {
                    size_t comma = value.find(',', pos);
                    std::string ref = value.substr(
                        pos, comma == std::string::npos ? std::string::npos : comma - pos);
                    int rcol = vcol + static_cast<int>(pos);
                    if (ref.empty()) throw ParseError(line, rcol, "empty 'from' reference");
                    if (!declared_line.count(ref) || ref == id) {
                        throw ParseError(line, rcol, "dangling reference '" + ref + "'");
                    }
                    edges.emplace_back(ref, id);
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            } else if (key == "k") {
                if (!is_pool(kind) && kind != OpType::Conv) {
                    throw ParseError(line, tok.col,
                                     "unexpected key 'k' for " + std::string(op_name(kind)));
                }
                have_kernel = true;
                size_t x = value.find('x');
                if (x == std::string::npos) {
                    n.kernel_h = n.kernel_w = parse_int(value, line, vcol, "kernel");
                } else {
                    n.kernel_h = parse_int(value.substr(0, x), line, vcol, "kernel");
                    n.kernel_w = parse_int(value.substr(x + 1), line,
                                           vcol + static_cast<int>(x) + 1, "kernel");
                }
            } else if (key == "s") {
                if (!is_pool(kind) && kind != OpType::Conv) {
                    throw ParseError(line, tok.col,
                                     "unexpected key 's' for " + std::string(op_name(kind)));
                }
                n.stride = parse_int(value, line, vcol, "stride");
            } else if (key == "p") {
                if (!is_pool(kind) && kind != OpType::Conv) {
                    throw ParseError(line, tok.col,
                                     "unexpected key 'p' for " + std::string(op_name(kind)));
                }
                n.padding = parse_int(value, line, vcol, "padding");
            } else if (key == "out") {
                if (kind != OpType::Conv && kind != OpType::Fc) {
                    throw ParseError(line, tok.col,
                                     "unexpected key 'out' for " + std::string(op_name(kind)));
                }
                have_out = true;
                int64_t v = parse_int(value, line, vcol, "out");
                (kind == OpType::Conv ? n.out_channels : n.out_features) = v;
            } else if (key == "bias") {
                if (kind != OpType::Conv && kind != OpType::Fc) {
                    throw ParseError(line, tok.col,
                                     "unexpected key 'bias' for " + std::string(op_name(kind)));
                }
                if (value == "true") {
                    n.bias = true;
                } else if (value == "false") {
                    n.bias = false;
                } else {
                    throw ParseError(line, vcol, "bias must be true or false");
                }
            } else {
                throw ParseError(line, tok.col, "unknown key '" + key + "'");
            }
        }

        if (!have_from) throw ParseError(line, tokens[0].col, "missing 'from'");
        if (kind == OpType::Conv && !have_kernel) {
            throw ParseError(line, tokens[0].col, "conv requires 'k'");
        }
        if (is_pool(kind) && !have_kernel) {
            throw ParseError(line, tokens[0].col, "pool requires 'k'");
        }
        if ((kind == OpType::Conv || kind == OpType::Fc) && !have_out) {
            throw ParseError(line, tokens[0].col,
                             std::string(op_name(kind)) + " requires 'out'");
        }
        nodes.push_back(std::move(n));
    }
};

}  // namespace

Graph parse_archspec(const std::string& text) {
    Parser p;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    int last_line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        auto tokens = tokenize_line(raw);
        if (tokens.empty()) continue;
        last_line = line;
        const Token& head = tokens[0];

        if (head.text == "network") {
            if (!p.name.empty()) throw ParseError(line, head.col, "duplicate network declaration");
            if (tokens.size() != 2 || tokens[1].text.size() < 2 ||
                tokens[1].text.front() != '"' || tokens[1].text.back() != '"') {
                throw ParseError(line, head.col, "expected: network \"<name>\"");
            }
            p.name = tokens[1].text.substr(1, tokens[1].text.size() - 2);
            if (p.name.empty()) throw ParseError(line, tokens[1].col, "empty network name");
            continue;
        }
        if (head.text == "input") {
            if (p.input_shape) throw ParseError(line, head.col, "duplicate input declaration");
            if (tokens.size() != 4) {
                throw ParseError(line, head.col, "expected: input <C> <H> <W>");
            }
            int64_t c = parse_int(tokens[1].text, line, tokens[1].col, "input channels");
            int64_t h = parse_int(tokens[2].text, line, tokens[2].col, "input height");
            int64_t w = parse_int(tokens[3].text, line, tokens[3].col, "input width");
            p.input_shape = Shape::spatial(c, h, w);
            p.nodes.push_back(make_input());
            p.declare("input", line, head.col);
            continue;
        }
        auto kind = kind_from_string(head.text);
        if (!kind) {
            throw ParseError(line, head.col, "unknown node kind '" + head.text + "'");
        }
        if (!p.input_shape) {
            throw ParseError(line, head.col, "node declared before 'input'");
        }
        p.parse_node_line(*kind, tokens, line);
    }

    if (p.name.empty()) throw ParseError(std::max(last_line, 1), 1, "missing network declaration");
    if (!p.input_shape) throw ParseError(std::max(last_line, 1), 1, "missing input declaration");

    Graph g(p.name, *p.input_shape, std::move(p.nodes), std::move(p.edges));
    ValidationReport report = validate(g);
    if (!report.ok) {
        const Violation& v = report.violations.front();
        int vline = 0;
        auto it = p.declared_line.find(v.node_id);
        if (it != p.declared_line.end()) vline = it->second;
        std::string where = vline > 0 ? "line " + std::to_string(vline) + ": " : "";
        throw ValidationError(where + report.summary());
    }
    return g;
}

namespace {

std::string kernel_string(const Node& n) {
    if (n.kernel_h == n.kernel_w) return std::to_string(n.kernel_h);
    return std::to_string(n.kernel_h) + "x" + std::to_string(n.kernel_w);
}

}  // namespace

std::string serialize_archspec(const Graph& g) {
    // The text format names these two nodes implicitly.
    if (g.index_of("input") < 0 || g.node(g.index_of("input")).type != OpType::Input ||
        g.index_of("output") < 0 || g.node(g.index_of("output")).type != OpType::Output) {
        throw Error("serialization requires nodes with the reserved ids 'input' and 'output'");
    }
    std::ostringstream out;
    out << "# archspec v1\n";
    out << "network \"" << g.name() << "\"\n";

    for (int idx : topo_order(g)) {
        const Node& n = g.node(idx);
        if (n.type == OpType::Input) {
            const Shape& s = g.input_shape();
            out << "input " << s.channels << " " << s.height << " " << s.width << "\n";
            continue;
        }
        out << op_name(n.type);
        if (n.type != OpType::Output) out << " " << n.id;
        switch (n.type) {
            case OpType::Conv:
                out << " k=" << kernel_string(n) << " s=" << n.stride << " p=" << n.padding
                    << " out=" << n.out_channels << " bias=" << (n.bias ? "true" : "false");
                break;
            case OpType::MaxPool:
            case OpType::AvgPool:
                out << " k=" << kernel_string(n) << " s=" << n.stride << " p=" << n.padding;
                break;
            case OpType::Fc:
                out << " out=" << n.out_features << " bias=" << (n.bias ? "true" : "false");
                break;
            default:
                break;
        }
        std::vector<std::string> from;
        for (int pidx : g.preds(idx)) from.push_back(g.node(pidx).id);
        std::sort(from.begin(), from.end());
        out << " from=";
        for (size_t i = 0; i < from.size(); ++i) {
            if (i) out << ",";
            out << from[i];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace netdepth
