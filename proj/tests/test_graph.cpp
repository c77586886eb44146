#include <algorithm>

#include "doctest.h"
#include "netdepth/graph.hpp"
#include "random_graphs.hpp"

using namespace netdepth;

namespace {

Graph chain_graph() {
    return Graph("t", Shape::spatial(3, 32, 32),
                 {make_input(), make_conv("c1", 3, 1, 1, 8), make_output()},
                 {{"input", "c1"}, {"c1", "output"}});
}

bool has_rule(const ValidationReport& r, const std::string& rule) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const Violation& v) { return v.rule == rule; });
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("minimal chain validates") {
    ValidationReport r = validate(chain_graph());
    CHECK(r.ok);
    CHECK(r.violations.empty());
}

TEST_CASE("two-node cycle is an acyclicity violation") {
    Graph g("t", Shape::spatial(3, 32, 32),
            {make_input(), make_conv("a", 3, 1, 1, 8), make_conv("b", 3, 1, 1, 8),
             make_output()},
            {{"input", "a"}, {"a", "b"}, {"b", "a"}, {"b", "output"}});
    ValidationReport r = validate(g);
    CHECK(!r.ok);
    CHECK(has_rule(r, "acyclicity"));
    CHECK_THROWS_AS(topo_order(g), ValidationError);
}

TEST_CASE("add shape mismatch is reported") {
    // Branch a keeps 56x56, branch b halves it.
    Graph g("t", Shape::spatial(64, 56, 56),
            {make_input(), make_conv("a", 3, 1, 1, 64), make_conv("b", 3, 2, 1, 64),
             make_add("m"), make_output()},
            {{"input", "a"}, {"input", "b"}, {"a", "m"}, {"b", "m"}, {"m", "output"}});
    ValidationReport r = validate(g);
    CHECK(!r.ok);
    CHECK(has_rule(r, "add shape mismatch"));
}

TEST_CASE("structural rules") {
    SUBCASE("missing output") {
        Graph g("t", Shape::spatial(3, 32, 32), {make_input(), make_conv("c", 3, 1, 1, 4)},
                {{"input", "c"}});
        CHECK(has_rule(validate(g), "single-output"));
    }
    SUBCASE("two inputs") {
        Graph g("t", Shape::spatial(3, 32, 32),
                {make_input("input"), make_input("input2"), make_add("m"), make_output()},
                {{"input", "m"}, {"input2", "m"}, {"m", "output"}});
        CHECK(has_rule(validate(g), "single-input"));
    }
    SUBCASE("dangling side node") {
        Graph g("t", Shape::spatial(3, 32, 32),
                {make_input(), make_conv("c", 3, 1, 1, 4), make_conv("side", 3, 1, 1, 4),
                 make_output()},
                {{"input", "c"}, {"c", "output"}, {"c", "side"}});
        CHECK(has_rule(validate(g), "connectivity"));
    }
    SUBCASE("merge with one predecessor") {
        Graph g("t", Shape::spatial(3, 32, 32),
                {make_input(), make_add("m"), make_output()},
                {{"input", "m"}, {"m", "output"}});
        CHECK(has_rule(validate(g), "arity"));
    }
    SUBCASE("bad conv attrs") {
        Graph g("t", Shape::spatial(3, 32, 32),
                {make_input(), make_conv("c", 0, 1, 0, 4), make_output()},
                {{"input", "c"}, {"c", "output"}});
        CHECK(has_rule(validate(g), "attrs"));
    }
    SUBCASE("duplicate node ids rejected at construction") {
        CHECK_THROWS_AS(Graph("t", Shape::spatial(3, 32, 32),
                              {make_input(), make_conv("c", 3, 1, 1, 4),
                               make_conv("c", 3, 1, 1, 4), make_output()},
                              {}),
                        Error);
    }
}

TEST_CASE("topo order") {
    SUBCASE("simple chain") {
        CHECK(topo_order_ids(chain_graph()) ==
              std::vector<std::string>{"input", "c1", "output"});
    }
    SUBCASE("diamond puts the merge after both branches") {
        Graph g("t", Shape::spatial(8, 16, 16),
                {make_input(), make_conv("a", 3, 1, 1, 8), make_conv("b", 3, 1, 1, 8),
                 make_add("m"), make_output()},
                {{"input", "a"}, {"input", "b"}, {"a", "m"}, {"b", "m"}, {"m", "output"}});
        auto ids = topo_order_ids(g);
        CHECK(ids.front() == "input");
        auto pos = [&](const std::string& id) {
            return std::find(ids.begin(), ids.end(), id) - ids.begin();
        };
        CHECK(pos("m") > pos("a"));
        CHECK(pos("m") > pos("b"));
    }
    SUBCASE("independent branches break ties lexicographically") {
        Graph g("t", Shape::spatial(8, 16, 16),
                {make_input(), make_conv("zz", 3, 1, 1, 8), make_conv("aa", 3, 1, 1, 8),
                 make_add("m"), make_output()},
                {{"input", "zz"}, {"input", "aa"}, {"zz", "m"}, {"aa", "m"}, {"m", "output"}});
        CHECK(topo_order_ids(g) ==
              std::vector<std::string>{"input", "aa", "zz", "m", "output"});
    }
}

TEST_CASE("shape inference") {
    SUBCASE("7x7 stride-2 pad-3 conv halves 224") {
        Graph g("t", Shape::spatial(3, 224, 224),
                {make_input(), make_conv("c", 7, 2, 3, 64), make_output()},
                {{"input", "c"}, {"c", "output"}});
        ShapeMap shapes = infer_shapes(g);
        CHECK(shapes[static_cast<size_t>(g.index_of("c"))] == Shape::spatial(64, 112, 112));
    }
    SUBCASE("3x3 stride-1 pad-1 conv preserves 224") {
        Graph g("t", Shape::spatial(3, 224, 224),
                {make_input(), make_conv("c", 3, 1, 1, 64), make_output()},
                {{"input", "c"}, {"c", "output"}});
        CHECK(infer_shapes(g)[static_cast<size_t>(g.index_of("c"))] ==
              Shape::spatial(64, 224, 224));
    }
    SUBCASE("3x3 stride-2 maxpool: 112 -> 55") {
        Graph g("t", Shape::spatial(64, 112, 112),
                {make_input(), make_maxpool("p", 3, 2, 0), make_output()},
                {{"input", "p"}, {"p", "output"}});
        CHECK(infer_shapes(g)[static_cast<size_t>(g.index_of("p"))] ==
              Shape::spatial(64, 55, 55));
    }
    SUBCASE("underflow names the node") {
        Graph g("t", Shape::spatial(3, 4, 4),
                {make_input(), make_maxpool("p", 7, 2, 0), make_output()},
                {{"input", "p"}, {"p", "output"}});
        CHECK_THROWS_WITH_AS(infer_shapes(g), "shape underflow at node p", ValidationError);
        CHECK(has_rule(validate(g), "shape underflow"));
    }
    SUBCASE("fc flattens spatial input and gap collapses to 1x1") {
        Graph g("t", Shape::spatial(8, 6, 6),
                {make_input(), make_gap("g"), make_fc("f", 10), make_output()},
                {{"input", "g"}, {"g", "f"}, {"f", "output"}});
        ShapeMap shapes = infer_shapes(g);
        CHECK(shapes[static_cast<size_t>(g.index_of("g"))] == Shape::spatial(8, 1, 1));
        CHECK(shapes[static_cast<size_t>(g.index_of("f"))] == Shape::flat(10));
    }
    SUBCASE("conv after fc is rejected") {
        Graph g("t", Shape::spatial(8, 6, 6),
                {make_input(), make_fc("f", 10), make_conv("c", 1, 1, 0, 4), make_output()},
                {{"input", "f"}, {"f", "c"}, {"c", "output"}});
        CHECK_THROWS_AS(infer_shapes(g), ValidationError);
    }
    SUBCASE("concat sums channels, requires equal spatial dims") {
        Graph g("t", Shape::spatial(8, 16, 16),
                {make_input(), make_conv("a", 1, 1, 0, 3), make_conv("b", 1, 1, 0, 5),
                 make_concat("m"), make_output()},
                {{"input", "a"}, {"input", "b"}, {"a", "m"}, {"b", "m"}, {"m", "output"}});
        CHECK(infer_shapes(g)[static_cast<size_t>(g.index_of("m"))] ==
              Shape::spatial(8, 16, 16));
        CHECK(has_rule(validate(Graph(
                           "t", Shape::spatial(8, 16, 16),
                           {make_input(), make_conv("a", 1, 1, 0, 3),
                            make_conv("b", 1, 2, 0, 5), make_concat("m"), make_output()},
                           {{"input", "a"},
                            {"input", "b"},
                            {"a", "m"},
                            {"b", "m"},
                            {"m", "output"}})),
                       "concat spatial mismatch"));
    }
}

TEST_CASE("longest weighted path") {
    auto weight_convs = [](const Node& n) -> uint64_t { return is_weighted(n.type) ? 1 : 0; };
    SUBCASE("chain of five convs") {
        std::vector<Node> nodes{make_input()};
        std::vector<std::pair<std::string, std::string>> edges;
        std::string prev = "input";
        for (int i = 0; i < 5; ++i) {
            std::string id = "c" + std::to_string(i);
            nodes.push_back(make_conv(id, 3, 1, 1, 8));
            edges.emplace_back(prev, id);
            prev = id;
        }
        nodes.push_back(make_output());
        edges.emplace_back(prev, "output");
        Graph g("t", Shape::spatial(3, 16, 16), std::move(nodes), std::move(edges));
        CHECK(longest_weighted_path(g, weight_convs) == 5);
    }
    SUBCASE("residual block takes the two-conv body") {
        Graph g = testutil::residual_chain(1, 2);
        auto convs_only = [](const Node& n) -> uint64_t {
            return n.type == OpType::Conv ? 1 : 0;
        };
        // stem + body(2); the skip contributes zero.
        CHECK(longest_weighted_path(g, convs_only) == 3);
    }
    SUBCASE("inception-style module takes the deepest branch") {
        Graph g("t", Shape::spatial(8, 16, 16),
                {make_input(), make_conv("b1", 1, 1, 0, 4), make_conv("b2r", 1, 1, 0, 4),
                 make_conv("b2", 3, 1, 1, 4), make_conv("b3r", 1, 1, 0, 4),
                 make_conv("b3", 5, 1, 2, 4), make_maxpool("b4p", 3, 1, 1),
                 make_conv("b4", 1, 1, 0, 4), make_concat("m"), make_output()},
                {{"input", "b1"},
                 {"input", "b2r"},
                 {"b2r", "b2"},
                 {"input", "b3r"},
                 {"b3r", "b3"},
                 {"input", "b4p"},
                 {"b4p", "b4"},
                 {"b1", "m"},
                 {"b2", "m"},
                 {"b3", "m"},
                 {"b4", "m"},
                 {"m", "output"}});
        CHECK(longest_weighted_path(g, weight_convs) == 2);
    }
}

TEST_CASE("valid graphs always topo-sort and shape-infer") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
        Graph g = testutil::random_graph(seed);
        ValidationReport r = validate(g);
        REQUIRE_MESSAGE(r.ok, "seed ", seed, ": ", r.summary());
        CHECK_NOTHROW(topo_order(g));
        CHECK_NOTHROW(infer_shapes(g));
    }
}

TEST_CASE("shape inference is deterministic") {
    Graph a = testutil::random_graph(7);
    Graph b = testutil::random_graph(7);
    CHECK(a == b);
    CHECK(infer_shapes(a) == infer_shapes(b));
}

}  // TEST_SUITE
