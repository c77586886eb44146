#include <map>
#include <vector>

#include "doctest.h"
#include "netdepth/builders.hpp"
#include "netdepth/depth.hpp"
#include "random_graphs.hpp"

using namespace netdepth;

namespace {

const Shape kImageNetShape = Shape::spatial(3, 224, 224);

std::vector<int> expand(const PathPolynomial& poly) {
    std::vector<int> lengths;
    for (int l = poly.l_min(); l <= poly.l_max(); ++l) {
        for (uint64_t c = 0; c < poly.coeff(l); ++c) lengths.push_back(l);
    }
    return lengths;
}

std::map<int, uint64_t> coeff_map(const PathPolynomial& poly) {
    std::map<int, uint64_t> m;
    for (int l = poly.l_min(); l <= poly.l_max(); ++l) {
        if (poly.coeff(l) > 0) m[l] = poly.coeff(l);
    }
    return m;
}

Graph conv_chain(int n) {
    std::vector<Node> nodes{make_input()};
    std::vector<std::pair<std::string, std::string>> edges;
    std::string prev = "input";
    for (int i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "c%02d", i);
        nodes.push_back(make_conv(id, 3, 1, 1, 8));
        edges.emplace_back(prev, id);
        prev = id;
    }
    nodes.push_back(make_output());
    edges.emplace_back(prev, "output");
    return Graph("chain", Shape::spatial(3, 16, 16), std::move(nodes), std::move(edges));
}

}  // namespace

TEST_SUITE("depth") {

TEST_CASE("path polynomial of a plain chain") {
    CHECK(coeff_map(path_polynomial(conv_chain(2))) == std::map<int, uint64_t>{{2, 1}});
}

TEST_CASE("one residual block: {2:1, 4:1}") {
    // stem conv + 2-conv identity block + fc head.
    Graph g = testutil::residual_chain(1, 2);
    PathPolynomial poly = path_polynomial(g);
    CHECK(coeff_map(poly) == std::map<int, uint64_t>{{2, 1}, {4, 1}});
    CHECK(effective_depth_general(poly) == Rational(3, 1));
}

TEST_CASE("three residual blocks: {2:1, 4:3, 6:3, 8:1}, eight paths") {
    Graph g = testutil::residual_chain(3, 2);
    PathPolynomial poly = path_polynomial(g);
    CHECK(coeff_map(poly) ==
          std::map<int, uint64_t>{{2, 1}, {4, 3}, {6, 3}, {8, 1}});
    CHECK(poly.total_paths() == 8);
    CHECK(effective_depth_general(poly) == Rational(5, 1));

    // Brute force agrees.
    std::vector<int> oracle = enumerate_paths(g, DepthWeights{}, 4096);
    CHECK(oracle == std::vector<int>{2, 4, 4, 4, 6, 6, 6, 8});
    CHECK(oracle == expand(poly));
}

TEST_CASE("effective depth general examples") {
    CHECK(effective_depth_general(PathPolynomial::from_coeffs({{2, 1}, {4, 1}})) ==
          Rational(3, 1));
    CHECK(effective_depth_general(
              PathPolynomial::from_coeffs({{2, 1}, {4, 3}, {6, 3}, {8, 1}})) ==
          Rational(5, 1));
    CHECK(effective_depth_general(PathPolynomial::from_coeffs({{16, 1}})) ==
          Rational(16, 1));
    // Non-integer mean stays exact.
    CHECK(effective_depth_general(PathPolynomial::from_coeffs({{1, 1}, {2, 2}})) ==
          Rational(5, 3));
}

TEST_CASE("polynomial invariants") {
    PathPolynomial poly = PathPolynomial::from_coeffs({{3, 2}, {7, 5}});
    CHECK(poly.total_paths() == 7);
    CHECK(poly.l_min() == 3);
    CHECK(poly.l_max() == 7);
    CHECK(poly.coeff(5) == 0);
    CHECK_THROWS_AS(PathPolynomial::from_coeffs({}), AnalysisError);
}

TEST_CASE("enumerate_paths on a chain of four convs") {
    CHECK(enumerate_paths(conv_chain(4), DepthWeights{}, 16) == std::vector<int>{4});
}

TEST_CASE("resnet50 explodes past a 4096-path cap") {
    Graph g = build_resnet(50, kImageNetShape, 1000, ShortcutPolicy::Projection);
    CHECK_THROWS_WITH_AS(enumerate_paths(g, DepthWeights{}, 4096),
                         "path explosion: > 4096 paths", AnalysisError);
}

TEST_CASE("coefficient overflow is an error, never a wraparound") {
    // 64 identity blocks give 2^64 paths, one past the 64-bit total.
    Graph g = testutil::residual_chain(64, 2);
    CHECK_THROWS_AS(path_polynomial(g), AnalysisError);
    // The float fallback still produces sane statistics.
    ApproxPathStats stats = path_polynomial_approx(g);
    CHECK(stats.l_min == 2);
    CHECK(stats.l_max == 2 + 64 * 2);
    CHECK(stats.total_paths == doctest::Approx(18446744073709551616.0L));
    CHECK(stats.mean_length == doctest::Approx((2.0 + 130.0) / 2));
}

TEST_CASE("nominal depth conventions") {
    CHECK(nominal_depth(build_vgg(19, kImageNetShape, 1000),
                        DepthConvention::LayerCount) == 19);
    Graph googlenet = build_googlenet(kImageNetShape, 1000);
    CHECK(nominal_depth(googlenet, DepthConvention::LayerCount) == 22);
    CHECK(nominal_depth(googlenet, DepthConvention::ModuleBased) == 13);

    // No concat modules: module convention falls back with the flag set.
    ModuleDepth fallback = nominal_depth_module(build_vgg(16, kImageNetShape, 1000));
    CHECK(fallback.value == 16);
    CHECK(fallback.fallback);
}

TEST_CASE("fc layers can be excluded from depth") {
    Graph g = build_vgg(16, kImageNetShape, 1000);
    CHECK(nominal_depth_layer(g, DepthWeights{false}) == 13);
    PathPolynomial poly = path_polynomial(g, DepthWeights{false});
    CHECK(poly.l_max() == 13);
}

TEST_CASE("family estimates") {
    SUBCASE("vgg: single path, nominal depth") {
        Graph g = build_vgg(16, kImageNetShape, 1000);
        PathPolynomial poly = path_polynomial(g);
        FamilyEstimate fam = effective_depth_family(
            g, DepthWeights{}, poly.l_min(), poly.l_max(),
            effective_depth_general(poly).value());
        CHECK(fam.family == Family::Vgg);
        CHECK(fam.value == 16.0);
    }
    SUBCASE("resnet18 identity: (2 + 18) / 2 = 10") {
        Graph g = build_resnet(18, kImageNetShape, 1000, ShortcutPolicy::IdentityPad);
        PathPolynomial poly = path_polynomial(g);
        CHECK(poly.l_min() == 2);
        CHECK(poly.l_max() == 18);
        FamilyEstimate fam = effective_depth_family(
            g, DepthWeights{}, poly.l_min(), poly.l_max(),
            effective_depth_general(poly).value());
        CHECK(fam.family == Family::ResNet);
        CHECK(fam.value == 10.0);
    }
    SUBCASE("googlenet: 9 * 1.5 + 3 + 1 = 17.5") {
        Graph g = build_googlenet(kImageNetShape, 1000);
        PathPolynomial poly = path_polynomial(g);
        FamilyEstimate fam = effective_depth_family(
            g, DepthWeights{}, poly.l_min(), poly.l_max(),
            effective_depth_general(poly).value());
        CHECK(fam.family == Family::GoogLeNet);
        CHECK(fam.value == 17.5);
    }
    SUBCASE("mixed add and concat modules is ambiguous") {
        // A residual block followed by a two-branch concat module.
        testutil::GraphSketch s;
        s.nodes.push_back(make_input());
        s.channels = 4;
        s.tail = s.add(make_conv("c_stem", 3, 1, 1, 4), {"input"});
        std::string body = s.add(make_conv("blk_c1", 3, 1, 1, 4), {s.tail});
        s.tail = s.add(make_add("blk_add"), {body, s.tail});
        std::string b1 = s.add(make_conv("m_b1", 1, 1, 0, 2), {s.tail});
        std::string b2 = s.add(make_conv("m_b2", 1, 1, 0, 3), {s.tail});
        s.tail = s.add(make_concat("m_cat"), {b1, b2});
        s.add(make_output(), {s.tail});
        Graph g("mixed", Shape::spatial(3, 16, 16), std::move(s.nodes), std::move(s.edges));
        REQUIRE(validate(g).ok);
        PathPolynomial poly = path_polynomial(g);
        double mean = effective_depth_general(poly).value();
        FamilyEstimate fam =
            effective_depth_family(g, DepthWeights{}, poly.l_min(), poly.l_max(), mean);
        CHECK(fam.family == Family::Ambiguous);
        CHECK(fam.value == doctest::Approx(mean));
    }
}

TEST_CASE("longest path equals the enumeration maximum (small graphs)") {
    for (uint64_t seed = 0; seed < 40; ++seed) {
        Graph g = testutil::random_graph(seed);
        std::vector<int> lengths = enumerate_paths(g, DepthWeights{}, 4096);
        CHECK_MESSAGE(nominal_depth_layer(g) == static_cast<uint64_t>(lengths.back()),
                      "seed ", seed);
    }
}

TEST_CASE("oracle equivalence on randomized graphs") {
    for (uint64_t seed = 100; seed < 160; ++seed) {
        Graph g = testutil::random_graph(seed);
        PathPolynomial poly = path_polynomial(g);
        REQUIRE(poly.total_paths() <= 4096);
        std::vector<int> oracle = enumerate_paths(g, DepthWeights{}, 4096);
        CHECK_MESSAGE(oracle == expand(poly), "seed ", seed);
        // Means agree exactly: same multiset.
        Rational mean = effective_depth_general(poly);
        u128 sum = 0;
        for (int l : oracle) sum += static_cast<u128>(l);
        CHECK(mean == Rational(sum, oracle.size()));
    }
}

TEST_CASE("homogeneous identity residual chains hit the midpoint formula exactly") {
    for (int blocks = 1; blocks <= 8; ++blocks) {
        for (int body = 1; body <= 3; ++body) {
            Graph g = testutil::residual_chain(blocks, body);
            PathPolynomial poly = path_polynomial(g);
            Rational mean = effective_depth_general(poly);
            // (l_min + l_max) / 2, exactly (binomial symmetry).
            CHECK(mean == Rational(static_cast<u128>(poly.l_min()) + poly.l_max(), 2));
        }
    }
}

TEST_CASE("module chains: general mean equals the family formula") {
    for (uint64_t seed = 0; seed < 40; ++seed) {
        Graph g = testutil::random_module_chain(seed);
        PathPolynomial poly = path_polynomial(g);
        Rational mean = effective_depth_general(poly);
        FamilyEstimate fam = effective_depth_family(g, DepthWeights{}, poly.l_min(),
                                                    poly.l_max(), mean.value());
        REQUIRE_MESSAGE(fam.family == Family::GoogLeNet, "seed ", seed);
        CHECK_MESSAGE(std::abs(fam.value - mean.value()) < 1e-9, "seed ", seed);
    }
}

TEST_CASE("adding a conv in series shifts the polynomial by one") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Graph g = testutil::random_graph(seed);
        PathPolynomial before = path_polynomial(g);

        // Rebuild with an extra weighted layer spliced in before the output
        // node (an fc when the head is already flat, a 1x1 conv otherwise).
        std::vector<Node> nodes = g.nodes();
        std::vector<std::pair<std::string, std::string>> edges;
        bool flat_head = false;
        for (auto [u, v] : g.edges()) {
            std::string from = g.node(u).id;
            std::string to = g.node(v).id;
            if (to == "output") {
                flat_head = g.node(u).type == OpType::Fc;
                to = "zz_extra";
            }
            edges.emplace_back(from, to);
        }
        nodes.push_back(flat_head ? make_fc("zz_extra", 7) : make_conv("zz_extra", 1, 1, 0, 7));
        edges.emplace_back("zz_extra", "output");
        Graph extended("ext", g.input_shape(), std::move(nodes), std::move(edges));
        REQUIRE(validate(extended).ok);

        PathPolynomial after = path_polynomial(extended);
        CHECK(after.l_min() == before.l_min() + 1);
        CHECK(after.l_max() == before.l_max() + 1);
        CHECK(after.total_paths() == before.total_paths());
        for (int l = before.l_min(); l <= before.l_max(); ++l) {
            CHECK(after.coeff(l + 1) == before.coeff(l));
        }
        Rational m0 = effective_depth_general(before);
        Rational m1 = effective_depth_general(after);
        CHECK(m1 == Rational(m0.num() + m0.den(), m0.den()));
    }
}

TEST_CASE("merge-free graphs: general mean equals nominal depth") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
        Graph g = testutil::random_chain(seed);
        PathPolynomial poly = path_polynomial(g);
        CHECK(poly.total_paths() == 1);
        CHECK(effective_depth_general(poly) ==
              Rational(nominal_depth_layer(g), 1));
    }
}

TEST_CASE("bounds: support edges match the longest-path query") {
    for (uint64_t seed = 200; seed < 230; ++seed) {
        Graph g = testutil::random_graph(seed);
        PathPolynomial poly = path_polynomial(g);
        CHECK(static_cast<uint64_t>(poly.l_max()) == nominal_depth_layer(g));
    }
}

}  // TEST_SUITE
