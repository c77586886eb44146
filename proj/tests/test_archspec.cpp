#include <string>

#include "doctest.h"
#include "netdepth/archspec.hpp"
#include "netdepth/builders.hpp"
#include "random_graphs.hpp"

using namespace netdepth;

namespace {

const char* kMinimalDoc =
    "network \"t\"\n"
    "input 3 32 32\n"
    "conv c1 k=3 s=1 p=1 out=8 from=input\n"
    "output from=c1\n";

template <typename E>
std::string error_message(const std::string& text) {
    try {
        parse_archspec(text);
    } catch (const E& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("archspec") {

TEST_CASE("minimal document parses to the three declared nodes") {
    Graph g = parse_archspec(kMinimalDoc);
    CHECK(g.name() == "t");
    CHECK(g.node_count() == 3);  // input, c1, output
    CHECK(g.input_shape() == Shape::spatial(3, 32, 32));
    int c1 = g.index_of("c1");
    REQUIRE(c1 >= 0);
    CHECK(g.node(c1).type == OpType::Conv);
    CHECK(g.node(c1).out_channels == 8);
    CHECK(g.node(c1).bias);  // default
}

TEST_CASE("dangling reference reports the line") {
    std::string doc =
        "network \"t\"\n"
        "input 3 32 32\n"
        "conv c1 k=3 s=1 p=1 out=8 from=cX\n"
        "output from=c1\n";
    std::string msg = error_message<ParseError>(doc);
    CHECK(msg.find("dangling reference 'cX'") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("duplicate input declaration is rejected") {
    std::string doc =
        "network \"t\"\n"
        "input 3 32 32\n"
        "input 3 32 32\n"
        "conv c1 k=3 out=8 from=input\n"
        "output from=c1\n";
    CHECK(error_message<ParseError>(doc).find("duplicate input") != std::string::npos);
}

TEST_CASE("lexical and structural parse errors") {
    CHECK(error_message<ParseError>("network \"t\"\ninput 3 32 32\nblorp b from=input\n")
              .find("unknown node kind") != std::string::npos);
    CHECK(error_message<ParseError>(
              "network \"t\"\ninput 3 32 32\nconv c k=x out=8 from=input\n")
              .find("invalid kernel") != std::string::npos);
    CHECK(error_message<ParseError>(
              "network \"t\"\ninput 3 32 32\nconv c k=3 out=8 from=input\n"
              "conv c k=3 out=8 from=c\n")
              .find("duplicate node id 'c'") != std::string::npos);
    CHECK(error_message<ParseError>(
              "network \"t\"\ninput 3 32 32\nconv input k=3 out=8 from=input\n")
              .find("reserved node id") != std::string::npos);
    CHECK(error_message<ParseError>(
              "network \"t\"\ninput 3 32 32\ngap g k=3 from=input\n")
              .find("unexpected key 'k' for gap") != std::string::npos);
    CHECK(error_message<ParseError>("input 3 32 32\noutput from=input\n")
              .find("missing network declaration") != std::string::npos);
}

TEST_CASE("invariant-breaking documents fail validation with a location") {
    // Comment and blank lines shift the conv declaration to line 5.
    std::string doc =
        "# a comment\n"
        "network \"t\"\n"
        "input 3 4 4\n"
        "\n"
        "conv c1 k=7 s=2 p=0 out=8 from=input\n"
        "output from=c1\n";
    std::string msg = error_message<ValidationError>(doc);
    CHECK(msg.find("shape underflow at node c1") != std::string::npos);
    CHECK(msg.find("line 5") != std::string::npos);

    std::string no_output =
        "network \"t\"\n"
        "input 3 32 32\n"
        "conv c1 k=3 out=8 from=input\n";
    CHECK(error_message<ValidationError>(no_output).find("exactly one output") !=
          std::string::npos);
}

TEST_CASE("serialize emits the canonical form") {
    Graph g = parse_archspec(kMinimalDoc);
    std::string text = serialize_archspec(g);
    CHECK(text ==
          "# archspec v1\n"
          "network \"t\"\n"
          "input 3 32 32\n"
          "conv c1 k=3 s=1 p=1 out=8 bias=true from=input\n"
          "output from=c1\n");
}

TEST_CASE("serialize is idempotent byte for byte") {
    for (const std::string& name : builtin_names()) {
        Graph g = build_builtin(name, Shape::spatial(3, 224, 224), 1000,
                                ShortcutPolicy::Projection);
        std::string once = serialize_archspec(g);
        std::string twice = serialize_archspec(parse_archspec(once));
        CHECK_MESSAGE(once == twice, name);
    }
}

TEST_CASE("diamond serializes the merge after both predecessors") {
    Graph g("d", Shape::spatial(8, 16, 16),
            {make_input(), make_conv("a", 3, 1, 1, 8), make_conv("b", 3, 1, 1, 8),
             make_add("m"), make_output()},
            {{"input", "a"}, {"input", "b"}, {"a", "m"}, {"b", "m"}, {"m", "output"}});
    std::string text = serialize_archspec(g);
    size_t pos_a = text.find("\nconv a ");
    size_t pos_b = text.find("\nconv b ");
    size_t pos_m = text.find("\nadd m ");
    REQUIRE(pos_a != std::string::npos);
    REQUIRE(pos_b != std::string::npos);
    REQUIRE(pos_m != std::string::npos);
    CHECK(pos_m > pos_a);
    CHECK(pos_m > pos_b);
    CHECK(text.find("add m from=a,b\n") != std::string::npos);
}

TEST_CASE("round trip is isomorphic on builders") {
    for (const std::string& name : builtin_names()) {
        for (ShortcutPolicy policy :
             {ShortcutPolicy::Projection, ShortcutPolicy::IdentityPad}) {
            Graph g = build_builtin(name, Shape::spatial(3, 224, 224), 1000, policy);
            Graph back = parse_archspec(serialize_archspec(g));
            CHECK_MESSAGE(back == g, name);
        }
    }
}

TEST_CASE("round trip is isomorphic on randomized graphs") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        Graph g = testutil::random_graph(seed);
        Graph back = parse_archspec(serialize_archspec(g));
        CHECK_MESSAGE(back == g, "seed ", seed);
    }
}

TEST_CASE("rectangular kernels round trip") {
    std::string doc =
        "network \"t\"\n"
        "input 3 32 32\n"
        "conv c1 k=3x5 s=1 p=2 out=8 from=input\n"
        "output from=c1\n";
    Graph g = parse_archspec(doc);
    int c1 = g.index_of("c1");
    CHECK(g.node(c1).kernel_h == 3);
    CHECK(g.node(c1).kernel_w == 5);
    CHECK(serialize_archspec(g).find("k=3x5") != std::string::npos);
}

}  // TEST_SUITE
