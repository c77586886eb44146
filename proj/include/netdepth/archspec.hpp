#pragma once

#include <string>

#include "netdepth/graph.hpp"

namespace netdepth {

// Text format for describing computation graphs. Line oriented, one node
// declaration per line, `#` starts a comment:
//
//   # archspec v1
//   network "toy"
//   input 3 32 32
//   conv c1 k=3 s=1 p=1 out=8 bias=true from=input
//   gap g1 from=c1
//   fc f1 out=10 bias=true from=g1
//   output from=f1
//
// Kinds: conv fc maxpool avgpool gap add concat output. Defaults: s=1 p=0
// bias=true; `k=3` means a square kernel, `k=3x5` a 3(h) by 5(w) one.
// The `input`/`output` declarations create the nodes with those reserved ids.
// References must point at already-declared ids.

// Parses a document into a validated Graph. Throws ParseError (with line and
// column) for lexical or reference problems and ValidationError (prefixed with
// the declaration line of the offending node) when the graph breaks an
// invariant.
Graph parse_archspec(const std::string& text);

// Canonical form: `# archspec v1` header, nodes in deterministic topological
// order, keys in k,s,p,out,bias order, predecessor lists sorted, LF endings.
// serialize(parse(serialize(g))) == serialize(g) byte for byte.
std::string serialize_archspec(const Graph& g);

}  // namespace netdepth
