#pragma once

// The .cbc refinement-script format:
//
//   extern method inc(int p) returns int requires p >= 0 ensures result == old(p) + 1;
//   method m(List list) returns int requires P ensures Q;
//   refine A0 composition mid: P;
//   refine A1 assign int i := list.get(0);
//   refine A3 block B1 requires P ensures Q accessible list assignable i, j;
//   block B1 is { while (g) invariant I decreases V { ... } }
//
// Refinements and block instantiations apply to the most recent method.
// Each method may call the externs and the methods declared before it.

#include <string>
#include <string_view>
#include <vector>

#include "cbc/refine/tree.hpp"

namespace cbc {

struct Script {
  std::string file;
  MethodTable externs;
  std::vector<MethodUnit> methods;
};

/// Throws ParseError, with the position of the offending step for rule
/// applications that are rejected.
Script parse_script(std::string_view src, const std::string& file = "");
Script load_script(const std::string& path);

}  // namespace cbc
