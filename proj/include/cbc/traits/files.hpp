#pragma once

// Concrete syntax of .trait and .tc files.
//
//   trait MaxETrait3 {
//     @Pre: list.size() > 0
//     @Post: result == list.element()
//     Num accessHead(List list) = list.element()
//   }
//   interface Shape { ... }            class Point implements Shape { ... }
//
//   class MaxE = MaxETrait1 + MaxETrait2 + MaxETrait3 + MaxETrait4
//   Partial = (T1 + T2)[makeAbstract m]

#include <string>
#include <string_view>
#include <vector>

#include "cbc/traits/calculus.hpp"

namespace cbc::traits {

/// Body literals; throws ParseError.
std::vector<Decl> parse_trait_file(std::string_view src, const std::string& file = "");
/// Composition declarations; throws ParseError.
std::vector<Decl> parse_tc_file(std::string_view src, const std::string& file = "");

TraitTable load_table(const std::vector<std::string>& trait_files,
                      const std::vector<std::string>& tc_files);

std::string print(const Method& m);
std::string print(const FlatDecl& d);
std::string type_name(const Type& t);

}  // namespace cbc::traits
