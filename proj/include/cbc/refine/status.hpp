#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbc/prover/obligation.hpp"

namespace cbc {

struct RefineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Status { Open, Proven, Failed };
const char* to_string(Status s);

/// An obligation and, once discharged, its result. The obligation's `vars`
/// are filled in by check_tree from the unit's declarations plus `extra`.
struct CheckedObligation {
  Obligation ob;
  std::vector<VarDecl> extra;
  std::optional<ProofResult> result;
};

}  // namespace cbc
