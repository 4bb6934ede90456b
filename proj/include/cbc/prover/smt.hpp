#pragma once

#include <string>

#include "cbc/prover/obligation.hpp"

namespace cbc {

struct SmtOptions {
  /// Confine free variables and all-int quantifiers to the prover bounds,
  /// so the solver decides exactly the bounded question.
  bool bounded = false;
  ProverConfig bounds;
};

/// SMT-LIB2 script asserting hypothesis && !conclusion; unsat means valid.
/// Lists are an uninterpreted sort with len/at/tl and their axioms.
/// Output is a deterministic function of the obligation and options.
std::string emit_smt(const Obligation& ob, const SmtOptions& opt = {});

/// 64-bit FNV-1a digest, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace cbc
