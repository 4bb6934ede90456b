#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbc/kernel/ast.hpp"

namespace cbc {

/// Runtime value of the bounded semantics: an integer, a boolean, an
/// immutable integer sequence or an object `new C(fields)`.
struct Value {
  Type::Kind kind = Type::Kind::Int;
  std::int64_t i = 0;
  bool b = false;
  std::vector<std::int64_t> seq;
  std::string cls;
  std::vector<Value> fields;

  static Value integer(std::int64_t v) {
    Value x;
    x.i = v;
    return x;
  }
  static Value boolean(bool v) {
    Value x;
    x.kind = Type::Kind::Bool;
    x.b = v;
    return x;
  }
  static Value sequence(std::vector<std::int64_t> v) {
    Value x;
    x.kind = Type::Kind::Seq;
    x.seq = std::move(v);
    return x;
  }
  static Value object(std::string c, std::vector<Value> fs) {
    Value x;
    x.kind = Type::Kind::Object;
    x.cls = std::move(c);
    x.fields = std::move(fs);
    return x;
  }

  bool operator==(const Value& o) const = default;
};

std::string to_string(const Value& v);
/// The value as a literal expression (sequences as list literals).
Expr to_expr(const Value& v);

}  // namespace cbc
