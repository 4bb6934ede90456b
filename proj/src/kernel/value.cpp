#include "cbc/kernel/value.hpp"

namespace cbc {

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Type::Kind::Int: return std::to_string(v.i);
    case Type::Kind::Bool: return v.b ? "true" : "false";
    case Type::Kind::Seq: {
      std::string out = "[";
      for (std::size_t k = 0; k < v.seq.size(); ++k) {
        if (k) out += ", ";
        out += std::to_string(v.seq[k]);
      }
      return out + "]";
    }
    case Type::Kind::Object: {
      std::string out = "new " + v.cls + "(";
      for (std::size_t k = 0; k < v.fields.size(); ++k) {
        if (k) out += ", ";
        out += to_string(v.fields[k]);
      }
      return out + ")";
    }
    case Type::Kind::Unit: return "()";
  }
  return "?";
}

Expr to_expr(const Value& v) {
  switch (v.kind) {
    case Type::Kind::Int: return int_lit(v.i);
    case Type::Kind::Bool: return bool_lit(v.b);
    case Type::Kind::Seq: {
      std::vector<Expr> elems;
      for (auto x : v.seq) elems.push_back(int_lit(x));
      return seq_lit(std::move(elems));
    }
    case Type::Kind::Object: {
      std::vector<Expr> args;
      for (const auto& f : v.fields) args.push_back(to_expr(f));
      return new_(v.cls, std::move(args));
    }
    case Type::Kind::Unit: break;
  }
  return bool_lit(true);
}

}  // namespace cbc
