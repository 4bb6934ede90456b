#include "cbc/traits/files.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "cbc/kernel/parser.hpp"
#include "cbc/kernel/print.hpp"

namespace cbc::traits {

namespace {

std::string location(const std::string& file, const Token& t) {
  return (file.empty() ? std::string("<input>") : file) + ":" + std::to_string(t.line) + ":" + std::to_string(t.col);
}

class TraitReader {
 public:
  TraitReader(std::string_view src, std::string file) : p_(src, file), file_(std::move(file)) {
    p_.implicit_this = true;
  }

  std::vector<Decl> literals() {
    std::vector<Decl> out;
    while (!p_.at_end()) {
      const Token start = p_.peek();
      Decl d;
      Body b;
      if (p_.accept("interface")) {
        b.is_interface = true;
      } else if (p_.accept("class")) {
        d.is_class = true;
      } else if (!p_.accept("trait")) {
        p_.fail("expected trait, interface or class");
      }
      d.name = p_.ident();
      d.where = location(file_, start);
      if (p_.accept("implements")) b.interfaces = p_.ident_list();
      p_.expect("{");
      while (!p_.accept("}")) b.methods.push_back(method());
      d.expr = lit(std::move(b));
      out.push_back(std::move(d));
    }
    return out;
  }

  std::vector<Decl> compositions() {
    std::vector<Decl> out;
    while (!p_.at_end()) {
      const Token start = p_.peek();
      Decl d;
      if (p_.accept("class")) {
        d.is_class = true;
      } else {
        p_.accept("trait");
      }
      d.name = p_.ident();
      d.where = location(file_, start);
      p_.expect("=");
      d.expr = sum();
      p_.accept(";");
      out.push_back(std::move(d));
    }
    return out;
  }

 private:
  Method method() {
    Method m;
    Predicate pre;
    Predicate post;
    if (p_.accept("@Pre")) {
      p_.expect(":");
      pre = p_.predicate();
    }
    if (p_.accept("@Post")) {
      p_.expect(":");
      post = p_.predicate();
    }
    if (p_.accept("@Decreases")) {
      p_.expect(":");
      m.measure = p_.expr();
    }
    const Token at = p_.peek();
    try {
      m.spec = make_contract(pre, post);
    } catch (const ContractError& e) {
      p_.fail_at(at, e.what());
    }
    const bool declared_abstract = p_.accept("abstract");
    m.ret = p_.type();
    m.name = p_.ident();
    p_.expect("(");
    if (!p_.at(")")) {
      do {
        const Type t = p_.type();
        m.params.push_back({p_.ident(), t});
      } while (p_.accept(","));
    }
    p_.expect(")");
    if (p_.accept("=")) {
      if (declared_abstract) p_.fail_at(at, "abstract method " + m.name + " has a body");
      m.body = p_.expr();
      p_.accept(";");
    } else {
      p_.expect(";");
    }
    if (m.measure && !m.body) p_.fail_at(at, "abstract method " + m.name + " has a @Decreases measure");
    return m;
  }

  TraitExpr sum() {
    TraitExpr e = term();
    while (p_.accept("+")) e = plus(e, term());
    return e;
  }

  TraitExpr term() {
    TraitExpr e;
    if (p_.accept("(")) {
      e = sum();
      p_.expect(")");
    } else {
      e = ref(p_.ident());
    }
    while (p_.at("[")) {
      p_.expect("[");
      p_.expect("makeAbstract");
      e = make_abstract(e, p_.ident());
      p_.expect("]");
    }
    return e;
  }

  Parser p_;
  std::string file_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, 0, "cannot read file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string show(std::string s) {
  static const std::regex self(R"(\bthis\.(?=[A-Za-z_][A-Za-z0-9_']*\())");
  static const std::regex num(R"(\b(forall|exists) ([A-Za-z_][A-Za-z0-9_']*) in int:)");
  static const std::regex boolean(R"(\b(forall|exists) ([A-Za-z_][A-Za-z0-9_']*) in bool:)");
  s = std::regex_replace(s, self, "");
  s = std::regex_replace(s, num, "$1 Num $2:");
  return std::regex_replace(s, boolean, "$1 Bool $2:");
}

}  // namespace

std::vector<Decl> parse_trait_file(std::string_view src, const std::string& file) {
  return TraitReader(src, file).literals();
}

std::vector<Decl> parse_tc_file(std::string_view src, const std::string& file) {
  return TraitReader(src, file).compositions();
}

TraitTable load_table(const std::vector<std::string>& trait_files, const std::vector<std::string>& tc_files) {
  TraitTable t;
  for (const auto& f : trait_files) {
    for (auto& d : parse_trait_file(read_file(f), f)) t.decls.push_back(std::move(d));
  }
  for (const auto& f : tc_files) {
    for (auto& d : parse_tc_file(read_file(f), f)) t.decls.push_back(std::move(d));
  }
  return t;
}

std::string type_name(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int: return "Num";
    case Type::Kind::Bool: return "Bool";
    default: return to_string(t);
  }
}

std::string print(const Method& m) {
  std::ostringstream os;
  os << "@Pre: " << show(cbc::print(m.spec.pre)) << "\n";
  os << "@Post: " << show(cbc::print(m.spec.post)) << "\n";
  if (m.measure) os << "@Decreases: " << show(cbc::print(*m.measure)) << "\n";
  if (m.is_abstract()) os << "abstract ";
  os << type_name(m.ret) << " " << m.name << "(";
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    if (i) os << ", ";
    os << type_name(m.params[i].type) << " " << m.params[i].name;
  }
  os << ")";
  if (m.body) {
    os << " = " << show(cbc::print(*m.body)) << "\n";
  } else {
    os << ";\n";
  }
  return os.str();
}

std::string print(const FlatDecl& d) {
  std::ostringstream os;
  os << (d.is_class ? "class " : d.body.is_interface ? "interface " : "trait ") << d.name;
  if (!d.body.interfaces.empty()) {
    os << " implements ";
    for (std::size_t i = 0; i < d.body.interfaces.size(); ++i) os << (i ? ", " : "") << d.body.interfaces[i];
  }
  os << " {\n";
  for (std::size_t i = 0; i < d.body.methods.size(); ++i) {
    if (i) os << "\n";
    std::istringstream lines(print(d.body.methods[i]));
    for (std::string line; std::getline(lines, line);) os << "  " << line << "\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cbc::traits
