#include "cbc/refine/script.hpp"

#include <fstream>
#include <sstream>

#include "cbc/block/block.hpp"
#include "cbc/kernel/parser.hpp"
#include "detail.hpp"

namespace cbc {

namespace {

class ScriptReader {
 public:
  ScriptReader(std::string_view src, std::string file) : p_(src, file) { out_.file = std::move(file); }

  Script run() {
    while (!p_.at_end()) {
      const Token start = p_.peek();
      try {
        if (p_.accept("extern")) {
          p_.expect("method");
          MethodSig sig = header();
          declare(sig, start);
          out_.externs[sig.name] = sig;
          callable_[sig.name] = sig;
        } else if (p_.accept("method")) {
          MethodSig sig = header();
          declare(sig, start);
          MethodUnit u = make_unit(sig.name, sig.params, sig.ret, sig.contract);
          u.callees = callable_;
          callable_[sig.name] = sig;
          out_.methods.push_back(std::move(u));
        } else if (p_.accept("refine")) {
          MethodUnit& u = current(start);
          const std::string node = p_.ident();
          u = rule(u, node);
          p_.expect(";");
        } else if (p_.accept("block")) {
          MethodUnit& u = current(start);
          u = instantiation(u);
        } else {
          p_.fail("expected extern, method, refine or block");
        }
      } catch (const RefineError& e) {
        p_.fail_at(start, e.what());
      } catch (const ContractError& e) {
        p_.fail_at(start, e.what());
      }
    }
    return std::move(out_);
  }

 private:
  MethodSig header() {
    MethodSig sig;
    sig.name = p_.ident();
    p_.expect("(");
    if (!p_.at(")")) {
      do {
        const Type t = p_.type();
        sig.params.push_back({p_.ident(), t});
      } while (p_.accept(","));
    }
    p_.expect(")");
    sig.ret = p_.accept("returns") ? p_.type() : Type::unit();
    p_.expect("requires");
    Predicate pre = p_.predicate();
    p_.expect("ensures");
    Predicate post = p_.predicate();
    p_.expect(";");
    sig.contract = make_contract(pre, post);
    return sig;
  }

  void declare(const MethodSig& sig, const Token& at) {
    if (callable_.count(sig.name)) p_.fail_at(at, "method " + sig.name + " is declared twice");
  }

  MethodUnit& current(const Token& at) {
    if (out_.methods.empty()) p_.fail_at(at, "no method to refine");
    return out_.methods.back();
  }

  Predicate labelled(const char* label) {
    p_.expect(label);
    p_.expect(":");
    return detail::ground_result(p_.predicate());
  }

  Expr labelled_expr(const char* label) {
    p_.expect(label);
    p_.expect(":");
    return p_.expr();
  }

  MethodUnit rule(const MethodUnit& u, const std::string& node) {
    if (p_.accept("skip")) return apply_skip(u, node);
    if (p_.accept("assign")) {
      std::optional<Type> declare;
      if (p_.peek().kind == Token::Kind::Ident && p_.peek(1).kind == Token::Kind::Ident &&
          p_.at(":=", 2)) {
        declare = p_.type();
      }
      const std::string target = p_.ident();
      p_.expect(":=");
      return apply_assignment(u, node, target, p_.expr(), declare);
    }
    if (p_.accept("return")) return apply_assignment(u, node, "result", p_.expr());
    if (p_.accept("composition")) return apply_composition(u, node, labelled("mid"));
    if (p_.accept("selection")) {
      p_.expect("guards");
      p_.expect(":");
      std::vector<Expr> guards{p_.expr()};
      while (p_.at("[") && p_.at("]", 1)) {
        p_.expect("[");
        p_.expect("]");
        guards.push_back(p_.expr());
      }
      return apply_selection(u, node, guards);
    }
    if (p_.accept("repetition")) {
      const Predicate inv = labelled("invariant");
      const Expr variant = labelled_expr("variant");
      const Expr guard = labelled_expr("guard");
      return apply_repetition(u, node, inv, variant, guard);
    }
    if (p_.accept("weaken")) return apply_weaken_pre(u, node, labelled("pre"));
    if (p_.accept("strengthen")) return apply_strengthen_post(u, node, labelled("post"));
    if (p_.accept("call")) {
      const std::string target = p_.ident();
      p_.expect(":=");
      const std::string callee = p_.ident();
      p_.expect("(");
      std::vector<Expr> args;
      if (!p_.at(")")) {
        do {
          args.push_back(p_.expr());
        } while (p_.accept(","));
      }
      p_.expect(")");
      return apply_method_call(u, node, callee, args, target);
    }
    if (p_.accept("block")) {
      const std::string name = p_.ident();
      p_.expect("requires");
      const Predicate pre = p_.predicate();
      p_.expect("ensures");
      const Predicate post = p_.predicate();
      std::vector<std::string> acc;
      std::vector<std::string> asg;
      if (p_.accept("accessible")) acc = p_.ident_list();
      if (p_.accept("assignable")) asg = p_.ident_list();
      return introduce_block(u, node, name, pre, post, acc, asg);
    }
    p_.fail("unknown refinement rule '" + p_.peek().text + "'");
  }

  MethodUnit instantiation(const MethodUnit& u) {
    const std::string name = p_.ident();
    const BlockDecl* b = u.block(name);
    if (!b) throw RefineError("no block " + name + " in method " + u.name);
    if (p_.accept("requires")) {
      const Predicate pre = detail::ground_result(p_.predicate());
      p_.expect("ensures");
      const Predicate post = detail::ground_result(p_.predicate());
      if (!(pre == b->contract.pre) || !(post == b->contract.post)) {
        throw RefineError("contract of block " + name + " differs from its introduction");
      }
    }
    p_.expect("is");
    p_.expect("{");
    p_.frames.clear();
    Statement body = p_.statements();
    p_.expect("}");
    return instantiate_block(u, name, body, p_.frames);
  }

  Parser p_;
  Script out_;
  MethodTable callable_;
};

}  // namespace

Script parse_script(std::string_view src, const std::string& file) {
  return ScriptReader(src, file).run();
}

Script load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, 0, "cannot read file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_script(ss.str(), path);
}

}  // namespace cbc
