#include "qlf/oracle.h"

#include <algorithm>
#include <set>

namespace qlf {

namespace {

GqPtr node(GqFormula f) { return std::make_shared<const GqFormula>(std::move(f)); }

struct Env {
  std::map<std::string, GqTerm> vars;
  std::map<Index, GqTerm> indices;
};

const Term* find_term(const Expr& e, const Index& index) {
  if (const auto* t = e.as<Term>()) {
    if (t->index == index) return t;
    if (const Term* r = find_term(t->restriction, index)) return r;
    return find_term(t->context, index);
  }
  if (const auto* s = e.as<Scoped>()) return find_term(s->body, index);
  if (const auto* l = e.as<Lam>()) return find_term(l->body, index);
  if (const auto* a = e.as<App>()) {
    for (const Expr& x : a->args) {
      if (const Term* r = find_term(x, index)) return r;
    }
  }
  return nullptr;
}

class Translator {
 public:
  GqPtr formula(const Expr& e, const Env& env) {
    if (const auto* s = e.as<Scoped>()) {
      if (s->scope.metavar) throw OracleError("scope meta-variable");
      return quantify(s->scope.indices, 0, s->body, env);
    }
    const auto* a = e.as<App>();
    if (!a) throw OracleError("not a formula");
    const auto* f = a->functor.as<Const>();
    if (!f) throw OracleError("non-constant functor");
    if (f->name == "and" || f->name == "or") {
      GqFormula g;
      g.kind = f->name == "and" ? GqFormula::Kind::kAnd : GqFormula::Kind::kOr;
      for (const Expr& x : a->args) g.parts.push_back(formula(x, env));
      return node(std::move(g));
    }
    if (f->name == "not") {
      if (a->args.size() != 1) throw OracleError("not/1");
      return node({GqFormula::Kind::kNot, {}, {}, {formula(a->args[0], env)}});
    }
    GqFormula g;
    g.kind = f->name == "eq" ? GqFormula::Kind::kEq : GqFormula::Kind::kPred;
    g.name = f->name;
    if (g.kind == GqFormula::Kind::kEq && a->args.size() != 2) {
      throw OracleError("eq/2");
    }
    for (const Expr& x : a->args) g.args.push_back(argument(x, env));
    return node(std::move(g));
  }

 private:
  GqPtr quantify(const std::vector<Index>& list, std::size_t k,
                 const Expr& body, const Env& env) {
    if (k == list.size()) return formula(body, env);
    const Term* t = find_term(body, list[k]);
    if (!t) throw OracleError("no term #" + list[k].name);
    std::string x = "v" + std::to_string(++fresh_);
    Env inner = env;
    inner.indices[t->index] = {GqTerm::Kind::kVar, x};
    GqPtr restriction = node({GqFormula::Kind::kAnd,
                              {},
                              {},
                              {property(t->restriction, x, inner),
                               property(t->context, x, inner)}});
    GqPtr scope = quantify(list, k + 1, body, inner);
    return node({t->quant == Quant::kExists ? GqFormula::Kind::kSome
                                            : GqFormula::Kind::kEvery,
                 x,
                 {},
                 {restriction, scope}});
  }

  GqPtr property(const Expr& p, const std::string& x, const Env& env) {
    const auto* l = p.as<Lam>();
    if (!l) throw OracleError("property is not a lambda");
    Env inner = env;
    inner.vars[l->var] = {GqTerm::Kind::kVar, x};
    return formula(l->body, inner);
  }

  GqTerm argument(const Expr& e, const Env& env) {
    if (const auto* c = e.as<Const>()) return {GqTerm::Kind::kConst, c->name};
    if (const auto* s = e.as<StrLit>()) return {GqTerm::Kind::kLiteral, s->text};
    if (const auto* v = e.as<Var>()) {
      auto it = env.vars.find(v->name);
      if (it == env.vars.end()) throw OracleError("free $" + v->name);
      return it->second;
    }
    if (auto i = index_of(e)) {
      auto it = env.indices.find(*i);
      if (it == env.indices.end()) throw OracleError("undischarged #" + i->name);
      return it->second;
    }
    throw OracleError("unsupported argument");
  }

  int fresh_ = 0;
};

using Binding = std::map<std::string, Atom>;

Atom denote(const GqTerm& t, const ModelSpec& m, const Binding& g) {
  switch (t.kind) {
    case GqTerm::Kind::kVar:
      return g.at(t.name);
    case GqTerm::Kind::kLiteral:
      return {t.name, true};
    case GqTerm::Kind::kConst:
      if (auto it = m.constants.find(t.name); it != m.constants.end()) {
        return {it->second, false};
      }
      return {t.name, false};
  }
  return {};
}

bool holds(const GqPtr& f, const ModelSpec& m, const Binding& g) {
  switch (f->kind) {
    case GqFormula::Kind::kPred: {
      Tuple tuple;
      for (const GqTerm& t : f->args) tuple.push_back(denote(t, m, g));
      return m.holds(f->name, tuple);
    }
    case GqFormula::Kind::kEq:
      return denote(f->args[0], m, g) == denote(f->args[1], m, g);
    case GqFormula::Kind::kAnd:
      return std::all_of(f->parts.begin(), f->parts.end(),
                         [&](const GqPtr& p) { return holds(p, m, g); });
    case GqFormula::Kind::kOr:
      return std::any_of(f->parts.begin(), f->parts.end(),
                         [&](const GqPtr& p) { return holds(p, m, g); });
    case GqFormula::Kind::kNot:
      return !holds(f->parts[0], m, g);
    case GqFormula::Kind::kSome:
    case GqFormula::Kind::kEvery: {
      std::set<std::string> r;
      std::set<std::string> s;
      for (const std::string& d : m.domain) {
        Binding gd = g;
        gd[f->name] = {d, false};
        if (holds(f->parts[0], m, gd)) r.insert(d);
        if (holds(f->parts[1], m, gd)) s.insert(d);
      }
      if (f->kind == GqFormula::Kind::kEvery) {
        return std::includes(s.begin(), s.end(), r.begin(), r.end());
      }
      return std::any_of(r.begin(), r.end(),
                         [&](const std::string& d) { return s.contains(d); });
    }
  }
  return false;
}

std::string print_term(const GqTerm& t) {
  if (t.kind == GqTerm::Kind::kLiteral) return "\"" + t.name + "\"";
  return t.name;
}

}  // namespace

GqPtr translate_to_gq(const Expr& qlf) { return Translator().formula(qlf, {}); }

bool oracle_evaluate(const GqPtr& f, const ModelSpec& m) {
  return holds(f, m, {});
}

std::string print_gq(const GqPtr& f) {
  std::string out;
  switch (f->kind) {
    case GqFormula::Kind::kPred:
    case GqFormula::Kind::kEq:
      out = f->kind == GqFormula::Kind::kEq ? "=" : f->name;
      out += "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) out += ",";
        out += print_term(f->args[i]);
      }
      return out + ")";
    case GqFormula::Kind::kAnd:
    case GqFormula::Kind::kOr:
      out = f->kind == GqFormula::Kind::kAnd ? "and(" : "or(";
      for (std::size_t i = 0; i < f->parts.size(); ++i) {
        if (i) out += ",";
        out += print_gq(f->parts[i]);
      }
      return out + ")";
    case GqFormula::Kind::kNot:
      return "not(" + print_gq(f->parts[0]) + ")";
    case GqFormula::Kind::kSome:
    case GqFormula::Kind::kEvery:
      return std::string(f->kind == GqFormula::Kind::kSome ? "some" : "every") +
             "(" + f->name + ", " + print_gq(f->parts[0]) + ", " +
             print_gq(f->parts[1]) + ")";
  }
  return out;
}

}  // namespace qlf
