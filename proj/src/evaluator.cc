#include "qlf/evaluator.h"

#include <algorithm>

#include "qlf/scoping.h"
#include "qlf/text.h"

namespace qlf {

Assignment Assignment::bind(std::string var, Value v) const {
  Assignment out;
  out.head_ = std::make_shared<const Cell>(Cell{std::move(var), std::move(v), head_});
  return out;
}

const Value* Assignment::find(const std::string& var) const {
  for (const Cell* c = head_.get(); c; c = c->next.get()) {
    if (c->var == var) return &c->value;
  }
  return nullptr;
}

std::set<bool> Valuation::truths() const {
  std::set<bool> out;
  for (const Value& v : values) {
    if (const bool* b = v.truth()) out.insert(*b);
  }
  return out;
}

Expr newexpr(const Expr& old, const SubstitutionSet& subs) {
  const Expr* hit = lookup(subs, old);
  return hit ? *hit : old;
}

namespace {

class ModelEvaluator {
 public:
  ModelEvaluator(const ModelSpec& m, const Resolution& res)
      : model_(m), res_(res) {
    for (const std::string& d : m.domain) domain_.push_back(Atom{d, false});
  }

  Value eval(const Expr& e, const Assignment& g, const SubstitutionSet& subs) {
    Expr cur;
    try {
      cur = reinterpret(e, subs);  // reinterpretation
    } catch (const CyclicSubstitution& err) {
      throw Uninterpretable(Failure::kCyclic, err.what());
    }
    if (const auto* c = cur.as<Const>()) return {constant_value(c->name)};
    if (const auto* s = cur.as<StrLit>()) return {Atom{s->text, true}};
    if (const auto* v = cur.as<Var>()) {
      const Value* val = g.find(v->name);
      if (!val) throw Uninterpretable(Failure::kFreeVariable, "$" + v->name);
      return *val;
    }
    if (const auto* i = cur.as<IndexOcc>()) {
      throw Uninterpretable(Failure::kUndischargedIndex, "#" + i->index.name);
    }
    if (const auto* t = cur.as<Term>()) {
      // An undischarged term whose own material regresses is cyclic.
      Diagnosis d = check_interpretable(substituted(cur, subs), res_);
      if (d.verdict == Verdict::kCyclic) {
        throw Uninterpretable(Failure::kCyclic,
                              "#" + t->index.name + " recurs inside its own material");
      }
      throw Uninterpretable(Failure::kUndischargedTerm, "#" + t->index.name);
    }
    if (const auto* m = cur.as<MetaVar>()) {
      auto it = res_.values.find(m->name);
      if (it == res_.values.end()) {
        throw Uninterpretable(Failure::kUnresolved, "?" + m->name);
      }
      return expand(m->name, it->second, g, subs);
    }
    if (const auto* s = cur.as<Substituted>()) {  // merging reinterpretations
      return eval(s->body, g, subs_merge(s->subs, subs));
    }
    if (const auto* l = cur.as<Lam>()) return abstraction(*l, g, subs);
    if (const auto* s = cur.as<Scoped>()) return scoped_formula(*s, g, subs);
    if (const auto* a = cur.as<App>()) return application(*a, g, subs);
    throw Uninterpretable(Failure::kUnresolved, "hat abstraction used unapplied");
  }

  bool truth(const Expr& e, const Assignment& g, const SubstitutionSet& subs) {
    Value v = eval(e, g, subs);
    if (const bool* b = v.truth()) return *b;
    throw std::runtime_error("expected a formula: " + print_expr(e));
  }

 private:
  Value constant_value(const std::string& name) const {
    if (auto it = model_.constants.find(name); it != model_.constants.end()) {
      return {Atom{it->second, false}};
    }
    if (std::find(model_.domain.begin(), model_.domain.end(), name) !=
        model_.domain.end()) {
      return {Atom{name, false}};
    }
    throw std::runtime_error("constant '" + name + "' has no interpretation");
  }

  Value expand(const std::string& name, const Expr& value, const Assignment& g,
               const SubstitutionSet& subs) {
    if (std::find(expanding_.begin(), expanding_.end(), name) !=
        expanding_.end()) {
      throw Uninterpretable(Failure::kCyclic,
                            "?" + name + " re-enters its own resolution");
    }
    expanding_.push_back(name);
    Value v = eval(value, g, subs);
    expanding_.pop_back();
    return v;
  }

  Value abstraction(const Lam& l, const Assignment& g,
                    const SubstitutionSet& subs) {
    auto fn = [this, l, g, subs](const Value& arg) {
      return eval(l.body, g.bind(l.var, arg), subs);
    };
    return {Function{std::make_shared<const std::function<Value(const Value&)>>(
        std::move(fn))}};
  }

  Value application(const App& a, const Assignment& g,
                    const SubstitutionSet& subs) {
    Expr f;
    try {
      f = reinterpret(a.functor, subs);
    } catch (const CyclicSubstitution& err) {
      throw Uninterpretable(Failure::kCyclic, err.what());
    }
    std::string name;
    if (const Hat* h = ellipsis_predicate(f, res_, &name)) {  // ^-application
      if (a.args.size() != 1) {
        throw std::runtime_error("ellipsis predicate takes one argument");
      }
      Expr body = hat_apply(*h, a.args[0]);
      if (name.empty()) return eval(body, g, subs);
      return expand(name, body, g, subs);
    }
    if (const auto* c = f.as<Const>()) return builtin_or_predicate(c->name, a, g, subs);
    Value fv = eval(f, g, subs);
    const Function* fn = fv.function();
    if (!fn || a.args.size() != 1) {
      throw std::runtime_error("cannot apply non-property functor");
    }
    return (*fn->fn)(eval(a.args[0], g, subs));
  }

  Value builtin_or_predicate(const std::string& name, const App& a,
                             const Assignment& g, const SubstitutionSet& subs) {
    if (name == "and" || name == "or") {
      bool all = true;
      bool any = false;
      for (const Expr& x : a.args) {
        bool b = truth(x, g, subs);
        all = all && b;
        any = any || b;
      }
      return {name == "and" ? all : any};
    }
    if (name == "not") {
      if (a.args.size() != 1) throw std::runtime_error("not/1");
      return {!truth(a.args[0], g, subs)};
    }
    if (name == "eq") {
      if (a.args.size() != 2) throw std::runtime_error("eq/2");
      Atom x = atom(a.args[0], g, subs);
      Atom y = atom(a.args[1], g, subs);
      return {x == y};
    }
    if (name == "ref") {
      if (a.args.size() != 1) throw std::runtime_error("ref/1");
      Expr arg;
      try {
        arg = reinterpret(a.args[0], subs);
      } catch (const CyclicSubstitution& err) {
        throw Uninterpretable(Failure::kCyclic, err.what());
      }
      if (const auto* i = arg.as<IndexOcc>()) {
        throw Uninterpretable(Failure::kRefOnIndex, "#" + i->index.name);
      }
      Atom target = atom(arg, g, subs);
      auto fn = [target](const Value& v) {
        const Atom* x = v.atom();
        return Value{x && *x == target};
      };
      return {Function{std::make_shared<const std::function<Value(const Value&)>>(
          std::move(fn))}};
    }
    Tuple tuple;
    tuple.reserve(a.args.size());
    for (const Expr& x : a.args) tuple.push_back(atom(x, g, subs));
    return {model_.holds(name, tuple)};
  }

  Atom atom(const Expr& e, const Assignment& g, const SubstitutionSet& subs) {
    Value v = eval(e, g, subs);
    if (const Atom* x = v.atom()) return *x;
    throw std::runtime_error("expected an individual: " + print_expr(e));
  }

  // [I, rest]:body evaluates as Q(R', body') where the head index picks the
  // term to discharge.
  Value scoped_formula(const Scoped& s, const Assignment& g,
                       const SubstitutionSet& subs) {
    const std::vector<Index>* list = &s.scope.indices;
    std::size_t offset = 0;
    if (s.scope.metavar) {
      auto it = res_.scopes.find(*s.scope.metavar);
      if (it == res_.scopes.end()) {
        throw Uninterpretable(Failure::kUnresolved, "?" + *s.scope.metavar);
      }
      list = &it->second;
      offset = s.scope.offset;
    }
    if (offset >= list->size()) return eval(s.body, g, subs);

    Expr head;
    try {
      head = reinterpret(index_occ((*list)[offset]), subs);
    } catch (const CyclicSubstitution& err) {
      throw Uninterpretable(Failure::kCyclic, err.what());
    }
    const auto* occ = head.as<IndexOcc>();
    if (!occ) {
      throw Uninterpretable(Failure::kVacuousScope,
                            "#" + (*list)[offset].name + " already discharged");
    }
    const Index index = occ->index;
    std::optional<Expr> found = locate_term(s.body, subs, res_, index);
    if (!found) {
      throw Uninterpretable(Failure::kVacuousScope,
                            "no term #" + index.name + " to discharge");
    }
    const Term& t = *found->as<Term>();

    Scope rest = s.scope;
    if (rest.metavar) {
      rest.offset = offset + 1;
    } else {
      rest.indices.erase(rest.indices.begin());
    }
    Expr rest_formula = scoped(std::move(rest), s.body);

    std::string x = "%" + std::to_string(++fresh_);
    Expr xv = variable(x);
    SubstitutionSet restr_subs = subs_merge({{index_occ(index), xv}}, subs);
    SubstitutionSet body_subs =
        subs_merge({{*found, xv}, {index_occ(index), xv}}, subs);
    Expr restr = apply(t.restriction, {xv});
    Expr ctx = apply(t.context, {xv});

    bool exists = false;
    bool forall = true;
    for (std::size_t k = 0; k < domain_.size(); ++k) {
      Assignment gx = g.bind(x, Value{domain_[k]});
      bool r = truth(restr, gx, restr_subs);
      bool p = truth(ctx, gx, restr_subs);
      bool in_restriction = r && p;
      // The body is always evaluated once so that an uninterpretable body is
      // detected whatever the model.
      if (k == 0 || in_restriction) {
        bool b = truth(rest_formula, gx, body_subs);
        if (in_restriction) {
          exists = exists || b;
          forall = forall && b;
        }
      }
    }
    return {t.quant == Quant::kExists ? exists : forall};
  }

  const ModelSpec& model_;
  const Resolution& res_;
  std::vector<Atom> domain_;
  std::vector<std::string> expanding_;
  long fresh_ = 0;
};

}  // namespace

Valuation evaluate(const Expr& e, const ModelSpec& m, const Resolution& res,
                   const Assignment& g, const SubstitutionSet& subs) {
  Valuation out;
  auto run = [&](const Resolution& r) {
    try {
      out.values.push_back(ModelEvaluator(m, r).eval(e, g, subs));
    } catch (const Uninterpretable& err) {
      if (!out.failure) {
        out.failure = err.reason();
        out.detail = err.detail();
      }
    }
  };
  if (unbound_scope_metavars(e, res).empty()) {
    run(res);
  } else {
    auto assignments = enumerate_scopings(e, res);
    if (assignments.empty()) {
      out.failure = Failure::kUnresolved;
      out.detail = "no interpretable scoping";
    }
    for (const ScopeAssignment& a : assignments) {
      Resolution r = res;
      for (const auto& [name, list] : a.lists) r.scopes[name] = list;
      run(r);
    }
  }
  if (!out.values.empty()) out.failure.reset();
  // Collapse duplicate truth values; other values are kept as produced.
  std::vector<Value> unique;
  std::set<bool> seen;
  for (Value& v : out.values) {
    if (const bool* b = v.truth()) {
      if (!seen.insert(*b).second) continue;
    }
    unique.push_back(std::move(v));
  }
  out.values = std::move(unique);
  return out;
}

bool evaluate_truth(const Expr& e, const ModelSpec& m, const Resolution& res) {
  if (m.domain.empty()) throw std::invalid_argument("model has an empty domain");
  Value v = ModelEvaluator(m, res).eval(e, {}, {});
  if (const bool* b = v.truth()) return *b;
  throw std::runtime_error("expected a formula: " + print_expr(e));
}

std::vector<bool> truth_signature(const Expr& e, const Resolution& res,
                                  const std::vector<ModelSpec>& battery) {
  std::vector<bool> sig;
  sig.reserve(battery.size());
  for (const ModelSpec& m : battery) sig.push_back(evaluate_truth(e, m, res));
  return sig;
}

}  // namespace qlf
