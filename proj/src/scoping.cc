#include "qlf/scoping.h"

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>

#include "qlf/discharge.h"
#include "qlf/text.h"

namespace qlf {

std::string format_assignment(const ScopeAssignment& a) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, list] : a.lists) {
    if (!first) out += ", ";
    first = false;
    out += "?" + name + ":[";
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i) out += ",";
      out += "#" + list[i].name;
    }
    out += "]";
  }
  return out + "}";
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kOk:
      return "ok";
    case Verdict::kUndischarged:
      return "undischarged";
    case Verdict::kVacuous:
      return "vacuous";
    case Verdict::kCyclic:
      return "cyclic";
    case Verdict::kUnresolved:
      return "unresolved";
  }
  return "unknown";
}

std::string format_diagnosis(const Diagnosis& d) {
  std::string out(verdict_name(d.verdict));
  if (!d.indices.empty()) {
    out += "{";
    bool first = true;
    for (const Index& i : d.indices) {
      if (!first) out += ",";
      first = false;
      out += "#" + i.name;
    }
    out += "}";
  }
  return out;
}

namespace {

struct Prune {};

// Replays a prefix of choices and extends it depth-first.
class ChoiceTape {
 public:
  std::size_t choose(std::size_t n) {
    if (pos_ < entries_.size()) return entries_[pos_++].first;
    entries_.emplace_back(0, n);
    ++pos_;
    return 0;
  }

  bool advance() {
    pos_ = 0;
    while (!entries_.empty()) {
      auto& last = entries_.back();
      if (last.first + 1 < last.second) {
        ++last.first;
        return true;
      }
      entries_.pop_back();
    }
    return false;
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> entries_;
  std::size_t pos_ = 0;
};

using Bound = std::vector<std::string>;

// Indices a scope list may name, minus per-meta-variable exclusions.
struct Pool {
  std::vector<Index> indices;
  std::map<std::string, std::set<Index>> excluded;
};

Bound with(const Bound& b, const std::string& var) {
  Bound out = b;
  out.push_back(var);
  return out;
}

// Symbolic counterpart of the evaluator: visits every node the valuation
// relation would evaluate, binding discharged terms to fresh variables, and
// records what is left undischarged. With a tape it instead instantiates
// unbound meta-variables and abandons the run at the first defect.
class Walker {
 public:
  Walker(Resolution res, ChoiceTape* tape, const EnumerationOptions* opts,
         const Pool* pool, bool prune = true)
      : res_(std::move(res)),
        tape_(tape),
        opts_(opts),
        pool_(pool),
        prune_(tape && prune) {
    for (const auto& [name, list] : res_.scopes) {
      used_.insert(list.begin(), list.end());
    }
  }

  void run(const Expr& e) { walk(e, {}, {}); }

  const Resolution& resolution() const { return res_; }

  Diagnosis diagnosis() const {
    Diagnosis d;
    if (cyclic_) {
      d.verdict = Verdict::kCyclic;
    } else if (!undischarged_.empty()) {
      d.verdict = Verdict::kUndischarged;
      d.indices = undischarged_;
    } else if (!vacuous_.empty()) {
      d.verdict = Verdict::kVacuous;
      d.indices = vacuous_;
    } else if (unresolved_) {
      d.verdict = Verdict::kUnresolved;
    }
    d.detail = detail_;
    return d;
  }

 private:
  void note(Verdict v, std::optional<Index> index, const std::string& detail) {
    if (prune_) throw Prune{};
    settled_ = tape_ != nullptr;
    switch (v) {
      case Verdict::kCyclic:
        cyclic_ = true;
        break;
      case Verdict::kUndischarged:
        if (index) undischarged_.insert(*index);
        break;
      case Verdict::kVacuous:
        if (index) vacuous_.insert(*index);
        break;
      default:
        unresolved_ = true;
        break;
    }
    if (detail_.empty()) detail_ = detail;
  }

  std::optional<Expr> follow(const Expr& e, const SubstitutionSet& subs) {
    try {
      return reinterpret(e, subs);
    } catch (const CyclicSubstitution& err) {
      note(Verdict::kCyclic, std::nullopt, err.what());
      return std::nullopt;
    }
  }

  void walk(const Expr& e, const SubstitutionSet& subs, const Bound& bound) {
    std::optional<Expr> cur = follow(e, subs);
    if (!cur) return;
    if (const auto* v = cur->as<Var>()) {
      if (std::find(bound.begin(), bound.end(), v->name) == bound.end()) {
        note(Verdict::kUnresolved, std::nullopt, "free variable $" + v->name);
      }
    } else if (const auto* i = cur->as<IndexOcc>()) {
      note(Verdict::kUndischarged, i->index, "index #" + i->index.name);
    } else if (const auto* t = cur->as<Term>()) {
      note(Verdict::kUndischarged, t->index, "term #" + t->index.name);
      walk(t->restriction, subs, bound);
      walk(t->context, subs, bound);
    } else if (const auto* m = cur->as<MetaVar>()) {
      if (auto value = value_of(m->name)) {
        expand(m->name, *value, subs, bound);
      } else {
        note(Verdict::kUnresolved, std::nullopt, "?" + m->name);
      }
    } else if (const auto* s = cur->as<Substituted>()) {
      walk(s->body, subs_merge(s->subs, subs), bound);
    } else if (const auto* l = cur->as<Lam>()) {
      walk(l->body, subs, with(bound, l->var));
    } else if (cur->is<Hat>()) {
      note(Verdict::kUnresolved, std::nullopt, "unapplied hat abstraction");
    } else if (const auto* s = cur->as<Scoped>()) {
      scoped_formula(*s, subs, bound);
    } else if (const auto* a = cur->as<App>()) {
      application(*a, subs, bound);
    }
  }

  std::optional<Expr> value_of(const std::string& name) {
    if (auto it = res_.values.find(name); it != res_.values.end()) {
      return it->second;
    }
    if (!tape_ || !opts_) return std::nullopt;
    auto it = opts_->value_options.find(name);
    if (it == opts_->value_options.end() || it->second.empty()) {
      return std::nullopt;
    }
    const Expr& chosen = it->second[settled_ ? 0 : tape_->choose(it->second.size())];
    res_.values[name] = chosen;
    return chosen;
  }

  void expand(const std::string& name, const Expr& value,
              const SubstitutionSet& subs, const Bound& bound) {
    if (std::find(stack_.begin(), stack_.end(), name) != stack_.end()) {
      note(Verdict::kCyclic, std::nullopt, "?" + name + " re-enters itself");
      return;
    }
    stack_.push_back(name);
    walk(value, subs, bound);
    stack_.pop_back();
  }

  void application(const App& a, const SubstitutionSet& subs,
                   const Bound& bound) {
    std::optional<Expr> f = follow(a.functor, subs);
    if (!f) return;
    if (const auto* m = f->as<MetaVar>()) value_of(m->name);
    std::string name;
    if (const Hat* h = ellipsis_predicate(*f, res_, &name)) {
      if (a.args.size() != 1) {
        note(Verdict::kUnresolved, std::nullopt, "ellipsis arity");
        return;
      }
      Expr body = hat_apply(*h, a.args[0]);
      if (name.empty()) {
        walk(body, subs, bound);
      } else {
        expand(name, body, subs, bound);
      }
      return;
    }
    if (const auto* c = f->as<Const>()) {
      if (c->name == "ref" && a.args.size() == 1) {
        std::optional<Expr> arg = follow(a.args[0], subs);
        if (!arg) return;
        if (const auto* i = arg->as<IndexOcc>()) {
          note(Verdict::kUndischarged, i->index, "ref(#" + i->index.name + ")");
          return;
        }
      }
    } else {
      walk(*f, subs, bound);
    }
    for (const Expr& x : a.args) walk(x, subs, bound);
  }

  // Instantiates the value meta-variables applied in `e`, so that terms
  // inside their values can be located.
  void prebind(const Expr& e) {
    if (const auto* a = e.as<App>()) {
      if (const auto* m = a->functor.as<MetaVar>()) {
        bool fresh = !res_.values.contains(m->name);
        if (auto v = value_of(m->name); v && fresh) prebind(*v);
      } else {
        prebind(a->functor);
      }
      for (const Expr& x : a->args) prebind(x);
    } else if (const auto* t = e.as<Term>()) {
      prebind(t->restriction);
      prebind(t->context);
    } else if (const auto* s = e.as<Scoped>()) {
      prebind(s->body);
    } else if (const auto* l = e.as<Lam>()) {
      prebind(l->body);
    } else if (const auto* h = e.as<Hat>()) {
      prebind(h->body);
    } else if (const auto* s = e.as<Substituted>()) {
      prebind(s->body);
    }
  }

  // Indices that could head the scope list at this node.
  std::vector<Index> candidates(const std::string& scope, const Expr& body,
                                const SubstitutionSet& subs) {
    std::vector<Index> out;
    std::set<Index> present = locatable_indices(body, subs, res_);
    auto ex = pool_->excluded.find(scope);
    for (const Index& c : pool_->indices) {
      if (used_.contains(c)) continue;
      if (ex != pool_->excluded.end() && ex->second.contains(c)) continue;
      Expr head;
      try {
        head = reinterpret(index_occ(c), subs);
      } catch (const CyclicSubstitution&) {
        continue;
      }
      const auto* occ = head.as<IndexOcc>();
      if (occ && present.contains(occ->index)) out.push_back(c);
    }
    return out;
  }

  void scoped_formula(const Scoped& s, const SubstitutionSet& subs,
                      const Bound& bound) {
    if (tape_) prebind(s.body);
    std::vector<Index> list = s.scope.indices;
    std::size_t offset = 0;
    if (s.scope.metavar) {
      const std::string& name = *s.scope.metavar;
      offset = s.scope.offset;
      if (auto it = res_.scopes.find(name); it != res_.scopes.end()) {
        list = it->second;
      } else if (!tape_) {
        note(Verdict::kUnresolved, std::nullopt, "?" + name);
        walk(s.body, subs, bound);
        return;
      } else {
        std::vector<Index>& building = building_[name];
        if (offset == building.size()) {
          std::vector<Index> options = candidates(name, s.body, subs);
          std::size_t k = settled_ ? 0 : tape_->choose(options.size() + 1);
          if (k == 0) {
            res_.scopes[name] = building;
            building_.erase(name);
            walk(s.body, subs, bound);
            return;
          }
          building.push_back(options[k - 1]);
          used_.insert(options[k - 1]);
        }
        list = building;
      }
    }
    if (offset >= list.size()) {
      walk(s.body, subs, bound);
      return;
    }

    Scope rest = s.scope;
    if (rest.metavar) {
      rest.offset = offset + 1;
    } else {
      rest.indices.erase(rest.indices.begin());
    }
    Expr rest_formula = scoped(std::move(rest), s.body);

    const Index& listed = list[offset];
    std::optional<Expr> head = follow(index_occ(listed), subs);
    if (!head) return;
    const auto* occ = head->as<IndexOcc>();
    std::optional<Expr> found;
    if (occ) found = locate_term(s.body, subs, res_, occ->index);
    if (!found) {
      note(Verdict::kVacuous, listed, "#" + listed.name + " discharges nothing");
      walk(rest_formula, subs, bound);
      return;
    }
    const Term& t = *found->as<Term>();
    std::string x = "%" + std::to_string(++fresh_);
    Expr xv = variable(x);
    Bound inner = with(bound, x);
    SubstitutionSet restr_subs = subs_merge({{index_occ(occ->index), xv}}, subs);
    walk(apply(t.restriction, {xv}), restr_subs, inner);
    walk(apply(t.context, {xv}), restr_subs, inner);
    walk(rest_formula,
         subs_merge({{*found, xv}, {index_occ(occ->index), xv}}, subs), inner);
  }

  Resolution res_;
  ChoiceTape* tape_;
  const EnumerationOptions* opts_;
  const Pool* pool_;
  bool prune_;
  // After the first defect, a diagnosing run stops branching.
  bool settled_ = false;
  std::map<std::string, std::vector<Index>> building_;
  std::set<Index> used_;
  std::vector<std::string> stack_;
  long fresh_ = 0;
  bool cyclic_ = false;
  bool unresolved_ = false;
  std::set<Index> undischarged_;
  std::set<Index> vacuous_;
  std::string detail_;
};

void for_each_node(const Expr& e, const std::function<void(const Expr&)>& f) {
  f(e);
  if (const auto* t = e.as<Term>()) {
    for_each_node(t->restriction, f);
    for_each_node(t->context, f);
  } else if (const auto* s = e.as<Scoped>()) {
    for_each_node(s->body, f);
  } else if (const auto* l = e.as<Lam>()) {
    for_each_node(l->body, f);
  } else if (const auto* h = e.as<Hat>()) {
    for_each_node(h->body, f);
  } else if (const auto* s = e.as<Substituted>()) {
    for_each_node(s->body, f);
    for (const Pair& p : s->subs) {
      for_each_node(p.from, f);
      for_each_node(p.to, f);
    }
  } else if (const auto* a = e.as<App>()) {
    for_each_node(a->functor, f);
    for (const Expr& x : a->args) for_each_node(x, f);
  }
}

bool contains(const Expr& hay, const Expr& needle) {
  bool found = false;
  for_each_node(hay, [&](const Expr& n) { found = found || n == needle; });
  return found;
}

// Explicit ellipsis arguments, and the indices sloppy pairs rename them to,
// may not be listed at a scope node whose body holds that ellipsis's
// antecedent: there they are discharged by the copied scope nodes.
std::map<std::string, std::set<Index>> excluded_candidates(
    const std::vector<Expr>& roots, const Resolution& res,
    const EnumerationOptions& opts) {
  std::vector<std::pair<std::string, Index>> arguments;
  std::vector<std::pair<Index, Index>> renamings;
  std::map<std::string, std::vector<Expr>> bodies;
  for (const Expr& r : roots) {
    for_each_node(r, [&](const Expr& n) {
      if (const auto* a = n.as<App>()) {
        if (const auto* m = a->functor.as<MetaVar>()) {
          for (const Expr& x : a->args) {
            if (const auto* t = x.as<Term>()) arguments.emplace_back(m->name, t->index);
          }
        }
      } else if (const auto* s = n.as<Substituted>()) {
        for (const Pair& p : s->subs) {
          const auto* from = p.from.as<IndexOcc>();
          const auto* to = p.to.as<IndexOcc>();
          if (from && to) renamings.emplace_back(from->index, to->index);
        }
      } else if (const auto* s = n.as<Scoped>(); s && s->scope.metavar) {
        bodies[*s->scope.metavar].push_back(s->body);
      }
    });
  }
  auto antecedents = [&](const std::string& name) {
    std::vector<Expr> values;
    if (auto it = res.values.find(name); it != res.values.end()) {
      values.push_back(it->second);
    }
    if (auto it = opts.value_options.find(name); it != opts.value_options.end()) {
      values.insert(values.end(), it->second.begin(), it->second.end());
    }
    std::vector<Expr> out;
    for (const Expr& v : values) {
      const auto* h = v.as<Hat>();
      const auto* s = h ? h->body.as<Substituted>() : nullptr;
      if (s) out.push_back(s->body);
    }
    return out;
  };

  std::map<std::string, std::set<Index>> out;
  for (const auto& [site, index] : arguments) {
    std::set<Index> family{index};
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& [from, to] : renamings) {
        if (family.contains(from) && family.insert(to).second) grew = true;
      }
    }
    std::vector<Expr> ants = antecedents(site);
    for (const auto& [scope, list] : bodies) {
      bool blocked = ants.empty();
      for (const Expr& b : list) {
        for (const Expr& a : ants) blocked = blocked || contains(b, a);
      }
      if (blocked) out[scope].insert(family.begin(), family.end());
    }
  }
  return out;
}

std::string resolution_key(const Resolution& r) {
  ScopeAssignment a{r.scopes};
  std::string key = format_assignment(a);
  for (const auto& [name, value] : r.values) {
    key += " ?" + name + "=" + print_expr(value);
  }
  return key;
}

}  // namespace

Diagnosis check_interpretable(const Expr& e, const Resolution& res) {
  Walker w(res, nullptr, nullptr, nullptr);
  w.run(e);
  return w.diagnosis();
}

Diagnosis check_interpretable(const Expr& e, const ScopeAssignment& a,
                              const Resolution& res) {
  Resolution r = res;
  for (const auto& [name, list] : a.lists) r.scopes[name] = list;
  return check_interpretable(e, r);
}

namespace {

Pool candidate_pool(const Expr& e, const Resolution& res,
                    const EnumerationOptions& opts) {
  std::vector<Expr> roots{e};
  for (const auto& [name, value] : res.values) roots.push_back(value);
  for (const auto& [name, values] : opts.value_options) {
    roots.insert(roots.end(), values.begin(), values.end());
  }
  std::set<Index> all;
  for (const Expr& r : roots) {
    auto more = collect_indices(r);
    all.insert(more.begin(), more.end());
  }
  return Pool{{all.begin(), all.end()}, excluded_candidates(roots, res, opts)};
}

int severity(Verdict v) {
  switch (v) {
    case Verdict::kOk:
      return 0;
    case Verdict::kVacuous:
      return 1;
    case Verdict::kUndischarged:
      return 2;
    case Verdict::kUnresolved:
      return 3;
    case Verdict::kCyclic:
      return 4;
  }
  return 5;
}

}  // namespace

std::vector<Resolution> enumerate_completions(const Expr& e,
                                              const Resolution& res,
                                              const EnumerationOptions& opts) {
  Pool pool = candidate_pool(e, res, opts);

  std::map<std::string, Resolution> found;
  ChoiceTape tape;
  do {
    Walker w(res, &tape, &opts, &pool);
    try {
      w.run(e);
    } catch (const Prune&) {
      continue;
    }
    Resolution r = w.resolution();
    for (const std::string& name : unbound_scope_metavars(e, r)) {
      r.scopes[name] = {};
    }
    found.emplace(resolution_key(r), std::move(r));
    if (found.size() > opts.cap) throw ScopingCapExceeded(opts.cap);
  } while (tape.advance());

  std::vector<Resolution> out;
  out.reserve(found.size());
  for (auto& [key, r] : found) out.push_back(std::move(r));
  std::sort(out.begin(), out.end(), [](const Resolution& a, const Resolution& b) {
    if (a.scopes != b.scopes) return a.scopes < b.scopes;
    return resolution_key(a) < resolution_key(b);
  });
  return out;
}

std::vector<std::pair<Resolution, Diagnosis>> enumerate_diagnosed(
    const Expr& e, const Resolution& res, const EnumerationOptions& opts) {
  Pool pool = candidate_pool(e, res, opts);
  std::map<std::string, std::pair<Resolution, Diagnosis>> found;
  ChoiceTape tape;
  do {
    Walker w(res, &tape, &opts, &pool, false);
    w.run(e);
    Resolution r = w.resolution();
    for (const std::string& name : unbound_scope_metavars(e, r)) {
      r.scopes[name] = {};
    }
    std::string key = resolution_key(r);
    found.emplace(key, std::make_pair(std::move(r), w.diagnosis()));
    if (found.size() > opts.cap) throw ScopingCapExceeded(opts.cap);
  } while (tape.advance());
  std::vector<std::pair<Resolution, Diagnosis>> out;
  for (auto& [key, entry] : found) out.push_back(std::move(entry));
  return out;
}

Diagnosis explain_rejection(const Expr& e, const Resolution& res,
                            const EnumerationOptions& opts) {
  std::optional<Diagnosis> best;
  for (const auto& [r, d] : enumerate_diagnosed(e, res, opts)) {
    if (!best || severity(d.verdict) < severity(best->verdict)) best = d;
  }
  return best.value_or(Diagnosis{});
}

std::vector<ScopeAssignment> enumerate_scopings(const Expr& e,
                                                const Resolution& res,
                                                std::size_t cap) {
  EnumerationOptions opts;
  opts.cap = cap;
  std::vector<ScopeAssignment> out;
  for (const Resolution& r : enumerate_completions(e, res, opts)) {
    ScopeAssignment a;
    for (const auto& [name, list] : r.scopes) {
      if (!res.scopes.contains(name)) a.lists[name] = list;
    }
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace qlf
