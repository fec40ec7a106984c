#include "qlf/ellipsis.h"

#include <algorithm>
#include <functional>

namespace qlf {

std::string_view identity_name(Identity i) {
  return i == Identity::kStrict ? "strict" : "sloppy";
}

std::string format_choicetrace(const std::map<Index, Identity>& trace) {
  std::string out;
  for (const auto& [index, id] : trace) {
    if (!out.empty()) out += ' ';
    out += "#" + index.name + ":" + std::string(identity_name(id));
  }
  return out.empty() ? "-" : out;
}

namespace {

std::optional<std::string> role_of(const Term& t) {
  const Category::Value* v = t.category.find("role");
  if (!v || !*v) return std::nullopt;
  return **v;
}

std::string strip_ellipsis(const std::string& kind) {
  const std::string suffix = "_ellipsis";
  if (kind.size() > suffix.size() &&
      kind.compare(kind.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return kind.substr(0, kind.size() - suffix.size());
  }
  return kind;
}

// Terms in top-down order, one per index.
std::vector<Term> distinct_terms(const Expr& e) {
  std::vector<Term> out;
  for (Term& t : collect_terms(e)) {
    bool seen = std::any_of(out.begin(), out.end(),
                            [&](const Term& u) { return u.index == t.index; });
    if (!seen) out.push_back(std::move(t));
  }
  return out;
}

// Terms of the clause itself, not those inside another term's restriction.
void clause_terms(const Expr& e, std::vector<Term>& out) {
  if (const auto* t = e.as<Term>()) {
    out.push_back(*t);
  } else if (const auto* a = e.as<App>()) {
    clause_terms(a->functor, out);
    for (const Expr& x : a->args) clause_terms(x, out);
  } else if (const auto* s = e.as<Scoped>()) {
    clause_terms(s->body, out);
  } else if (const auto* l = e.as<Lam>()) {
    clause_terms(l->body, out);
  } else if (const auto* s = e.as<Substituted>()) {
    clause_terms(s->body, out);
  }
}

// Argument lists of every application of meta-variable `name`, top-down.
void find_applications(const Expr& e, const std::string& name,
                       std::vector<const App*>& out) {
  if (const auto* a = e.as<App>()) {
    if (const auto* m = a->functor.as<MetaVar>(); m && m->name == name) {
      out.push_back(a);
    }
    find_applications(a->functor, name, out);
    for (const Expr& x : a->args) find_applications(x, name, out);
  } else if (const auto* t = e.as<Term>()) {
    find_applications(t->restriction, name, out);
    find_applications(t->context, name, out);
  } else if (const auto* s = e.as<Scoped>()) {
    find_applications(s->body, name, out);
  } else if (const auto* l = e.as<Lam>()) {
    find_applications(l->body, name, out);
  } else if (const auto* h = e.as<Hat>()) {
    find_applications(h->body, name, out);
  } else if (const auto* s = e.as<Substituted>()) {
    find_applications(s->body, name, out);
  }
}

}  // namespace

ParallelResult identify_parallel(const Expr& antecedent,
                                 const Category& ellipsis_category,
                                 const std::vector<Term>& ellipsis_terms) {
  std::vector<Term> terms = distinct_terms(antecedent);
  std::vector<Term> clause;
  clause_terms(antecedent, clause);
  auto with_role = [&](const std::string& role) {
    std::vector<const Term*> out;
    for (const Term& t : clause) {
      if (role_of(t) == role) out.push_back(&t);
    }
    return out;
  };

  ParallelResult result;
  bool vp = strip_ellipsis(ellipsis_category.kind) == "vp";
  if (vp) {
    if (ellipsis_terms.size() != 1) {
      throw BadParallelAnnotation("VP ellipsis needs one explicit term");
    }
    auto subjects = with_role("subj");
    if (subjects.empty()) throw NoSubject("antecedent has no role=subj term");
    if (subjects.size() > 1) {
      throw AmbiguousParallel("several antecedent terms have role=subj");
    }
    result.pairs.push_back({subjects[0]->index, ellipsis_terms[0].index});
  } else {
    for (const Term& e : ellipsis_terms) {
      auto role = role_of(e);
      if (!role) {
        throw BadParallelAnnotation("ellipsis term #" + e.index.name +
                                    " has no role");
      }
      auto matches = with_role(*role);
      if (matches.empty()) {
        if (*role == "subj") throw NoSubject("antecedent has no role=subj term");
        throw BadParallelAnnotation("no antecedent term has role=" + *role);
      }
      if (matches.size() > 1) {
        throw AmbiguousParallel("several antecedent terms have role=" + *role);
      }
      result.pairs.push_back({matches[0]->index, e.index});
    }
  }
  for (const Term& t : terms) {
    bool parallel = std::any_of(
        result.pairs.begin(), result.pairs.end(),
        [&](const ParallelPair& p) { return p.antecedent == t.index; });
    if (!parallel) result.non_parallel.push_back(t);
  }
  return result;
}

Category merge_categories(const Category& ellipsis,
                          const Category& antecedent) {
  Category out;
  out.kind = strip_ellipsis(antecedent.kind.empty() ? ellipsis.kind
                                                    : antecedent.kind);
  for (const auto& [name, value] : antecedent.features) {
    const Category::Value* over = ellipsis.find(name);
    out.features.emplace_back(name, over && *over ? *over : value);
  }
  for (const auto& [name, value] : ellipsis.features) {
    if (!antecedent.find(name)) out.features.emplace_back(name, value);
  }
  return out;
}

EllipsisPlan::EllipsisPlan(const Expr& qlf, std::vector<EllipsisSite> sites)
    : qlf_(qlf) {
  std::set<Index> used = collect_indices(qlf);
  for (EllipsisSite& site : sites) {
    SitePlan plan;
    try {
      plan.antecedent = subexpr_at(qlf, site.antecedent_path);
    } catch (const std::out_of_range&) {
      throw BadParallelAnnotation("antecedent path " +
                                  format_path(site.antecedent_path) +
                                  " addresses nothing");
    }
    std::vector<const App*> apps;
    find_applications(qlf, site.metavar, apps);
    if (apps.empty()) {
      throw BadParallelAnnotation("?" + site.metavar + " is never applied");
    }
    if (apps[0]->args.size() != 1 || !apps[0]->args[0].is<Term>()) {
      throw BadParallelAnnotation("?" + site.metavar +
                                  " must apply to one explicit term");
    }
    plan.ellipsis_term = apps[0]->args[0];
    const Term& explicit_term = *plan.ellipsis_term.as<Term>();

    std::vector<Term> terms = distinct_terms(plan.antecedent);
    if (site.parallel.empty()) {
      Category cat = site.category.value_or(Category{"vp_ellipsis", {}});
      site.parallel = identify_parallel(plan.antecedent, cat, {explicit_term}).pairs;
    }
    if (site.parallel.size() != 1) {
      throw BadParallelAnnotation("?" + site.metavar +
                                  " needs exactly one parallel pair");
    }
    const ParallelPair& pp = site.parallel[0];
    if (pp.ellipsis != explicit_term.index) {
      throw BadParallelAnnotation("#" + pp.ellipsis.name +
                                  " is not the explicit term of ?" +
                                  site.metavar);
    }
    auto ta = std::find_if(terms.begin(), terms.end(),
                           [&](const Term& t) { return t.index == pp.antecedent; });
    if (ta == terms.end()) {
      throw BadParallelAnnotation("parallel index #" + pp.antecedent.name +
                                  " names no term in the antecedent");
    }
    plan.antecedent_term = *ta;
    for (const Term& t : terms) {
      if (t.index == pp.antecedent || t.index == explicit_term.index) continue;
      plan.non_parallel.push_back(t);
      Index f = fresh_index(t.index, used);
      used.insert(f);
      plan.fresh.push_back(f);
    }
    plan.site = std::move(site);
    plans_.push_back(std::move(plan));
  }
}

const SitePlan* EllipsisPlan::find(const std::string& metavar) const {
  for (const SitePlan& p : plans_) {
    if (p.site.metavar == metavar) return &p;
  }
  return nullptr;
}

std::vector<EllipsisSolution> EllipsisPlan::solve(std::size_t k,
                                                  bool extended_strict) const {
  const SitePlan& plan = plans_.at(k);
  const Expr hole = variable(kHole);
  SubstitutionSet base{
      {term(plan.antecedent_term), hole},
      {index_occ(plan.antecedent_term.index), apply("idx", {hole})}};

  // Strict-only candidates: terms that ellipses nested in the antecedent
  // re-index sloppily.
  std::vector<Term> extra;
  if (extended_strict) {
    for (const SitePlan& inner : plans_) {
      if (&inner == &plan) continue;
      std::vector<const App*> apps;
      find_applications(plan.antecedent, inner.site.metavar, apps);
      if (apps.empty()) continue;
      for (std::size_t i = 0; i < inner.non_parallel.size(); ++i) {
        Term t = inner.non_parallel[i];
        t.index = inner.fresh[i];
        extra.push_back(std::move(t));
      }
    }
  }

  const std::size_t n = plan.non_parallel.size();
  const std::size_t m = extra.size();
  std::vector<EllipsisSolution> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    for (std::size_t ebits = 0; ebits < (std::size_t{1} << m); ++ebits) {
      SubstitutionSet pairs = base;
      std::map<Index, Identity> trace;
      for (std::size_t i = 0; i < n; ++i) {
        const Term& t = plan.non_parallel[i];
        if (bits & (std::size_t{1} << (n - 1 - i))) {
          pairs.push_back({index_occ(t.index), index_occ(plan.fresh[i])});
          trace[t.index] = Identity::kSloppy;
        } else {
          pairs.push_back({term(t), index_occ(t.index)});
          trace[t.index] = Identity::kStrict;
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (ebits & (std::size_t{1} << (m - 1 - i))) {
          pairs.push_back({term(extra[i]), index_occ(extra[i].index)});
          trace[extra[i].index] = Identity::kStrict;
        }
      }
      EllipsisSolution s;
      s.antecedent_path = plan.site.antecedent_path;
      s.predicate = hat(kHole, substituted(plan.antecedent, pairs));
      s.pairs = hat_apply(*s.predicate.as<Hat>(), plan.ellipsis_term)
                    .as<Substituted>()
                    ->subs;
      s.choicetrace = std::move(trace);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<EllipsisSolution> solve_equation(const Expr& qlf,
                                             const EllipsisSite& site,
                                             bool extended_strict) {
  return EllipsisPlan(qlf, {site}).solve(0, extended_strict);
}

}  // namespace qlf
