#include "qlf/discharge.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

namespace qlf {

std::string_view failure_name(Failure f) {
  switch (f) {
    case Failure::kUndischargedTerm:
      return "undischarged-term";
    case Failure::kUndischargedIndex:
      return "undischarged-index";
    case Failure::kVacuousScope:
      return "vacuous-scope";
    case Failure::kCyclic:
      return "cyclic-substitution";
    case Failure::kRefOnIndex:
      return "ref-on-index";
    case Failure::kUnresolved:
      return "unresolved-metavar";
    case Failure::kFreeVariable:
      return "free-variable";
  }
  return "unknown";
}

const Hat* ellipsis_predicate(const Expr& functor, const Resolution& res,
                              std::string* name) {
  if (const auto* h = functor.as<Hat>()) return h;
  if (const auto* m = functor.as<MetaVar>()) {
    auto it = res.values.find(m->name);
    if (it != res.values.end()) {
      if (const auto* h = it->second.as<Hat>()) {
        if (name) *name = m->name;
        return h;
      }
    }
  }
  return nullptr;
}

namespace {

// Every term a top-down pass reaches, first occurrence per index.
class TermLocator {
 public:
  explicit TermLocator(const Resolution& res) : res_(res) {}

  void visit(const Expr& e, const SubstitutionSet& subs) {
    Expr cur;
    try {
      cur = reinterpret(e, subs);
    } catch (const CyclicSubstitution&) {
      return;
    }
    if (const auto* t = cur.as<Term>()) {
      found_.emplace(t->index, cur);
      visit(t->restriction, subs);
      visit(t->context, subs);
    } else if (const auto* s = cur.as<Scoped>()) {
      visit(s->body, subs);
    } else if (const auto* l = cur.as<Lam>()) {
      visit(l->body, subs);
    } else if (const auto* s = cur.as<Substituted>()) {
      visit(s->body, subs_merge(s->subs, subs));
    } else if (const auto* m = cur.as<MetaVar>()) {
      auto it = res_.values.find(m->name);
      if (it != res_.values.end() && !it->second.is<Hat>()) {
        expand(m->name, it->second, subs);
      }
    } else if (const auto* a = cur.as<App>()) {
      Expr f;
      try {
        f = reinterpret(a->functor, subs);
      } catch (const CyclicSubstitution&) {
        return;
      }
      std::string name;
      if (const Hat* h = ellipsis_predicate(f, res_, &name);
          h && a->args.size() == 1) {
        if (name.empty()) {
          visit(hat_apply(*h, a->args[0]), subs);
        } else {
          expand(name, hat_apply(*h, a->args[0]), subs);
        }
        return;
      }
      visit(a->functor, subs);
      for (const Expr& x : a->args) visit(x, subs);
    }
  }

  std::map<Index, Expr> take() { return std::move(found_); }

 private:
  void expand(const std::string& name, const Expr& value,
              const SubstitutionSet& subs) {
    if (std::find(stack_.begin(), stack_.end(), name) != stack_.end()) return;
    stack_.push_back(name);
    visit(value, subs);
    stack_.pop_back();
  }

  const Resolution& res_;
  std::map<Index, Expr> found_;
  std::vector<std::string> stack_;
};

struct LocateKey {
  std::size_t body;
  std::vector<std::pair<std::size_t, std::size_t>> subs;
  std::vector<std::pair<std::string, std::size_t>> values;

  friend bool operator==(const LocateKey&, const LocateKey&) = default;
};

struct LocateKeyHash {
  std::size_t operator()(const LocateKey& k) const {
    std::size_t h = k.body;
    auto mix = [&](std::size_t x) {
      h ^= x + 0x9e3779b97f4a7c15 + (h << 6) + (h >> 2);
    };
    for (const auto& [from, to] : k.subs) {
      mix(from);
      mix(to);
    }
    for (const auto& [name, v] : k.values) {
      mix(std::hash<std::string>{}(name));
      mix(v);
    }
    return h;
  }
};

struct LocateEntry {
  Expr body;
  SubstitutionSet subs;
  std::map<std::string, Expr> values;
  std::map<Index, Expr> found;
};

// Keyed by node hashes; a hit is confirmed structurally.
thread_local std::unordered_map<LocateKey, LocateEntry, LocateKeyHash>
    locate_cache;

const std::map<Index, Expr>& located_terms(const Expr& body,
                                           const SubstitutionSet& subs,
                                           const Resolution& res) {
  LocateKey key{body.hash(), {}, {}};
  for (const Pair& p : subs) key.subs.emplace_back(p.from.hash(), p.to.hash());
  for (const auto& [name, v] : res.values) key.values.emplace_back(name, v.hash());
  auto it = locate_cache.find(key);
  if (it != locate_cache.end()) {
    const LocateEntry& e = it->second;
    if (e.body == body && e.subs == subs && e.values == res.values) return e.found;
  }
  TermLocator locator(res);
  locator.visit(body, subs);
  if (locate_cache.size() > 50000) locate_cache.clear();
  LocateEntry& entry = locate_cache[std::move(key)];
  entry = {body, subs, res.values, locator.take()};
  return entry.found;
}

void reach(const Expr& e, const Resolution& res,
           std::vector<std::string>& out) {
  auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) != out.end()) return false;
    out.push_back(name);
    return true;
  };
  if (const auto* s = e.as<Scoped>()) {
    if (s->scope.metavar) add(*s->scope.metavar);
    reach(s->body, res, out);
  } else if (const auto* m = e.as<MetaVar>()) {
    if (add(m->name)) {
      if (auto it = res.values.find(m->name); it != res.values.end()) {
        reach(it->second, res, out);
      }
    }
  } else if (const auto* t = e.as<Term>()) {
    reach(t->restriction, res, out);
    reach(t->context, res, out);
  } else if (const auto* l = e.as<Lam>()) {
    reach(l->body, res, out);
  } else if (const auto* h = e.as<Hat>()) {
    reach(h->body, res, out);
  } else if (const auto* s = e.as<Substituted>()) {
    reach(s->body, res, out);
    for (const Pair& p : s->subs) {
      reach(p.from, res, out);
      reach(p.to, res, out);
    }
  } else if (const auto* a = e.as<App>()) {
    reach(a->functor, res, out);
    for (const Expr& x : a->args) reach(x, res, out);
  }
}

}  // namespace

std::optional<Expr> locate_term(const Expr& body, const SubstitutionSet& subs,
                                const Resolution& res, const Index& target) {
  const auto& found = located_terms(body, subs, res);
  auto it = found.find(target);
  if (it == found.end()) return std::nullopt;
  return it->second;
}

std::set<Index> locatable_indices(const Expr& body, const SubstitutionSet& subs,
                                  const Resolution& res) {
  std::set<Index> out;
  for (const auto& [index, t] : located_terms(body, subs, res)) out.insert(index);
  return out;
}

std::vector<std::string> reachable_metavars(const Expr& e,
                                            const Resolution& res) {
  std::vector<std::string> out;
  reach(e, res, out);
  return out;
}

std::vector<std::string> unbound_scope_metavars(const Expr& e,
                                                const Resolution& res) {
  std::vector<std::string> scope_vars;
  std::vector<std::string> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& n) {
    if (const auto* s = n.as<Scoped>(); s && s->scope.metavar) {
      const std::string& name = *s->scope.metavar;
      if (!res.scopes.contains(name) &&
          std::find(scope_vars.begin(), scope_vars.end(), name) ==
              scope_vars.end()) {
        scope_vars.push_back(name);
      }
    }
    if (const auto* m = n.as<MetaVar>()) {
      if (std::find(seen.begin(), seen.end(), m->name) != seen.end()) return;
      seen.push_back(m->name);
      if (auto it = res.values.find(m->name); it != res.values.end()) {
        walk(it->second);
      }
      return;
    }
    if (const auto* t = n.as<Term>()) {
      walk(t->restriction);
      walk(t->context);
    } else if (const auto* s = n.as<Scoped>()) {
      walk(s->body);
    } else if (const auto* l = n.as<Lam>()) {
      walk(l->body);
    } else if (const auto* h = n.as<Hat>()) {
      walk(h->body);
    } else if (const auto* s = n.as<Substituted>()) {
      walk(s->body);
      for (const Pair& p : s->subs) {
        walk(p.from);
        walk(p.to);
      }
    } else if (const auto* a = n.as<App>()) {
      walk(a->functor);
      for (const Expr& x : a->args) walk(x);
    }
  };
  walk(e);
  return scope_vars;
}

}  // namespace qlf
