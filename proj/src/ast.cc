#include "qlf/ast.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace qlf {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_str(std::string_view s) {
  return std::hash<std::string_view>{}(s);
}

std::size_t hash_category(const Category& c) {
  std::size_t h = hash_str(c.kind);
  for (const auto& [name, value] : c.features) {
    h = mix(h, hash_str(name));
    h = mix(h, value ? hash_str(*value) : 0x5bd1e995);
  }
  return h;
}

std::size_t hash_pairs(const SubstitutionSet& subs) {
  std::size_t h = 0x27d4eb2d;
  for (const Pair& p : subs) h = mix(mix(h, p.from.hash()), p.to.hash());
  return h;
}

struct Hasher {
  std::size_t operator()(const Const& n) const { return mix(1, hash_str(n.name)); }
  std::size_t operator()(const StrLit& n) const { return mix(2, hash_str(n.text)); }
  std::size_t operator()(const Var& n) const { return mix(3, hash_str(n.name)); }
  std::size_t operator()(const IndexOcc& n) const {
    return mix(4, hash_str(n.index.name));
  }
  std::size_t operator()(const MetaVar& n) const { return mix(5, hash_str(n.name)); }
  std::size_t operator()(const Term& n) const {
    std::size_t h = mix(6, hash_str(n.index.name));
    h = mix(h, hash_category(n.category));
    h = mix(h, static_cast<std::size_t>(n.quant));
    h = mix(h, n.restriction.hash());
    return mix(h, n.context.hash());
  }
  std::size_t operator()(const Scoped& n) const {
    std::size_t h = 7;
    if (n.scope.metavar) {
      h = mix(mix(h, hash_str(*n.scope.metavar)), n.scope.offset);
    } else {
      for (const Index& i : n.scope.indices) h = mix(h, hash_str(i.name));
    }
    return mix(h, n.body.hash());
  }
  std::size_t operator()(const Lam& n) const {
    return mix(mix(8, hash_str(n.var)), n.body.hash());
  }
  std::size_t operator()(const Hat& n) const {
    return mix(mix(9, hash_str(n.var)), n.body.hash());
  }
  std::size_t operator()(const Substituted& n) const {
    return mix(mix(10, n.body.hash()), hash_pairs(n.subs));
  }
  std::size_t operator()(const App& n) const {
    std::size_t h = mix(11, n.functor.hash());
    for (const Expr& a : n.args) h = mix(h, a.hash());
    return h;
  }
};

Expr make(NodeData data) {
  auto node = std::make_shared<Node>();
  node->hash = std::visit(Hasher{}, data);
  node->data = std::move(data);
  return Expr(std::move(node));
}

bool same_scope(const Scope& a, const Scope& b) {
  return a.metavar == b.metavar && a.offset == b.offset &&
         (a.metavar || a.indices == b.indices);
}

bool same_pairs(const SubstitutionSet& a, const SubstitutionSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].from == b[i].from) || !(a[i].to == b[i].to)) return false;
  }
  return true;
}

bool same_node(const NodeData& a, const NodeData& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, Const>) return x.name == y.name;
        if constexpr (std::is_same_v<T, StrLit>) return x.text == y.text;
        if constexpr (std::is_same_v<T, Var>) return x.name == y.name;
        if constexpr (std::is_same_v<T, IndexOcc>) return x.index == y.index;
        if constexpr (std::is_same_v<T, MetaVar>) return x.name == y.name;
        if constexpr (std::is_same_v<T, Term>) {
          return x.index == y.index && x.quant == y.quant &&
                 x.category == y.category && x.restriction == y.restriction &&
                 x.context == y.context;
        }
        if constexpr (std::is_same_v<T, Scoped>) {
          return same_scope(x.scope, y.scope) && x.body == y.body;
        }
        if constexpr (std::is_same_v<T, Lam> || std::is_same_v<T, Hat>) {
          return x.var == y.var && x.body == y.body;
        }
        if constexpr (std::is_same_v<T, Substituted>) {
          return x.body == y.body && same_pairs(x.subs, y.subs);
        }
        if constexpr (std::is_same_v<T, App>) {
          if (!(x.functor == y.functor) || x.args.size() != y.args.size()) {
            return false;
          }
          for (std::size_t i = 0; i < x.args.size(); ++i) {
            if (!(x.args[i] == y.args[i])) return false;
          }
          return true;
        }
        return false;
      },
      a);
}

}  // namespace

const Category::Value* Category::find(std::string_view feature) const {
  for (const auto& [name, value] : features) {
    if (name == feature) return &value;
  }
  return nullptr;
}

void Category::set(const std::string& feature, Value value) {
  for (auto& [name, v] : features) {
    if (name == feature) {
      v = std::move(value);
      return;
    }
  }
  features.emplace_back(feature, std::move(value));
}

std::string_view quant_name(Quant q) {
  return q == Quant::kExists ? "exists" : "forall";
}

std::size_t Expr::hash() const { return node_ ? node_->hash : 0; }

bool Expr::deep_equal(const Node& a, const Node& b) {
  return same_node(a.data, b.data);
}

Expr constant(std::string name) { return make(Const{std::move(name)}); }
Expr string_literal(std::string text) { return make(StrLit{std::move(text)}); }
Expr variable(std::string name) { return make(Var{std::move(name)}); }
Expr index_occ(Index index) { return make(IndexOcc{std::move(index)}); }
Expr metavar(std::string name) { return make(MetaVar{std::move(name)}); }
Expr term(Term t) { return make(std::move(t)); }
Expr scoped(Scope scope, Expr body) {
  return make(Scoped{std::move(scope), std::move(body)});
}
Expr scoped(std::vector<Index> indices, Expr body) {
  Scope s;
  s.indices = std::move(indices);
  return scoped(std::move(s), std::move(body));
}
Expr scoped(std::string metavar_name, Expr body) {
  Scope s;
  s.metavar = std::move(metavar_name);
  return scoped(std::move(s), std::move(body));
}
Expr lambda(std::string var, Expr body) {
  return make(Lam{std::move(var), std::move(body)});
}
Expr hat(std::string var, Expr body) {
  return make(Hat{std::move(var), std::move(body)});
}
Expr substituted(Expr body, SubstitutionSet subs) {
  return make(Substituted{std::move(body), std::move(subs)});
}
Expr apply(Expr functor, std::vector<Expr> args) {
  return make(App{std::move(functor), std::move(args)});
}
Expr apply(std::string functor, std::vector<Expr> args) {
  return apply(constant(std::move(functor)), std::move(args));
}

std::optional<Index> index_of(const Expr& e) {
  if (const auto* t = e.as<Term>()) return t->index;
  if (const auto* i = e.as<IndexOcc>()) return i->index;
  return std::nullopt;
}

Expr reindexed(const Term& t, Index index) {
  Term copy = t;
  copy.index = std::move(index);
  return term(std::move(copy));
}

// ---------------------------------------------------------------------------

const Expr* lookup(const SubstitutionSet& subs, const Expr& old) {
  for (const Pair& p : subs) {
    if (p.from == old) return &p.to;
  }
  return nullptr;
}

SubstitutionSet subs_merge(const SubstitutionSet& left,
                           const SubstitutionSet& right) {
  if (left.empty()) return right;
  SubstitutionSet out = left;
  for (const Pair& p : right) {
    if (!lookup(left, p.from)) out.push_back(p);
  }
  return out;
}

Expr reinterpret(const Expr& e, const SubstitutionSet& subs) {
  if (subs.empty()) return e;
  Expr cur = e;
  std::vector<Expr> seen;
  for (;;) {
    Expr next;
    if (const Expr* hit = lookup(subs, cur); hit && !(*hit == cur)) {
      next = *hit;
    } else if (const auto* t = cur.as<Term>()) {
      const Expr* moved = lookup(subs, index_occ(t->index));
      const auto* to = moved ? moved->as<IndexOcc>() : nullptr;
      if (!to || to->index == t->index) return cur;
      next = reindexed(*t, to->index);
    } else {
      return cur;
    }
    if (seen.empty()) seen.push_back(e);
    if (std::find(seen.begin(), seen.end(), next) != seen.end()) {
      throw CyclicSubstitution("chain revisits a rewritten node");
    }
    seen.push_back(next);
    cur = next;
  }
}

// ---------------------------------------------------------------------------

namespace {

// Rebuilds `e` with `f` applied to each expression child. Scope lists and
// term indices are not expression children.
template <class F>
Expr map_children(const Expr& e, F&& f) {
  if (const auto* t = e.as<Term>()) {
    Term copy = *t;
    copy.restriction = f(t->restriction);
    copy.context = f(t->context);
    return term(std::move(copy));
  }
  if (const auto* s = e.as<Scoped>()) return scoped(s->scope, f(s->body));
  if (const auto* l = e.as<Lam>()) return lambda(l->var, f(l->body));
  if (const auto* h = e.as<Hat>()) return hat(h->var, f(h->body));
  if (const auto* s = e.as<Substituted>()) {
    SubstitutionSet pairs;
    for (const Pair& p : s->subs) pairs.push_back({f(p.from), f(p.to)});
    return substituted(f(s->body), std::move(pairs));
  }
  if (const auto* a = e.as<App>()) {
    std::vector<Expr> args;
    for (const Expr& x : a->args) args.push_back(f(x));
    return apply(f(a->functor), std::move(args));
  }
  return e;
}

Expr fill_hole(const Expr& e, const std::string& var, const Expr& t) {
  if (const auto* v = e.as<Var>(); v && v->name == var) return t;
  if (const auto* a = e.as<App>(); a && a->args.size() == 1) {
    const auto* f = a->functor.as<Const>();
    const auto* v = a->args[0].as<Var>();
    if (f && f->name == "idx" && v && v->name == var) {
      auto i = index_of(t);
      return i ? index_occ(*i) : t;
    }
  }
  // Inner binders of the same name shadow the hole.
  if (const auto* l = e.as<Lam>(); l && l->var == var) return e;
  if (const auto* h = e.as<Hat>(); h && h->var == var) return e;
  return map_children(e, [&](const Expr& c) { return fill_hole(c, var, t); });
}

}  // namespace

namespace {

struct HatApplication {
  Expr body;
  Expr arg;
  std::string var;
  Expr result;
};

// Keyed by node identity; entries hold their nodes, so keys stay unique.
thread_local std::map<std::pair<const Node*, const Node*>, HatApplication>
    hat_cache;

Expr apply_uncached(const Hat& p, const Expr& t) {
  if (const auto* s = p.body.as<Substituted>()) {
    SubstitutionSet pairs;
    pairs.reserve(s->subs.size());
    for (const Pair& pr : s->subs) {
      pairs.push_back({fill_hole(pr.from, p.var, t), fill_hole(pr.to, p.var, t)});
    }
    return substituted(s->body, std::move(pairs));
  }
  return fill_hole(p.body, p.var, t);
}

}  // namespace

Expr hat_apply(const Hat& p, const Expr& t) {
  auto key = std::make_pair(p.body.get(), t.get());
  auto it = hat_cache.find(key);
  if (it != hat_cache.end() && it->second.var == p.var) return it->second.result;
  Expr result = apply_uncached(p, t);
  if (hat_cache.size() > 100000) hat_cache.clear();
  hat_cache[key] = {p.body, t, p.var, result};
  return result;
}

// ---------------------------------------------------------------------------

std::string format_path(const std::vector<int>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

std::vector<int> parse_path(std::string_view text) {
  std::vector<int> path;
  while (!text.empty()) {
    auto dot = text.find('.');
    auto part = text.substr(0, dot);
    int v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v < 0) {
      throw std::invalid_argument("bad path component '" + std::string(part) +
                                  "'");
    }
    path.push_back(v);
    if (dot == std::string_view::npos) break;
    text.remove_prefix(dot + 1);
  }
  return path;
}

namespace {

void positions(const Expr& e, std::vector<int>& path,
               std::vector<Position>& out) {
  out.push_back({path, Position::Kind::kExpr});
  auto child = [&](int i, const Expr& c) {
    path.push_back(i);
    positions(c, path, out);
    path.pop_back();
  };
  auto pseudo = [&](int i, Position::Kind kind) {
    path.push_back(i);
    out.push_back({path, kind});
    path.pop_back();
  };
  if (const auto* t = e.as<Term>()) {
    pseudo(0, Position::Kind::kTermIndex);
    child(1, t->restriction);
    child(2, t->context);
  } else if (const auto* s = e.as<Scoped>()) {
    pseudo(0, Position::Kind::kScopeList);
    child(1, s->body);
  } else if (const auto* l = e.as<Lam>()) {
    child(0, l->body);
  } else if (const auto* h = e.as<Hat>()) {
    child(0, h->body);
  } else if (const auto* s = e.as<Substituted>()) {
    child(0, s->body);
    for (std::size_t k = 0; k < s->subs.size(); ++k) {
      child(static_cast<int>(2 * k + 1), s->subs[k].from);
      child(static_cast<int>(2 * k + 2), s->subs[k].to);
    }
  } else if (const auto* a = e.as<App>()) {
    child(0, a->functor);
    for (std::size_t k = 0; k < a->args.size(); ++k) {
      child(static_cast<int>(k + 1), a->args[k]);
    }
  }
}

}  // namespace

std::vector<Position> topdown_positions(const Expr& e) {
  std::vector<Position> out;
  std::vector<int> path;
  positions(e, path, out);
  return out;
}

Expr subexpr_at(const Expr& root, const std::vector<int>& path) {
  Expr cur = root;
  for (int i : path) {
    auto bad = [&] {
      return std::out_of_range("path " + format_path(path) +
                               " does not address an expression");
    };
    if (const auto* t = cur.as<Term>()) {
      if (i == 0) {
        cur = index_occ(t->index);
      } else if (i == 1) {
        cur = t->restriction;
      } else if (i == 2) {
        cur = t->context;
      } else {
        throw bad();
      }
    } else if (const auto* s = cur.as<Scoped>()) {
      if (i != 1) throw bad();
      cur = s->body;
    } else if (const auto* l = cur.as<Lam>()) {
      if (i != 0) throw bad();
      cur = l->body;
    } else if (const auto* h = cur.as<Hat>()) {
      if (i != 0) throw bad();
      cur = h->body;
    } else if (const auto* s = cur.as<Substituted>()) {
      if (i == 0) {
        cur = s->body;
      } else if (static_cast<std::size_t>(i) <= 2 * s->subs.size()) {
        const Pair& p = s->subs[(i - 1) / 2];
        cur = (i % 2) ? p.from : p.to;
      } else {
        throw bad();
      }
    } else if (const auto* a = cur.as<App>()) {
      if (i == 0) {
        cur = a->functor;
      } else if (static_cast<std::size_t>(i) <= a->args.size()) {
        cur = a->args[i - 1];
      } else {
        throw bad();
      }
    } else {
      throw bad();
    }
  }
  return cur;
}

namespace {

void walk(const Expr& e, const std::function<void(const Expr&)>& visit) {
  visit(e);
  if (const auto* t = e.as<Term>()) {
    walk(t->restriction, visit);
    walk(t->context, visit);
  } else if (const auto* s = e.as<Scoped>()) {
    walk(s->body, visit);
  } else if (const auto* l = e.as<Lam>()) {
    walk(l->body, visit);
  } else if (const auto* h = e.as<Hat>()) {
    walk(h->body, visit);
  } else if (const auto* s = e.as<Substituted>()) {
    walk(s->body, visit);
    for (const Pair& p : s->subs) {
      walk(p.from, visit);
      walk(p.to, visit);
    }
  } else if (const auto* a = e.as<App>()) {
    walk(a->functor, visit);
    for (const Expr& x : a->args) walk(x, visit);
  }
}

}  // namespace

std::vector<Term> collect_terms(const Expr& e) {
  std::vector<Term> out;
  walk(e, [&](const Expr& n) {
    if (const auto* t = n.as<Term>()) out.push_back(*t);
  });
  return out;
}

std::vector<std::string> collect_metavars(const Expr& e) {
  std::vector<std::string> out;
  auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(name);
    }
  };
  walk(e, [&](const Expr& n) {
    if (const auto* s = n.as<Scoped>(); s && s->scope.metavar) {
      add(*s->scope.metavar);
    } else if (const auto* m = n.as<MetaVar>()) {
      add(m->name);
    }
  });
  return out;
}

std::set<Index> collect_indices(const Expr& e) {
  std::set<Index> out;
  walk(e, [&](const Expr& n) {
    if (auto i = index_of(n)) out.insert(*i);
    if (const auto* s = n.as<Scoped>()) {
      out.insert(s->scope.indices.begin(), s->scope.indices.end());
    }
  });
  return out;
}

Index fresh_index(const Index& base, const std::set<Index>& used) {
  std::string stem = base.name;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) {
    stem.pop_back();
  }
  if (stem.empty()) stem = base.name;
  for (int n = 1;; ++n) {
    Index candidate{stem + std::to_string(n)};
    if (candidate != base && !used.contains(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------

namespace {

class SyntacticRewriter {
 public:
  explicit SyntacticRewriter(const Resolution* res) : res_(res) {}

  Expr rewrite(const Expr& e, const SubstitutionSet& s) {
    Expr cur = reinterpret(e, s);
    if (const auto* m = cur.as<MetaVar>()) {
      if (res_) {
        if (auto it = res_->values.find(m->name); it != res_->values.end()) {
          return expand(m->name, it->second, s);
        }
      }
      return cur;
    }
    if (const auto* sc = cur.as<Scoped>()) {
      std::vector<Index> list;
      bool resolved = true;
      if (sc->scope.metavar) {
        const std::vector<Index>* bound = nullptr;
        if (res_) {
          auto it = res_->scopes.find(*sc->scope.metavar);
          if (it != res_->scopes.end()) bound = &it->second;
        }
        if (!bound) {
          resolved = false;
        } else {
          auto from = std::min(sc->scope.offset, bound->size());
          list.assign(bound->begin() + static_cast<std::ptrdiff_t>(from),
                      bound->end());
        }
      } else {
        list = sc->scope.indices;
      }
      Expr body = rewrite(sc->body, s);
      if (!resolved) return scoped(sc->scope, body);
      std::vector<Index> renamed;
      for (const Index& i : list) {
        Expr r = reinterpret(index_occ(i), s);
        const auto* occ = r.as<IndexOcc>();
        if (!occ) {
          throw std::invalid_argument("scope index #" + i.name +
                                      " rewritten to a non-index");
        }
        renamed.push_back(occ->index);
      }
      return scoped(std::move(renamed), body);
    }
    if (const auto* sub = cur.as<Substituted>()) {
      return rewrite(sub->body, subs_merge(sub->subs, s));
    }
    if (const auto* a = cur.as<App>()) {
      Expr f = reinterpret(a->functor, s);
      if (const auto* h = f.as<Hat>(); h && a->args.size() == 1) {
        return rewrite(hat_apply(*h, a->args[0]), s);
      }
      if (const auto* m = f.as<MetaVar>(); m && res_ && a->args.size() == 1) {
        auto it = res_->values.find(m->name);
        if (it != res_->values.end()) {
          if (const auto* h = it->second.as<Hat>()) {
            guard(m->name);
            Expr out = rewrite(hat_apply(*h, a->args[0]), s);
            expanding_.pop_back();
            return out;
          }
        }
      }
    }
    return map_children(cur, [&](const Expr& c) { return rewrite(c, s); });
  }

 private:
  Expr expand(const std::string& name, const Expr& value,
              const SubstitutionSet& s) {
    guard(name);
    Expr out = rewrite(value, s);
    expanding_.pop_back();
    return out;
  }

  void guard(const std::string& name) {
    if (std::find(expanding_.begin(), expanding_.end(), name) !=
        expanding_.end()) {
      throw CyclicSubstitution("?" + name + " re-enters its own resolution");
    }
    expanding_.push_back(name);
  }

  const Resolution* res_;
  std::vector<std::string> expanding_;
};

}  // namespace

Expr apply_subs_syntactic(const Expr& e, const SubstitutionSet& s,
                          const Resolution* res) {
  return SyntacticRewriter(res).rewrite(e, s);
}

}  // namespace qlf
