#include "generators.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace qlf::testing {

namespace {

int uniform(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool coin(Rng& rng, double p = 0.5) {
  return std::bernoulli_distribution(p)(rng);
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[uniform(rng, 0, static_cast<int>(v.size()) - 1)];
}

class QlfBuilder {
 public:
  QlfBuilder(Rng& rng, int max_terms) : rng_(rng) {
    n_ = uniform(rng, 1, max_terms);
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::shuffle(order_.begin(), order_.end(), rng_);
    rank_.resize(n_);
    for (int k = 0; k < n_; ++k) rank_[order_[k]] = k;
    split_ = n_ >= 2 && coin(rng_) ? uniform(rng_, 1, n_ - 1) : n_;
    // A term nests in the restriction of a term scoped after it.
    parent_.assign(n_, -1);
    for (int k = 0; k < n_; ++k) {
      std::vector<int> later;
      for (int j = 0; j < n_; ++j) {
        if (rank_[j] > rank_[k]) later.push_back(j);
      }
      if (!later.empty() && coin(rng_, 0.3)) parent_[k] = pick(rng_, later);
    }
  }

  Expr build() {
    std::vector<Index> outer;
    std::vector<Index> inner;
    for (int k = 0; k < n_; ++k) {
      (k < split_ ? outer : inner).push_back(index(order_[k]));
    }
    std::vector<int> first;
    std::vector<int> second;
    for (int t = 0; t < n_; ++t) {
      if (parent_[t] != -1) continue;
      if (rank_[t] >= split_ || (split_ < n_ && coin(rng_))) {
        second.push_back(t);
      } else {
        first.push_back(t);
      }
    }
    if (split_ == n_) {
      std::vector<int> all = first;
      all.insert(all.end(), second.begin(), second.end());
      return scoped(outer, formula(all, outer_allowed(n_), {}));
    }
    Expr a = formula(first, outer_allowed(split_), {});
    Expr b = scoped(inner, formula(second, outer_allowed(n_), {}));
    if (coin(rng_, 0.25)) b = apply("not", {b});
    return scoped(outer, apply(coin(rng_) ? "and" : "or", {a, b}));
  }

 private:
  static Index index(int t) { return Index{"t" + std::to_string(t)}; }

  // Terms scoped at the first `upto` positions of the order.
  std::vector<int> outer_allowed(int upto) const {
    return std::vector<int>(order_.begin(), order_.begin() + upto);
  }

  Expr make_term(int t) {
    std::string x = "x" + std::to_string(t);
    std::vector<int> nested;
    for (int k = 0; k < n_; ++k) {
      if (parent_[k] == t) nested.push_back(k);
    }
    std::vector<int> allowed;
    for (int k = 0; k < n_; ++k) {
      if (rank_[k] < rank_[t]) allowed.push_back(k);
    }
    Expr restriction = formula(nested, allowed, {x}, x);
    std::string c = "c" + std::to_string(t);
    Expr context;
    switch (uniform(rng_, 0, 2)) {
      case 0:
        context = apply("eq", {variable(c), variable(c)});
        break;
      case 1:
        context = apply("q", {variable(c)});
        break;
      default:
        context = apply("not", {apply("p", {variable(c)})});
        break;
    }
    Term term_data;
    term_data.index = index(t);
    term_data.category = Category{"np", {}};
    term_data.quant = coin(rng_) ? Quant::kExists : Quant::kForall;
    term_data.restriction = lambda(x, restriction);
    term_data.context = lambda(c, context);
    return term(std::move(term_data));
  }

  Expr filler(const std::vector<int>& allowed,
              const std::vector<std::string>& vars) {
    int choice = uniform(rng_, 0, 9);
    if (!vars.empty() && choice < 4) return variable(pick(rng_, vars));
    if (!allowed.empty() && choice < 8) return index_occ(index(pick(rng_, allowed)));
    if (choice == 9) return string_literal("k");
    return constant("a");
  }

  // Places every term of `place` once; other slots are fillers. When
  // `anchor` is set the first atom is about it.
  Expr formula(const std::vector<int>& place, const std::vector<int>& allowed,
               const std::vector<std::string>& vars, std::string anchor = {}) {
    int atoms = std::max<int>(1, (static_cast<int>(place.size()) + 1) / 2) +
                uniform(rng_, 0, 1);
    std::vector<std::vector<Expr>> slots(atoms);
    for (int t : place) {
      int k = uniform(rng_, 0, atoms - 1);
      while (slots[k].size() >= 2) k = (k + 1) % atoms;
      slots[k].push_back(make_term(t));
    }
    std::vector<Expr> parts;
    for (int k = 0; k < atoms; ++k) {
      std::vector<Expr>& args = slots[k];
      if (k == 0 && !anchor.empty()) args.insert(args.begin(), variable(anchor));
      bool binary = args.size() >= 2 || coin(rng_, 0.4);
      while (args.size() < (binary ? 2u : 1u)) args.push_back(filler(allowed, vars));
      if (args.size() > 2) {
        parts.push_back(apply("and", {apply("r", {args[0], args[1]}),
                                      apply("p", {args[2]})}));
        continue;
      }
      std::shuffle(args.begin(), args.end(), rng_);
      std::string pred = binary ? (coin(rng_, 0.7) ? "r" : "eq")
                                : (coin(rng_) ? "p" : "q");
      Expr atom = apply(pred, args);
      if (coin(rng_, 0.2)) atom = apply("not", {atom});
      parts.push_back(atom);
    }
    while (parts.size() > 1) {
      std::size_t i = uniform(rng_, 0, static_cast<int>(parts.size()) - 2);
      Expr joined = apply(coin(rng_, 0.6) ? "and" : "or", {parts[i], parts[i + 1]});
      parts.erase(parts.begin() + i, parts.begin() + i + 2);
      parts.insert(parts.begin() + i, joined);
    }
    return parts[0];
  }

  Rng& rng_;
  int n_ = 0;
  int split_ = 0;
  std::vector<int> order_;
  std::vector<int> rank_;
  std::vector<int> parent_;
};

}  // namespace

Expr random_scoped_qlf(Rng& rng, int max_terms) {
  return QlfBuilder(rng, max_terms).build();
}

ModelSpec random_model(Rng& rng, int max_domain) {
  ModelSpec m;
  int n = uniform(rng, 1, max_domain);
  for (int i = 0; i < n; ++i) m.domain.push_back("d" + std::to_string(i));
  m.constants["a"] = pick(rng, m.domain);
  for (const char* pred : {"p", "q"}) {
    auto& ext = m.predicates[{pred, 1}];
    for (const std::string& d : m.domain) {
      if (coin(rng)) ext.insert({Atom{d, false}});
    }
  }
  auto& r = m.predicates[{"r", 2}];
  for (const std::string& d : m.domain) {
    for (const std::string& e : m.domain) {
      if (coin(rng, 0.4)) r.insert({Atom{d, false}, Atom{e, false}});
    }
  }
  return m;
}

std::vector<Expr> substitution_pool() {
  std::vector<Expr> pool;
  for (const char* i : {"a", "b", "c", "d"}) pool.push_back(index_occ(Index{i}));
  for (const char* c : {"j", "m"}) pool.push_back(constant(c));
  pool.push_back(variable("x"));
  for (const char* i : {"a", "b"}) {
    Term t;
    t.index = Index{i};
    t.category = Category{"np", {}};
    t.restriction = lambda("y", apply("man", {variable("y")}));
    t.context = lambda("y", apply("eq", {variable("y"), variable("y")}));
    pool.push_back(term(std::move(t)));
  }
  return pool;
}

SubstitutionSet random_subs(Rng& rng, const std::vector<Expr>& pool,
                            int max_pairs) {
  SubstitutionSet out;
  int n = uniform(rng, 0, max_pairs);
  std::vector<std::size_t> olds(pool.size());
  std::iota(olds.begin(), olds.end(), 0);
  std::shuffle(olds.begin(), olds.end(), rng);
  for (int k = 0; k < n && k < static_cast<int>(olds.size()); ++k) {
    out.push_back({pool[olds[k]], pick(rng, pool)});
  }
  return out;
}

}  // namespace qlf::testing
