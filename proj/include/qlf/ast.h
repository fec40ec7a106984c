#ifndef QLF_AST_H_
#define QLF_AST_H_

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qlf {

// Term identifier. Names are unique within one discourse.
struct Index {
  std::string name;

  friend auto operator<=>(const Index&, const Index&) = default;
};

// Feature structure attached to terms and ellipsis sites. A feature whose
// value is std::nullopt is unspecified ("_" in the text syntax).
struct Category {
  using Value = std::optional<std::string>;

  std::string kind;
  std::vector<std::pair<std::string, Value>> features;

  // Returns nullptr when the feature is absent (as opposed to unspecified).
  const Value* find(std::string_view feature) const;
  void set(const std::string& feature, Value value);

  friend bool operator==(const Category&, const Category&) = default;
};

enum class Quant { kExists, kForall };

std::string_view quant_name(Quant q);

struct Node;

// Immutable, shareable handle to a QLF expression node. Equality is
// structural; each node caches a hash so unequal trees usually compare in
// constant time.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }
  const Node* get() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  template <class T>
  const T* as() const;
  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  std::size_t hash() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  static bool deep_equal(const Node& a, const Node& b);

  std::shared_ptr<const Node> node_;
};

struct Const {
  std::string name;
};
struct StrLit {
  std::string text;
};
struct Var {
  std::string name;
};
struct IndexOcc {
  Index index;
};
struct MetaVar {
  std::string name;
};

struct Term {
  Index index;
  Category category;
  Quant quant = Quant::kExists;
  Expr restriction;
  Expr context;  // a property, or a MetaVar for an unresolved context
};

// Scope prefix of a formula: either an explicit index list or a scope
// meta-variable. `offset` only appears on nodes built during evaluation to
// mean "the remainder of the meta-variable's list after `offset` entries".
struct Scope {
  std::optional<std::string> metavar;
  std::vector<Index> indices;
  std::size_t offset = 0;
};

struct Scoped {
  Scope scope;
  Expr body;
};
struct Lam {
  std::string var;
  Expr body;
};
struct Hat {
  std::string var;
  Expr body;
};

struct Pair {
  Expr from;
  Expr to;

  friend bool operator==(const Pair&, const Pair&) = default;
};
using SubstitutionSet = std::vector<Pair>;

struct Substituted {
  Expr body;
  SubstitutionSet subs;
};
struct App {
  Expr functor;
  std::vector<Expr> args;
};

using NodeData = std::variant<Const, StrLit, Var, IndexOcc, MetaVar, Term,
                              Scoped, Lam, Hat, Substituted, App>;

struct Node {
  NodeData data;
  std::size_t hash = 0;
};

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_ || a.node_->hash != b.node_->hash) return false;
  return Expr::deep_equal(*a.node_, *b.node_);
}

template <class T>
const T* Expr::as() const {
  return node_ ? std::get_if<T>(&node_->data) : nullptr;
}

// Builders. All of them compute the structural hash eagerly.
Expr constant(std::string name);
Expr string_literal(std::string text);
Expr variable(std::string name);
Expr index_occ(Index index);
Expr metavar(std::string name);
Expr term(Term t);
Expr scoped(Scope scope, Expr body);
Expr scoped(std::vector<Index> indices, Expr body);
Expr scoped(std::string metavar_name, Expr body);
Expr lambda(std::string var, Expr body);
Expr hat(std::string var, Expr body);
Expr substituted(Expr body, SubstitutionSet subs);
Expr apply(Expr functor, std::vector<Expr> args);
Expr apply(std::string functor, std::vector<Expr> args);

// Index of a term or index occurrence; nullopt for anything else.
std::optional<Index> index_of(const Expr& e);

// Term `t` with its own index replaced; restriction and context unchanged.
Expr reindexed(const Term& t, Index index);

// Thrown by syntactic operations that would loop forever.
class CyclicSubstitution : public std::runtime_error {
 public:
  explicit CyclicSubstitution(const std::string& what)
      : std::runtime_error("cyclic substitution: " + what) {}
};

// ---------------------------------------------------------------------------
// Substitution sets.

// Returns the replacement for `old` if some pair rewrites it.
const Expr* lookup(const SubstitutionSet& subs, const Expr& old);

// Left-priority union: all of `left`, plus the pairs of `right` whose old
// component `left` does not already rewrite.
SubstitutionSet subs_merge(const SubstitutionSet& left,
                           const SubstitutionSet& right);

// Follows substitution pairs from `e` until nothing fires. A term whose own
// index is rewritten to another index is re-indexed (sloppy identity). Throws
// CyclicSubstitution if the chain revisits a value.
Expr reinterpret(const Expr& e, const SubstitutionSet& subs);

// ---------------------------------------------------------------------------
// Meta-variable instantiations. Bindings live beside the expression rather
// than inside it, so every occurrence of a meta-variable is re-entrant.

struct Resolution {
  std::map<std::string, std::vector<Index>> scopes;
  std::map<std::string, Expr> values;  // ellipsis predicates and contexts

  bool bound(const std::string& name) const {
    return scopes.contains(name) || values.contains(name);
  }
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

// Fills the hole of a hat abstraction with term `t`: occurrences of the hole
// variable become `t` and idx(hole) becomes `t`'s index.
Expr hat_apply(const Hat& p, const Expr& t);

// ---------------------------------------------------------------------------
// Traversal.

struct Position {
  enum class Kind { kExpr, kScopeList, kTermIndex };
  std::vector<int> path;
  Kind kind = Kind::kExpr;

  friend bool operator==(const Position&, const Position&) = default;
};

std::string format_path(const std::vector<int>& path);
std::vector<int> parse_path(std::string_view text);

// Pre-order positions. Child numbering: App functor 0, args 1..n; Scoped
// scope list 0, body 1; Term index 0, restriction 1, context 2; Lam/Hat body
// 0; Substituted body 0, then old/new of pair k at 2k+1 / 2k+2.
std::vector<Position> topdown_positions(const Expr& e);

// Subexpression at an expression path; throws std::out_of_range.
Expr subexpr_at(const Expr& root, const std::vector<int>& path);

std::vector<Term> collect_terms(const Expr& e);
std::vector<std::string> collect_metavars(const Expr& e);
std::set<Index> collect_indices(const Expr& e);

// Smallest positive numeric suffix on `base`'s stem that is neither in
// `used` nor `base` itself (b -> b1, b1 -> b2).
Index fresh_index(const Index& base, const std::set<Index>& used);

// Rewrites `e` top-down under `s`, cashing out nested substitutions and, when
// `res` is given, bound meta-variables. Throws CyclicSubstitution.
Expr apply_subs_syntactic(const Expr& e, const SubstitutionSet& s,
                          const Resolution* res = nullptr);

}  // namespace qlf

#endif  // QLF_AST_H_
