#ifndef QLF_ELLIPSIS_H_
#define QLF_ELLIPSIS_H_

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlf/ast.h"

namespace qlf {

class BadParallelAnnotation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoSubject : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AmbiguousParallel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParallelPair {
  Index antecedent;
  Index ellipsis;

  friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

// One ellipsis site: the meta-variable applied to the explicit ellipsis term,
// and the annotated antecedent.
struct EllipsisSite {
  std::string metavar;
  std::vector<int> antecedent_path;
  std::vector<ParallelPair> parallel;  // empty: identify from role features
  std::optional<Category> category;
  std::optional<Category> antecedent_category;
};

enum class Identity { kStrict, kSloppy };

std::string_view identity_name(Identity i);

struct EllipsisSolution {
  std::vector<int> antecedent_path;
  SubstitutionSet pairs;  // with the explicit ellipsis term filled in
  std::map<Index, Identity> choicetrace;
  Expr predicate;  // hat($T, sub(A, pairs with the hole))
};

// "#h:strict #b:sloppy"
std::string format_choicetrace(const std::map<Index, Identity>& trace);

struct ParallelResult {
  std::vector<ParallelPair> pairs;
  std::vector<Term> non_parallel;
};

// Pairs antecedent terms with explicit ellipsis terms by grammatical role:
// the antecedent subject for VP-ellipsis, the matching role otherwise.
ParallelResult identify_parallel(const Expr& antecedent,
                                 const Category& ellipsis_category,
                                 const std::vector<Term>& ellipsis_terms);

// Priority union: ellipsis features win where specified; an elliptical kind
// takes the antecedent's kind (vp_ellipsis -> vp).
Category merge_categories(const Category& ellipsis, const Category& antecedent);

// Everything solve_equation needs about one site, with fresh indices already
// drawn for its non-parallel terms.
struct SitePlan {
  EllipsisSite site;
  Expr antecedent;
  Term antecedent_term;  // parallel to the explicit ellipsis term
  Expr ellipsis_term;
  std::vector<Term> non_parallel;
  std::vector<Index> fresh;  // sloppy index for each non-parallel term
};

// The ellipsis sites of one discourse. Fresh indices are allocated in site
// order, one per non-parallel term whatever the eventual choice, so every
// solution of every site is fixed before any meta-variable is resolved.
class EllipsisPlan {
 public:
  EllipsisPlan(const Expr& qlf, std::vector<EllipsisSite> sites);

  const Expr& qlf() const { return qlf_; }
  const std::vector<SitePlan>& sites() const { return plans_; }
  const SitePlan* find(const std::string& metavar) const;

  // 2^k strict/sloppy combinations over the k non-parallel terms of site
  // `k`. With `extended_strict`, terms that nested ellipses inside the
  // antecedent re-index are further strict-only candidates.
  std::vector<EllipsisSolution> solve(std::size_t k,
                                      bool extended_strict = false) const;

 private:
  Expr qlf_;
  std::vector<SitePlan> plans_;
};

// Single-site convenience over EllipsisPlan.
std::vector<EllipsisSolution> solve_equation(const Expr& qlf,
                                             const EllipsisSite& site,
                                             bool extended_strict = false);

// Name of the hole variable in ellipsis predicates.
inline constexpr const char* kHole = "T";

}  // namespace qlf

#endif  // QLF_ELLIPSIS_H_
