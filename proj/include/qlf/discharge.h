#ifndef QLF_DISCHARGE_H_
#define QLF_DISCHARGE_H_

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlf/ast.h"

namespace qlf {

// Why a QLF has no value.
enum class Failure {
  kUndischargedTerm,
  kUndischargedIndex,
  kVacuousScope,
  kCyclic,
  kRefOnIndex,
  kUnresolved,
  kFreeVariable,
};

std::string_view failure_name(Failure f);

// Raised inside evaluation passes; callers turn it into a "no value" result.
class Uninterpretable : public std::runtime_error {
 public:
  Uninterpretable(Failure reason, const std::string& detail)
      : std::runtime_error(std::string(failure_name(reason)) +
                           (detail.empty() ? "" : ": " + detail)),
        reason_(reason),
        detail_(detail) {}

  Failure reason() const { return reason_; }
  const std::string& detail() const { return detail_; }

 private:
  Failure reason_;
  std::string detail_;
};

// The hat predicate a functor denotes, if any: a literal hat abstraction or a
// meta-variable bound to one. `name` receives the meta-variable name.
const Hat* ellipsis_predicate(const Expr& functor, const Resolution& res,
                              std::string* name);

// Finds the term a scope node headed by `target` discharges: the first term
// in a top-down pass over `body` whose value under `subs` (after substitution
// chains, and inside substituted and ellipsis material under the merged
// directives) is a term with index `target`. Returns that effective term.
std::optional<Expr> locate_term(const Expr& body, const SubstitutionSet& subs,
                                const Resolution& res, const Index& target);

// Indices of every term locate_term could find in `body`.
std::set<Index> locatable_indices(const Expr& body, const SubstitutionSet& subs,
                                  const Resolution& res);

// Meta-variables reachable from `e`, following bound meta-variables into
// their values. Order is first occurrence.
std::vector<std::string> reachable_metavars(const Expr& e,
                                            const Resolution& res);

// Scope meta-variables among reachable_metavars that `res` leaves unbound.
std::vector<std::string> unbound_scope_metavars(const Expr& e,
                                                const Resolution& res);

}  // namespace qlf

#endif  // QLF_DISCHARGE_H_
