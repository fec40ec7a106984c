#ifndef QLF_SCOPING_H_
#define QLF_SCOPING_H_

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qlf/ast.h"

namespace qlf {

// Instantiation of scope meta-variables.
struct ScopeAssignment {
  std::map<std::string, std::vector<Index>> lists;

  friend auto operator<=>(const ScopeAssignment&,
                          const ScopeAssignment&) = default;
};

std::string format_assignment(const ScopeAssignment& a);

enum class Verdict { kOk, kUndischarged, kVacuous, kCyclic, kUnresolved };

std::string_view verdict_name(Verdict v);

struct Diagnosis {
  Verdict verdict = Verdict::kOk;
  std::set<Index> indices;  // undischarged or vacuous indices
  std::string detail;

  bool ok() const { return verdict == Verdict::kOk; }
};

// "ok", "undischarged{#b}", "vacuous{#h}", "cyclic", ...
std::string format_diagnosis(const Diagnosis& d);

// Symbolic discharge pass over `e` with every meta-variable taken from `res`.
Diagnosis check_interpretable(const Expr& e, const Resolution& res);
Diagnosis check_interpretable(const Expr& e, const ScopeAssignment& a,
                              const Resolution& res = {});

class ScopingCapExceeded : public std::runtime_error {
 public:
  explicit ScopingCapExceeded(std::size_t cap)
      : std::runtime_error("more than " + std::to_string(cap) +
                           " interpretable scopings") {}
};

struct EnumerationOptions {
  std::size_t cap = 10000;
  // Candidate values for unbound ellipsis/context meta-variables. Unbound
  // value meta-variables without candidates make a branch unresolved.
  std::map<std::string, std::vector<Expr>> value_options;
};

// Every interpretable completion of `res`: unbound scope meta-variables get
// index lists, unbound value meta-variables listed in `opts` get one of their
// candidates. Scope meta-variables the discharge pass never reaches get [].
// Sorted by (scopes, printed values).
std::vector<Resolution> enumerate_completions(const Expr& e,
                                              const Resolution& res,
                                              const EnumerationOptions& opts);

// Every instantiation the enumerator tries, interpretable or not, with the
// diagnosis of each. A run stops branching at its first defect and completes
// with empty lists and first value options. Keyed like enumerate_completions.
std::vector<std::pair<Resolution, Diagnosis>> enumerate_diagnosed(
    const Expr& e, const Resolution& res, const EnumerationOptions& opts = {});

// Why no completion of `res` is interpretable: the least severe diagnosis
// over every instantiation the enumerator would try.
Diagnosis explain_rejection(const Expr& e, const Resolution& res,
                            const EnumerationOptions& opts = {});

// Interpretable instantiations of the unbound scope meta-variables of `e`.
// Lexicographic in (meta-variable name, list).
std::vector<ScopeAssignment> enumerate_scopings(const Expr& e,
                                                const Resolution& res = {},
                                                std::size_t cap = 10000);

}  // namespace qlf

#endif  // QLF_SCOPING_H_
