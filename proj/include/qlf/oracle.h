#ifndef QLF_ORACLE_H_
#define QLF_ORACLE_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlf/ast.h"
#include "qlf/model.h"

namespace qlf {

// First-order formulas with restricted generalized quantifiers.
struct GqTerm {
  enum class Kind { kVar, kConst, kLiteral };
  Kind kind = Kind::kVar;
  std::string name;
};

struct GqFormula;
using GqPtr = std::shared_ptr<const GqFormula>;

struct GqFormula {
  enum class Kind { kPred, kEq, kAnd, kOr, kNot, kSome, kEvery };
  Kind kind = Kind::kPred;
  std::string name;           // predicate name, or the bound variable
  std::vector<GqTerm> args;   // kPred, kEq
  std::vector<GqPtr> parts;   // connectives; quantifiers: restriction, scope
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Translates a QLF whose scope nodes carry explicit index lists and which has
// no meta-variables, substitutions or hat abstractions. Throws OracleError
// for anything else, including terms left undischarged.
GqPtr translate_to_gq(const Expr& qlf);

// Brute force over the model's domain: some(R, S) iff R and S intersect,
// every(R, S) iff R is a subset of S.
bool oracle_evaluate(const GqPtr& f, const ModelSpec& m);

std::string print_gq(const GqPtr& f);

}  // namespace qlf

#endif  // QLF_ORACLE_H_
