#ifndef QLF_TESTS_GENERATORS_H_
#define QLF_TESTS_GENERATORS_H_

#include <random>
#include <vector>

#include "qlf/ast.h"
#include "qlf/model.h"

namespace qlf::testing {

using Rng = std::mt19937_64;

// A fully scoped QLF over p/1, q/1, r/2, the constant a and the literal "k",
// with 1..max_terms quantified terms. Terms may nest in restrictions and
// restrictions may mention indices scoped further out; scope lists sit on
// the root or split between the root and an inner conjunct.
Expr random_scoped_qlf(Rng& rng, int max_terms = 3);

// A model for that vocabulary with 1..max_domain entities.
ModelSpec random_model(Rng& rng, int max_domain = 3);

// Small expressions: index occurrences, constants, variables and terms.
std::vector<Expr> substitution_pool();

// Up to `max_pairs` pairs drawn from `pool` with pairwise distinct old sides.
SubstitutionSet random_subs(Rng& rng, const std::vector<Expr>& pool,
                            int max_pairs = 4);

}  // namespace qlf::testing

#endif  // QLF_TESTS_GENERATORS_H_
