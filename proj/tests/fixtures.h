#ifndef QLF_TESTS_FIXTURES_H_
#define QLF_TESTS_FIXTURES_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "qlf/harness.h"

namespace qlf::testing {

inline const std::vector<CorpusCase>& corpus() {
  static const std::vector<CorpusCase> cases = load_corpus(QLF_CORPUS_DIR);
  return cases;
}

inline const CorpusCase& corpus_case(const std::string& id) {
  for (const CorpusCase& c : corpus()) {
    if (c.id == id) return c;
  }
  throw std::out_of_range("no corpus case " + id);
}

// One resolution per combination of site solutions, binding only the
// ellipsis meta-variables.
inline std::vector<Resolution> solution_combinations(const CorpusCase& c,
                                                     bool extended_strict = false) {
  EllipsisPlan plan(c.qlf, c.sites);
  std::vector<Resolution> out{Resolution{}};
  for (std::size_t k = 0; k < plan.sites().size(); ++k) {
    std::vector<Resolution> next;
    for (const Resolution& r : out) {
      for (const EllipsisSolution& s : plan.solve(k, extended_strict)) {
        Resolution n = r;
        n.values[plan.sites()[k].site.metavar] = s.predicate;
        next.push_back(std::move(n));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace qlf::testing

#endif  // QLF_TESTS_FIXTURES_H_
