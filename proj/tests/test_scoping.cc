#include <algorithm>

#include "doctest.h"
#include "fixtures.h"
#include "qlf/ellipsis.h"
#include "qlf/evaluator.h"
#include "qlf/scoping.h"
#include "qlf/text.h"

using namespace qlf;

namespace {

Expr predicate(const CorpusCase& c, const std::map<std::string, Identity>& want) {
  for (const auto& s : solve_equation(c.qlf, c.sites.at(0))) {
    bool match = std::all_of(want.begin(), want.end(), [&](const auto& w) {
      return s.choicetrace.at(Index{w.first}) == w.second;
    });
    if (match) return s.predicate;
  }
  FAIL("no such solution");
  return {};
}

ScopeAssignment assignment(std::map<std::string, std::vector<Index>> lists) {
  return ScopeAssignment{std::move(lists)};
}

bool contains(const std::vector<ScopeAssignment>& v, const ScopeAssignment& a) {
  return std::find(v.begin(), v.end(), a) != v.end();
}

std::vector<ModelSpec> small_models(const CorpusCase& c) {
  std::vector<ModelSpec> out;
  for (ModelSpec& m : make_battery(c)) {
    if (m.domain.size() <= 3) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

TEST_CASE("scope parallelism in the flag sentence") {
  const CorpusCase& flag = testing::corpus_case("flag");
  Resolution sloppy;
  sloppy.values["P"] = predicate(flag, {{"h", Identity::kSloppy}});
  auto s = enumerate_scopings(flag.qlf, sloppy);
  CHECK(contains(s, assignment({{"S1", {}}, {"S2", {{"h"}, {"c"}}}})));
  CHECK(contains(s, assignment({{"S1", {}}, {"S2", {{"c"}, {"h"}}}})));

  Resolution strict;
  strict.values["P"] = predicate(flag, {{"h", Identity::kStrict}});
  auto t = enumerate_scopings(flag.qlf, strict);
  CHECK(contains(t, assignment({{"S1", {{"h"}}}, {"S2", {{"c"}}}})));

  for (const Resolution& r : {sloppy, strict}) {
    ScopeAssignment wide_c = assignment({{"S1", {{"c"}}}, {"S2", {{"h"}}}});
    CHECK_FALSE(check_interpretable(flag.qlf, wide_c, r).ok());
    CHECK_FALSE(contains(enumerate_scopings(flag.qlf, r), wide_c));
  }
}

TEST_CASE("diagnoses") {
  Expr ex8 = parse_expr(
      "[#m]:sleep(term(#m, np[], exists, lam($y, name($y, \"Mary\")), "
      "lam($y, eq($y, m_jones))))");
  CHECK(check_interpretable(ex8, Resolution{}).ok());

  const CorpusCase& book = testing::corpus_case("book");
  Resolution strict_book;
  strict_book.values["P"] =
      predicate(book, {{"b", Identity::kStrict}, {"h", Identity::kStrict}});
  Diagnosis d = check_interpretable(
      book.qlf, assignment({{"S0", {}}, {"S1", {{"j"}, {"h"}, {"b"}}}, {"S2", {{"s"}}}}),
      strict_book);
  CHECK(d.verdict == Verdict::kUndischarged);
  CHECK(d.indices == std::set<Index>{{"b"}});

  const CorpusCase& acd = testing::corpus_case("acd");
  Resolution sloppy;
  sloppy.values["P"] = predicate(acd, {{"p", Identity::kSloppy}});
  CHECK(explain_rejection(acd.qlf, sloppy).verdict == Verdict::kCyclic);
  CHECK(enumerate_scopings(acd.qlf, sloppy).empty());
}

TEST_CASE("every ordering of mutually scopable terms") {
  Expr e = parse_expr(
      "?S:r3(term(#a, np[], exists, lam($x, p($x)), lam($x, p($x))), "
      "term(#b, np[], forall, lam($x, q($x)), lam($x, q($x))), "
      "term(#c, np[], exists, lam($x, p($x)), lam($x, q($x))))");
  auto s = enumerate_scopings(e);
  CHECK(s.size() == 6);
  for (const ScopeAssignment& a : s) CHECK(a.lists.at("S").size() == 3);

  Expr two_nodes = parse_expr(
      "?S1:and(?S2:p(term(#a, np[], exists, lam($x, p($x)), lam($x, p($x)))), "
      "q(term(#b, np[], forall, lam($x, q($x)), lam($x, q($x)))))");
  auto t = enumerate_scopings(two_nodes);
  // #b only at the root; #a at either node and on either side of #b.
  CHECK(t.size() == 3);
  CHECK(contains(t, assignment({{"S1", {{"b"}}}, {"S2", {{"a"}}}})));
  CHECK(contains(t, assignment({{"S1", {{"a"}, {"b"}}}, {"S2", {}}})));
  CHECK(contains(t, assignment({{"S1", {{"b"}, {"a"}}}, {"S2", {}}})));
}

TEST_CASE("the enumeration cap is an error") {
  Expr e = parse_expr(
      "?S:r3(term(#a, np[], exists, lam($x, p($x)), lam($x, p($x))), "
      "term(#b, np[], forall, lam($x, q($x)), lam($x, q($x))), "
      "term(#c, np[], exists, lam($x, p($x)), lam($x, q($x))))");
  CHECK_THROWS_AS(enumerate_scopings(e, {}, 5), ScopingCapExceeded);
}

TEST_CASE("scopings agree with the evaluator on the corpus") {
  for (const CorpusCase& c : testing::corpus()) {
    if (c.id == "cascaded") continue;  // covered by the acceptance run
    CAPTURE(c.id);
    auto models = small_models(c);
    EnumerationOptions eo;
    eo.value_options = c.contexts;
    for (const Resolution& base : testing::solution_combinations(c)) {
      for (const auto& [r, d] : enumerate_diagnosed(c.qlf, base, eo)) {
        std::set<Index> listed;
        for (const auto& [name, list] : r.scopes) {
          for (const Index& i : list) {
            CHECK_FALSE(listed.contains(i));
            listed.insert(i);
          }
        }
        for (const ModelSpec& m : models) {
          CHECK(evaluate(c.qlf, m, r).interpretable() == d.ok());
        }
      }
    }
  }
}

TEST_CASE("enumeration is deterministic") {
  const CorpusCase& book = testing::corpus_case("book");
  for (const Resolution& base : testing::solution_combinations(book)) {
    CHECK(enumerate_completions(book.qlf, base, {}) ==
          enumerate_completions(book.qlf, base, {}));
    auto s = enumerate_scopings(book.qlf, base);
    CHECK(std::is_sorted(s.begin(), s.end()));
  }
}
