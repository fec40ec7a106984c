#include "doctest.h"
#include "fixtures.h"
#include "generators.h"
#include "qlf/text.h"

using namespace qlf;

TEST_CASE("parsing the antecedent of a VP ellipsis") {
  Expr e = parse_expr(
      "[#j]:sleep(term(#j, np[], exists, lam($y,name($y,\"John\")), "
      "lam($y,eq($y,j_smith))))");
  const auto* s = e.as<Scoped>();
  REQUIRE(s);
  CHECK(s->scope.indices == std::vector<Index>{{"j"}});
  const auto* a = s->body.as<App>();
  REQUIRE(a);
  CHECK(a->functor == constant("sleep"));
  const auto* t = a->args.at(0).as<Term>();
  REQUIRE(t);
  CHECK(t->index == Index{"j"});
  CHECK(t->quant == Quant::kExists);
  CHECK(t->restriction ==
        lambda("y", apply("name", {variable("y"), string_literal("John")})));
  CHECK(t->context == lambda("y", apply("eq", {variable("y"), constant("j_smith")})));
}

TEST_CASE("parsing an unresolved ellipsis") {
  Expr e = parse_expr(
      "?P(term(#m, np[], exists, lam($y,name($y,\"Mary\")), "
      "lam($y,eq($y,m_jones))))");
  const auto* a = e.as<App>();
  REQUIRE(a);
  CHECK(a->functor == metavar("P"));
  CHECK(a->args.at(0).is<Term>());
}

TEST_CASE("parsing substitutions") {
  Expr e = parse_expr("sub(p(a), {a/b})");
  CHECK(e == substituted(apply("p", {constant("a")}), {{constant("a"), constant("b")}}));
  CHECK(parse_expr(print_expr(e)) == e);
}

TEST_CASE("printing") {
  CHECK(print_expr(constant("j_smith")) == "j_smith");
  CHECK(print_expr(scoped("S2", apply("hang", {constant("a")}))).rfind("?S2:", 0) == 0);
  CHECK(print_expr(lambda("y", apply("p", {variable("y")}))) == "lam($y, p($y))");
}

TEST_CASE("round trip") {
  for (const CorpusCase& c : testing::corpus()) {
    CAPTURE(c.id);
    CHECK(parse_expr(print_expr(c.qlf)) == c.qlf);
  }
  testing::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    Expr q = testing::random_scoped_qlf(rng);
    CHECK(parse_expr(print_expr(q)) == q);
  }
  Expr h = parse_expr("hat($T, sub(p(term(#a, vp_ellipsis[tense=inf,perfect=_], forall, "
                      "lam($x, q($x)), ?C)), {#a/idx($T)}))");
  CHECK(parse_expr(print_expr(h)) == h);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_expr("p(a,\n  b");
    FAIL("accepted");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_expr("p(#)"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("term(#a, np[], most, lam($x, p($x)), lam($x, p($x)))"),
                  SyntaxError);
}

TEST_CASE("well-formedness") {
  CHECK_THROWS_AS(parse_expr("and(term(#a, np[], exists, lam($x, p($x)), lam($x, p($x))), "
                             "term(#a, np[], exists, lam($x, q($x)), lam($x, p($x))))"),
                  DuplicateIndex);
  CHECK_THROWS_AS(parse_expr("[#z]:p(a)"), WellFormednessError);
}

TEST_CASE("models") {
  ModelSpec m = parse_model(
      "domain: m_jones\npred sleep/1: {(m_jones)}\npred name/2: {(m_jones,\"Mary\")}");
  CHECK(m.domain == std::vector<std::string>{"m_jones"});
  CHECK(m.holds("sleep", {Atom{"m_jones", false}}));
  CHECK(m.holds("name", {Atom{"m_jones", false}, Atom{"Mary", true}}));

  ModelSpec empty = parse_model("domain: a\npred sleep/1: {}");
  REQUIRE(empty.predicates.contains({"sleep", 1}));
  CHECK(empty.predicates.at({"sleep", 1}).empty());

  ModelSpec dup = parse_model("domain: a\npred p/1: {(a), (a)}");
  CHECK(dup.predicates.at({"p", 1}).size() == 1);

  CHECK_THROWS_AS(parse_model("domain: a\npred p/2: {(a)}"), ArityMismatch);
  CHECK_THROWS_AS(parse_model("domain: a\npred p/1: {(b)}"), UnknownEntity);

  testing::Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    ModelSpec r = testing::random_model(rng);
    CHECK(parse_model(print_model(r)) == r);
  }
}
