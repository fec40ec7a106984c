// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--known-failures N,M,...]
//
// Exits 0 when the failing criteria are exactly the listed known failures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.h"
#include "generators.h"
#include "qlf/ellipsis.h"
#include "qlf/evaluator.h"
#include "qlf/oracle.h"
#include "qlf/scoping.h"
#include "qlf/text.h"

using namespace qlf;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail = what;
    ok = false;
  }
};

// Renames every index to its order of first appearance.
Expr canonical(const Expr& e) {
  SubstitutionSet renaming;
  int n = 0;
  for (const Index& i : collect_indices(e)) {
    renaming.push_back({index_occ(i), index_occ({"%" + std::to_string(n++)})});
  }
  Expr once = apply_subs_syntactic(e, renaming);
  // collect_indices is name-ordered; re-run so the result follows positions.
  std::vector<Index> order;
  for (const Position& p : topdown_positions(once)) {
    if (p.kind != Position::Kind::kTermIndex) continue;
    Index i = *index_of(subexpr_at(once, p.path));
    if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
  }
  for (const Index& i : collect_indices(once)) {
    if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
  }
  renaming.clear();
  for (std::size_t k = 0; k < order.size(); ++k) {
    renaming.push_back({index_occ(order[k]), index_occ({"i" + std::to_string(k)})});
  }
  return apply_subs_syntactic(once, renaming);
}

bool same_up_to_indices(const Expr& a, const Expr& b) {
  return canonical(a) == canonical(b);
}

const char* kJohn =
    "term(#j, np[role=subj], exists, lam($y, name($y, \"John\")), lam($y, eq($y, j_smith)))";
const char* kMary =
    "term(#m, np[role=subj], exists, lam($y, name($y, \"Mary\")), lam($y, eq($y, m_jones)))";

Check simple_vp_ellipsis() {
  Check k;
  const CorpusCase& c = testing::corpus_case("sleep");
  CaseResult r = run_case(c, {});
  k.expect(r.report.classes.size() == 1, "classes: " + std::to_string(r.report.classes.size()));
  if (!k.ok) return k;

  std::string ante = std::string("[#j]:sleep(") + kJohn + ")";
  Expr ex8 = parse_expr("sub(" + ante + ", {" + kJohn + "/" + kMary + ", #j/#m})");
  const Reading& rd = r.report.classes[0].representative;
  const auto* conj = rd.resolved.as<App>();
  k.expect(conj && conj->args.size() == 2, "resolved form is not a conjunction");
  if (!k.ok) return k;
  k.expect(same_up_to_indices(conj->args[1], apply_subs_syntactic(ex8, {})),
           "resolved ellipsis: " + print_expr(conj->args[1]));

  EllipsisSolution sol = solve_equation(c.qlf, c.sites.at(0)).at(0);
  Expr directive = hat_apply(*sol.predicate.as<Hat>(), parse_expr(kMary));
  k.expect(directive == ex8, "solution applied to Mary: " + print_expr(directive));

  ModelSpec sleeps = parse_model(
      "domain: m_jones\npred name/2: {(m_jones,\"Mary\")}\npred sleep/1: {(m_jones)}");
  ModelSpec awake = parse_model(
      "domain: m_jones\npred name/2: {(m_jones,\"Mary\")}\npred sleep/1: {}");
  GqPtr oracle = translate_to_gq(apply_subs_syntactic(ex8, {}));
  k.expect(oracle_evaluate(oracle, sleeps) && !oracle_evaluate(oracle, awake),
           "oracle disagrees with the expected values");
  k.expect(evaluate(directive, sleeps, rd.resolution).truths() == std::set<bool>{true},
           "not true when Mary sleeps");
  k.expect(evaluate(directive, awake, rd.resolution).truths() == std::set<bool>{false},
           "not false when nobody sleeps");
  return k;
}

const Reading* find_reading(const ReadingReport& rep, const std::string& trace,
                            const std::map<std::string, std::vector<Index>>& scopes) {
  for (const Reading& r : rep.readings) {
    if (r.choices.find(trace) != std::string::npos && r.resolution.scopes == scopes) return &r;
  }
  return nullptr;
}

Check scope_parallelism() {
  Check k;
  const CorpusCase& c = testing::corpus_case("flag");
  ReadingReport rep = enumerate_readings(c);
  k.expect(rep.classes.size() == 2, "classes: " + std::to_string(rep.classes.size()));

  const char* cf = "term(#c, np[role=subj], exists, lam($y, canadian_flag($y)), lam($y, eq($y, $y)))";
  const char* af = "term(#a, np[role=subj], exists, lam($y, american_flag($y)), lam($y, eq($y, $y)))";
  const char* h = "term(#h, np[role=obj], forall, lam($y, house($y)), lam($y, eq($y, $y)))";
  const char* h1 = "term(#h1, np[role=obj], forall, lam($y, house($y)), lam($y, eq($y, $y)))";
  auto clause = [](const std::string& scope, const char* subj, const char* obj) {
    return scope + ":hang(" + subj + ", " + obj + ")";
  };
  struct Pairing {
    std::vector<Index> ante;
    std::string expected;
  };
  std::vector<Pairing> pairings = {
      {{{"h"}, {"c"}},
       "[]:and(" + clause("[#h, #c]", cf, h) + ", " + clause("[#h1, #a]", af, h1) + ")"},
      {{{"c"}, {"h"}},
       "[]:and(" + clause("[#c, #h]", cf, h) + ", " + clause("[#a, #h1]", af, h1) + ")"},
  };
  const Reading* qlf1 = nullptr;
  for (const Pairing& p : pairings) {
    const Reading* r = find_reading(rep, "#h:sloppy", {{"S1", {}}, {"S2", p.ante}});
    k.expect(r != nullptr, "missing sloppy reading for antecedent scoping");
    if (!r) continue;
    if (!qlf1) qlf1 = r;
    k.expect(same_up_to_indices(r->resolved, parse_expr(p.expected)),
             "unexpected pairing: " + print_expr(r->resolved));
  }

  const Reading* qlf2 = find_reading(rep, "#h:strict", {{"S1", {{"h"}}}, {"S2", {{"c"}}}});
  k.expect(qlf2 != nullptr, "missing shared wide-scope reading");
  if (qlf1 && qlf2) {
    k.expect(qlf1->signature == qlf2->signature,
             "shared wide scope not equivalent to the sloppy [#h,#c] reading");
  }

  std::map<std::string, std::vector<Index>> c_wide = {{"S1", {{"c"}}}, {"S2", {{"h"}}}};
  for (const Resolution& base : testing::solution_combinations(c)) {
    Resolution r = base;
    r.scopes = c_wide;
    k.expect(!check_interpretable(c.qlf, r).ok(), "#c wide over both accepted by scoping");
    for (const ModelSpec& m : make_battery(c)) {
      if (evaluate(c.qlf, m, r).interpretable()) {
        k.expect(false, "#c wide over both has a value");
        break;
      }
    }
  }
  for (const Reading& r : rep.readings) {
    k.expect(r.resolution.scopes != c_wide, "#c wide over both among the readings");
  }
  return k;
}

Check strict_sloppy() {
  Check k;
  std::size_t mother = run_case(testing::corpus_case("mother"), {}).report.classes.size();
  k.expect(mother == 2, "mother classes: " + std::to_string(mother));

  ReadingReport book = enumerate_readings(testing::corpus_case("book"));
  k.expect(book.classes.size() == 3, "book classes: " + std::to_string(book.classes.size()));
  std::size_t strict_b = 0;
  for (const Reading& r : book.readings) {
    if (r.choices.find("#b:strict") == std::string::npos) continue;
    ++strict_b;
    const auto& s0 = r.resolution.scopes.at("S0");
    k.expect(std::find(s0.begin(), s0.end(), Index{"b"}) != s0.end(),
             "strict #b reading without #b over the conjunction: " + r.choices);
  }
  k.expect(strict_b > 0, "no strict-book reading");
  return k;
}

Check cascaded() {
  Check k;
  const CorpusCase& c = testing::corpus_case("cascaded");
  ReadingOptions plain;
  ReadingOptions extended;
  extended.extended_strict = true;
  for (const ReadingOptions* o : {&plain, &extended}) {
    CaseResult r = run_case(c, *o);
    std::size_t want = o->extended_strict ? *c.expected_extended : *c.expected;
    std::string mode = o->extended_strict ? "extended" : "default";
    k.expect(r.report.classes.size() == want,
             mode + " classes: " + std::to_string(r.report.classes.size()) + ", want " +
                 std::to_string(want));
    k.expect(r.report.forbidden_present.empty(), mode + ": forbidden reading present");
    k.expect(r.report.missing_references.empty(), mode + ": a reference reading is missing");
  }
  return k;
}

Check acd() {
  Check k;
  const CorpusCase& c = testing::corpus_case("acd");
  ReadingReport rep = enumerate_readings(c);
  std::size_t sloppy = 0;
  for (const Rejection& r : rep.rejections) {
    if (r.choices.find(":sloppy") == std::string::npos) continue;
    ++sloppy;
    k.expect(r.diagnosis.verdict == Verdict::kCyclic,
             "sloppy rejected as " + std::string(verdict_name(r.diagnosis.verdict)));
  }
  k.expect(sloppy > 0, "no sloppy resolution rejected");
  for (const Reading& r : rep.readings) {
    k.expect(r.choices.find(":sloppy") == std::string::npos, "sloppy reading survived");
  }
  k.expect(!rep.readings.empty(), "no strict reading survived");
  return k;
}

Check tense_merge() {
  Check k;
  Category e = parse_category("vp_ellipsis[tense=inf,modal=will,perfect=_,progressive=_,pol=pos]");
  Category a = parse_category("vp[tense=past,modal=no,perfect=no,progressive=no,pol=pos]");
  Category want = parse_category("vp[tense=inf,modal=will,perfect=no,progressive=no]");
  Category got = merge_categories(e, a);
  k.expect(got.kind == want.kind, "kind " + got.kind);
  for (const auto& [feature, value] : want.features) {
    const Category::Value* v = got.find(feature);
    k.expect(v && *v == value, "feature " + feature);
  }
  for (const auto& [feature, value] : got.features) {
    k.expect(feature == "pol" || want.find(feature), "extra feature " + feature);
  }
  ReadingReport rep = enumerate_readings(testing::corpus_case("tense"));
  k.expect(rep.category_ok, "corpus category check");
  return k;
}

Check oracle_equivalence() {
  Check k;
  testing::Rng rng(20240501);
  std::size_t mismatches = 0;
  std::string first;
  for (int i = 0; i < 500; ++i) {
    Expr q = testing::random_scoped_qlf(rng, 3);
    GqPtr g = translate_to_gq(q);
    for (int j = 0; j < 8; ++j) {
      ModelSpec m = testing::random_model(rng, 3);
      if (evaluate_truth(q, m, {}) != oracle_evaluate(g, m)) {
        if (!mismatches++) first = print_expr(q);
      }
    }
  }
  k.expect(mismatches == 0, std::to_string(mismatches) + " mismatches, first " + first);
  return k;
}

// Indices a site's sloppy pairs rename, on either side.
std::set<Index> sloppy_indices(const Expr& predicate) {
  std::set<Index> out;
  const auto* h = predicate.as<Hat>();
  const auto* sub = h ? h->body.as<Substituted>() : nullptr;
  if (!sub) return out;
  for (const auto& [old, repl] : sub->subs) {
    if (old.is<IndexOcc>() && repl.is<IndexOcc>()) {
      out.insert(*index_of(old));
      out.insert(*index_of(repl));
    }
  }
  return out;
}

bool is_proper_prefix(const std::vector<int>& a, const std::vector<int>& b) {
  return a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// True when no scope node above an antecedent discharges a sloppily renamed
// index of that site, so the antecedent is resolved within itself.
bool self_contained(const CorpusCase& c, const Resolution& r) {
  std::map<std::string, std::vector<int>> node_paths;
  for (const Position& p : topdown_positions(c.qlf)) {
    if (p.kind != Position::Kind::kExpr) continue;
    const auto* s = subexpr_at(c.qlf, p.path).as<Scoped>();
    if (s && s->scope.metavar) node_paths[*s->scope.metavar] = p.path;
  }
  for (const EllipsisSite& site : c.sites) {
    auto value = r.values.find(site.metavar);
    if (value == r.values.end()) continue;
    std::set<Index> sloppy = sloppy_indices(value->second);
    for (const auto& [name, list] : r.scopes) {
      if (!is_proper_prefix(node_paths.at(name), site.antecedent_path)) continue;
      for (const Index& i : list) {
        if (sloppy.contains(i)) return false;
      }
    }
  }
  return true;
}

Check directive_agreement() {
  Check k;
  std::size_t compared = 0;
  std::size_t shadowed = 0;
  for (const CorpusCase& c : testing::corpus()) {
    auto battery = make_battery(c);
    for (const Reading& r : enumerate_readings(c).readings) {
      if (!self_contained(c, r.resolution)) {
        ++shadowed;
        continue;
      }
      if (!r.resolved) {
        k.expect(false, c.id + ": no syntactic form for " + r.choices);
        continue;
      }
      ++compared;
      try {
        k.expect(truth_signature(r.resolved, {}, battery) == r.signature,
                 c.id + ": directive and syntactic forms differ for " + r.choices);
      } catch (const Uninterpretable& e) {
        k.expect(false, c.id + ": syntactic form of " + r.choices + ": " + e.what());
      }
    }
  }
  k.expect(compared > 0, "nothing compared");
  if (k.ok) {
    k.detail = std::to_string(compared) + " readings, " + std::to_string(shadowed) +
               " with an antecedent resolved outside itself";
  }
  return k;
}

Check order_independence() {
  Check k;
  for (const CorpusCase& c : testing::corpus()) {
    OrderReport r = check_order_independence(c, 50, 1);
    k.expect(r.permutations == 50, c.id + ": permutations " + std::to_string(r.permutations));
    k.expect(r.ok(), c.id + ": " + (r.ok() ? "" : r.divergences.front()));
  }
  return k;
}

bool same_subs(const SubstitutionSet& a, const SubstitutionSet& b) { return a == b; }

Check substitution_algebra() {
  Check k;
  testing::Rng rng(99);
  std::vector<Expr> pool = testing::substitution_pool();
  for (int i = 0; i < 1000; ++i) {
    SubstitutionSet a = testing::random_subs(rng, pool);
    SubstitutionSet b = testing::random_subs(rng, pool);
    SubstitutionSet c = testing::random_subs(rng, pool);
    k.expect(same_subs(subs_merge({}, a), a) && same_subs(subs_merge(a, {}), a), "unit");
    k.expect(same_subs(subs_merge(subs_merge(a, b), c), subs_merge(a, subs_merge(b, c))),
             "associativity");
    SubstitutionSet ab = subs_merge(a, b);
    for (const Expr& old : pool) {
      const Expr* in_a = lookup(a, old);
      const Expr* in_b = lookup(b, old);
      const Expr* merged = lookup(ab, old);
      if (in_a) {
        k.expect(merged && *merged == *in_a, "left priority");
      } else if (in_b) {
        k.expect(merged && *merged == *in_b, "right fallback");
      } else {
        k.expect(!merged, "spurious pair");
      }
      bool listed = false;
      for (const auto& [o, n] : a) {
        if (o == old) {
          k.expect(newexpr(old, a) == n, "newexpr on a listed pair");
          listed = true;
        }
      }
      if (!listed) k.expect(newexpr(old, a) == old, "newexpr off the listed pairs");
    }
  }
  return k;
}

std::set<int> parse_known(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) != "--known-failures") continue;
    std::stringstream in(argv[i + 1]);
    for (std::string item; std::getline(in, item, ',');) known.insert(std::stoi(item));
  }
  return known;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known = parse_known(argc, argv);
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
      {"simple VP ellipsis", simple_vp_ellipsis},
      {"scope parallelism", scope_parallelism},
      {"strict and sloppy identity", strict_sloppy},
      {"cascaded ellipsis", cascaded},
      {"antecedent-contained deletion", acd},
      {"tense merge", tense_merge},
      {"oracle equivalence", oracle_equivalence},
      {"directive and syntactic agreement", directive_agreement},
      {"order independence", order_independence},
      {"substitution algebra", substitution_algebra},
  };
  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int n = static_cast<int>(i) + 1;
    auto start = std::chrono::steady_clock::now();
    Check k;
    try {
      k = criteria[i].second();
    } catch (const std::exception& e) {
      k.ok = false;
      k.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!k.ok) failed.insert(n);
    std::printf("%s %2d %-34s %6.1fs%s%s%s\n", k.ok ? "PASS" : "FAIL", n, criteria[i].first,
                secs, k.detail.empty() ? "" : "  ", k.detail.c_str(),
                !k.ok && known.contains(n) ? " (known)" : "");
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failed.size(), criteria.size());
  return failed == known ? 0 : 1;
}
