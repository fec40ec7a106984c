#ifndef QLF_HARNESS_H_
#define QLF_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlf/ast.h"
#include "qlf/ellipsis.h"
#include "qlf/model.h"
#include "qlf/scoping.h"

namespace qlf {

// Malformed corpus file or annotation.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class OrderDependenceViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A hand-resolved formula the enumerated readings must (or must not) match.
struct ReferenceReading {
  std::string name;
  Expr formula;
  bool forbidden = false;
};

// Expected result of merging the site's categories.
struct CategoryExpectation {
  Category expected;
  std::set<std::string> ignored;
};

struct CorpusCase {
  std::string id;
  int line = 0;
  Expr qlf;
  std::vector<EllipsisSite> sites;
  std::optional<std::size_t> expected;
  std::optional<std::size_t> expected_extended;
  // name/2 predicates relating exactly one first argument to each second.
  std::vector<std::string> functional;
  std::vector<std::string> witness_files;
  std::vector<ModelSpec> witnesses;
  std::vector<ReferenceReading> references;
  std::map<std::string, std::vector<Expr>> contexts;  // context candidates
  std::optional<CategoryExpectation> category_check;
  std::set<std::string> flags;
};

// Corpus text: blocks "case ID" ... "end"; "key: value" lines, indented lines
// continue the previous value, ";;" starts a comment. Witness files are
// resolved against `base`.
std::vector<CorpusCase> parse_corpus(const std::string& text,
                                     const std::filesystem::path& base = {});
std::vector<CorpusCase> load_corpus_file(const std::filesystem::path& file);
// Every *.qlfc file in `dir`, cases sorted by id.
std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir);

struct BatteryOptions {
  std::uint64_t seed = 1;
  std::size_t size = 64;
  std::size_t max_domain = 3;
};

// Seeded random models over the vocabulary of `c` (domain sizes 1..max),
// honouring its functional predicates, followed by its witness models.
std::vector<ModelSpec> make_battery(const CorpusCase& c,
                                    const BatteryOptions& opts = {});

struct Reading {
  Resolution resolution;
  std::string choices;  // per-site choicetraces
  Expr resolved;        // syntactic cash-out; empty if it could not be built
  std::vector<bool> signature;
};

struct ReadingClass {
  std::vector<bool> signature;
  Reading representative;
  std::size_t members = 0;
  std::vector<std::string> references;  // names of matching reference readings
};

struct Rejection {
  std::string choices;
  Diagnosis diagnosis;
};

struct ReadingOptions {
  bool extended_strict = false;
  BatteryOptions battery;
  std::size_t cap = 10000;
};

struct ReadingReport {
  std::vector<Reading> readings;  // every interpretable resolution
  std::vector<ReadingClass> classes;
  std::vector<Rejection> rejections;  // solution combinations with no scoping
  std::vector<std::string> missing_references;
  std::vector<std::string> forbidden_present;
  std::optional<Category> merged_category;
  bool category_ok = true;
};

ReadingReport enumerate_readings(const CorpusCase& c,
                                 const ReadingOptions& opts = {});

// Groups resolutions by truth signature; classes ordered by first member.
std::vector<ReadingClass> classify(const std::vector<Reading>& readings);

// A small subset of `battery` on which every pair of classes in `report`
// (computed over that battery) differs. Greedy, in battery order.
std::vector<ModelSpec> separating_models(const ReadingReport& report,
                                         const std::vector<ModelSpec>& battery);

struct OrderReport {
  std::size_t permutations = 0;
  std::set<std::vector<bool>> reference;  // class set of the first order
  std::vector<std::string> divergences;

  bool ok() const { return divergences.empty(); }
};

// Resolves the case's meta-variables in `permutations` seeded random orders,
// branching over every proposal at each step, and compares the final class
// sets.
OrderReport check_order_independence(const CorpusCase& c,
                                     std::size_t permutations,
                                     std::uint64_t seed,
                                     const ReadingOptions& opts = {});

struct CaseResult {
  std::string id;
  std::optional<std::size_t> expected;
  std::size_t actual = 0;
  bool pass = false;
  std::string detail;
  ReadingReport report;
};

CaseResult run_case(const CorpusCase& c, const ReadingOptions& opts);

}  // namespace qlf

#endif  // QLF_HARNESS_H_
