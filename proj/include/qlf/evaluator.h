#ifndef QLF_EVALUATOR_H_
#define QLF_EVALUATOR_H_

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qlf/ast.h"
#include "qlf/discharge.h"
#include "qlf/model.h"

namespace qlf {

struct Value;

// A one-place function over individuals (the value of a property).
struct Function {
  std::shared_ptr<const std::function<Value(const Value&)>> fn;
};

struct Value {
  std::variant<bool, Atom, Function> data;

  const bool* truth() const { return std::get_if<bool>(&data); }
  const Atom* atom() const { return std::get_if<Atom>(&data); }
  const Function* function() const { return std::get_if<Function>(&data); }
};

// Variable assignment g. Persistent: extending shares the tail.
class Assignment {
 public:
  Assignment() = default;

  Assignment bind(std::string var, Value v) const;
  const Value* find(const std::string& var) const;

 private:
  struct Cell {
    std::string var;
    Value value;
    std::shared_ptr<const Cell> next;
  };
  std::shared_ptr<const Cell> head_;
};

// Every value a (possibly partially resolved) QLF can take. Empty values with
// a failure means the QLF is uninterpretable.
struct Valuation {
  std::vector<Value> values;
  std::optional<Failure> failure;
  std::string detail;

  std::set<bool> truths() const;
  bool interpretable() const { return !values.empty(); }
};

// Valuation relation. Unbound scope meta-variables reachable from `e` are
// instantiated by the scoping enumerator and the resulting values unioned.
Valuation evaluate(const Expr& e, const ModelSpec& m, const Resolution& res,
                   const Assignment& g = {}, const SubstitutionSet& subs = {});

// Single-step rewrite: New if Old/New is in `subs`, otherwise Old.
Expr newexpr(const Expr& old, const SubstitutionSet& subs);

// Per-model truth values of a fully resolved formula. Throws Uninterpretable
// if the formula has no value.
std::vector<bool> truth_signature(const Expr& e, const Resolution& res,
                                  const std::vector<ModelSpec>& battery);

// Truth value of a fully resolved formula on one model; throws
// Uninterpretable when it has none.
bool evaluate_truth(const Expr& e, const ModelSpec& m, const Resolution& res);

}  // namespace qlf

#endif  // QLF_EVALUATOR_H_
