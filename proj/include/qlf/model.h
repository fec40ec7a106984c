#ifndef QLF_MODEL_H_
#define QLF_MODEL_H_

#include <compare>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qlf {

// An individual: either a domain entity or a string literal such as "John".
struct Atom {
  std::string name;
  bool literal = false;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

using Tuple = std::vector<Atom>;

// Finite model <O, F>: a domain of entity symbols, constant images, and
// predicate extensions keyed by (name, arity).
struct ModelSpec {
  std::vector<std::string> domain;
  std::map<std::string, std::string> constants;
  std::map<std::pair<std::string, int>, std::set<Tuple>> predicates;

  bool holds(const std::string& pred, const Tuple& args) const {
    auto it = predicates.find({pred, static_cast<int>(args.size())});
    return it != predicates.end() && it->second.contains(args);
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

}  // namespace qlf

#endif  // QLF_MODEL_H_
