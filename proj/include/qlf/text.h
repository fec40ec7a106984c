#ifndef QLF_TEXT_H_
#define QLF_TEXT_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include "qlf/ast.h"
#include "qlf/model.h"

namespace qlf {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" +
                           std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Parsed text that violates a structural rule of the expression algebra.
class WellFormednessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicateIndex : public WellFormednessError {
 public:
  explicit DuplicateIndex(const std::string& index)
      : WellFormednessError("index #" + index + " names two distinct terms") {}
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArityMismatch : public ModelError {
 public:
  using ModelError::ModelError;
};

class UnknownEntity : public ModelError {
 public:
  using ModelError::ModelError;
};

// Expression grammar: sigils separate the name spaces (# index, $ variable,
// ? meta-variable, bare lowercase constant or functor, quoted string).
Expr parse_expr(std::string_view text);
std::string print_expr(const Expr& e);
std::string print_category(const Category& c);
std::string print_subs(const SubstitutionSet& s);
Category parse_category(std::string_view text);

// Throws DuplicateIndex or WellFormednessError. parse_expr already calls it.
void check_well_formed(const Expr& e);

ModelSpec parse_model(std::string_view text);
std::string print_model(const ModelSpec& m);

}  // namespace qlf

#endif  // QLF_TEXT_H_
