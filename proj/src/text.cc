#include "qlf/text.h"

#include <cctype>
#include <map>
#include <sstream>

namespace qlf {

namespace {

bool ident_start(char c) {
  return std::islower(static_cast<unsigned char>(c)) != 0;
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  // Character right after the current token start, without skipping space.
  char peek_raw(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  char next() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    ++col_;
    return text_[pos_++];
  }

  void expect(char c) {
    char got = peek();
    if (got != c) {
      fail(std::string("expected '") + c + "', found " +
           (got ? std::string("'") + got + "'" : "end of input"));
    }
    next();
  }

  bool accept(char c) {
    if (peek() != c) return false;
    next();
    return true;
  }

  // Identifier characters starting at the current position (no sigil).
  std::string ident() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) {
      ++pos_;
      ++col_;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted() {
    expect('"');
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated string literal");
      char c = text_[pos_++];
      ++col_;
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated string literal");
        c = text_[pos_++];
        ++col_;
      } else if (c == '\n') {
        ++line_;
        col_ = 1;
      }
      out += c;
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, line_, col_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Expr parse_all() {
    Expr e = expr();
    if (!lex_.at_end()) lex_.fail("trailing input");
    return e;
  }

  Category category_all() {
    Category c = category();
    if (!lex_.at_end()) lex_.fail("trailing input");
    return c;
  }

 private:
  Expr expr() {
    Expr e = primary();
    // Postfix application, e.g. ?P(term(...)) or hat($t, ...)(...).
    while (lex_.peek() == '(' && !e.is<Const>()) {
      e = apply(e, arguments());
    }
    return e;
  }

  std::vector<Expr> arguments() {
    lex_.expect('(');
    std::vector<Expr> args;
    if (lex_.accept(')')) return args;
    do {
      args.push_back(expr());
    } while (lex_.accept(','));
    lex_.expect(')');
    return args;
  }

  Expr primary() {
    char c = lex_.peek();
    if (c == '"') return string_literal(lex_.quoted());
    if (c == '$') {
      lex_.next();
      return variable(lex_.ident());
    }
    if (c == '#') {
      lex_.next();
      return index_occ({lex_.ident()});
    }
    if (c == '?') {
      lex_.next();
      std::string name = lex_.ident();
      if (lex_.accept(':')) return scoped(std::move(name), expr());
      return metavar(std::move(name));
    }
    if (c == '[') {
      lex_.next();
      std::vector<Index> list;
      if (!lex_.accept(']')) {
        do {
          lex_.expect('#');
          list.push_back({lex_.ident()});
        } while (lex_.accept(','));
        lex_.expect(']');
      }
      lex_.expect(':');
      return scoped(std::move(list), expr());
    }
    if (ident_start(c)) {
      std::string name = lex_.ident();
      if (lex_.peek() != '(') return constant(std::move(name));
      if (name == "term") return term_expr();
      if (name == "lam" || name == "hat") return binder(name);
      if (name == "sub") return sub_expr();
      return apply(constant(std::move(name)), arguments());
    }
    if (c == '\0') lex_.fail("unexpected end of input");
    lex_.fail(std::string("unexpected '") + c + "'");
  }

  Expr term_expr() {
    lex_.expect('(');
    Term t;
    lex_.expect('#');
    t.index = {lex_.ident()};
    lex_.expect(',');
    t.category = category();
    lex_.expect(',');
    std::string q = lex_.ident();
    if (q == "exists") {
      t.quant = Quant::kExists;
    } else if (q == "forall") {
      t.quant = Quant::kForall;
    } else {
      lex_.fail("unknown quantifier '" + q + "'");
    }
    lex_.expect(',');
    t.restriction = expr();
    lex_.expect(',');
    t.context = expr();
    lex_.expect(')');
    return term(std::move(t));
  }

  Expr binder(const std::string& kind) {
    lex_.expect('(');
    lex_.expect('$');
    std::string var = lex_.ident();
    lex_.expect(',');
    Expr body = expr();
    lex_.expect(')');
    return kind == "lam" ? lambda(std::move(var), body)
                         : hat(std::move(var), body);
  }

  Expr sub_expr() {
    lex_.expect('(');
    Expr body = expr();
    lex_.expect(',');
    lex_.expect('{');
    SubstitutionSet pairs;
    if (!lex_.accept('}')) {
      do {
        Expr from = expr();
        lex_.expect('/');
        Expr to = expr();
        for (const Pair& p : pairs) {
          if (p.from == from) lex_.fail("two pairs rewrite the same expression");
        }
        pairs.push_back({std::move(from), std::move(to)});
      } while (lex_.accept(','));
      lex_.expect('}');
    }
    lex_.expect(')');
    return substituted(std::move(body), std::move(pairs));
  }

  Category category() {
    Category c;
    c.kind = lex_.ident();
    lex_.expect('[');
    if (lex_.accept(']')) return c;
    do {
      std::string name = lex_.ident();
      if (c.find(name)) lex_.fail("feature '" + name + "' given twice");
      lex_.expect('=');
      if (lex_.accept('_')) {
        c.features.emplace_back(std::move(name), std::nullopt);
      } else {
        c.features.emplace_back(std::move(name), lex_.ident());
      }
    } while (lex_.accept(','));
    lex_.expect(']');
    return c;
  }

  Lexer lex_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

void print(const Expr& e, std::string& out);

void print_list(const std::vector<Expr>& xs, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    print(xs[i], out);
  }
  out += ')';
}

void print(const Expr& e, std::string& out) {
  if (!e) {
    out += "<null>";
  } else if (const auto* c = e.as<Const>()) {
    out += c->name;
  } else if (const auto* s = e.as<StrLit>()) {
    out += quote(s->text);
  } else if (const auto* v = e.as<Var>()) {
    out += '$' + v->name;
  } else if (const auto* i = e.as<IndexOcc>()) {
    out += '#' + i->index.name;
  } else if (const auto* m = e.as<MetaVar>()) {
    out += '?' + m->name;
  } else if (const auto* t = e.as<Term>()) {
    out += "term(#" + t->index.name + ", " + print_category(t->category) +
           ", " + std::string(quant_name(t->quant)) + ", ";
    print(t->restriction, out);
    out += ", ";
    print(t->context, out);
    out += ')';
  } else if (const auto* s = e.as<Scoped>()) {
    if (s->scope.metavar) {
      out += '?' + *s->scope.metavar;
      if (s->scope.offset) out += '@' + std::to_string(s->scope.offset);
    } else {
      out += '[';
      for (std::size_t k = 0; k < s->scope.indices.size(); ++k) {
        if (k) out += ", ";
        out += '#' + s->scope.indices[k].name;
      }
      out += ']';
    }
    out += ':';
    print(s->body, out);
  } else if (const auto* l = e.as<Lam>()) {
    out += "lam($" + l->var + ", ";
    print(l->body, out);
    out += ')';
  } else if (const auto* h = e.as<Hat>()) {
    out += "hat($" + h->var + ", ";
    print(h->body, out);
    out += ')';
  } else if (const auto* s = e.as<Substituted>()) {
    out += "sub(";
    print(s->body, out);
    out += ", " + print_subs(s->subs) + ")";
  } else if (const auto* a = e.as<App>()) {
    print(a->functor, out);
    print_list(a->args, out);
  }
}

}  // namespace

Expr parse_expr(std::string_view text) {
  Expr e = Parser(text).parse_all();
  check_well_formed(e);
  return e;
}

Category parse_category(std::string_view text) {
  return Parser(text).category_all();
}

std::string print_expr(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string print_category(const Category& c) {
  std::string out = c.kind + "[";
  for (std::size_t i = 0; i < c.features.size(); ++i) {
    if (i) out += ',';
    out += c.features[i].first + "=" + c.features[i].second.value_or("_");
  }
  return out + "]";
}

std::string print_subs(const SubstitutionSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    print(s[i].from, out);
    out += '/';
    print(s[i].to, out);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------

namespace {

class WellFormedness {
 public:
  void check(const Expr& e, std::vector<std::string>& binders) {
    if (const auto* t = e.as<Term>()) {
      auto [it, inserted] = terms_.emplace(t->index, e);
      if (!inserted && !(it->second == e)) throw DuplicateIndex(t->index.name);
      check(t->restriction, binders);
      check(t->context, binders);
    } else if (const auto* s = e.as<Scoped>()) {
      std::set<Index> seen;
      for (const Index& i : s->scope.indices) {
        if (!seen.insert(i).second) {
          throw WellFormednessError("scope list repeats #" + i.name);
        }
      }
      if (!s->scope.metavar) check_scope_targets(s->scope.indices, s->body);
      check(s->body, binders);
    } else if (const auto* l = e.as<Lam>()) {
      bind(l->var, l->body, binders);
    } else if (const auto* h = e.as<Hat>()) {
      bind(h->var, h->body, binders);
    } else if (const auto* s = e.as<Substituted>()) {
      check(s->body, binders);
      for (const Pair& p : s->subs) {
        check(p.from, binders);
        check(p.to, binders);
      }
    } else if (const auto* a = e.as<App>()) {
      check(a->functor, binders);
      for (const Expr& x : a->args) check(x, binders);
    }
  }

 private:
  void bind(const std::string& var, const Expr& body,
            std::vector<std::string>& binders) {
    for (const std::string& b : binders) {
      if (b == var) {
        throw WellFormednessError("$" + var + " shadows an enclosing binder");
      }
    }
    binders.push_back(var);
    check(body, binders);
    binders.pop_back();
  }

  // Every index in an explicit scope list must name a term in the body, or
  // be introduced there by an index substitution.
  static void check_scope_targets(const std::vector<Index>& list,
                                  const Expr& body) {
    if (list.empty()) return;
    std::set<Index> known;
    for (const Term& t : collect_terms(body)) known.insert(t.index);
    for (const Position& p : topdown_positions(body)) {
      if (p.kind != Position::Kind::kExpr) continue;
      if (const auto* s = subexpr_at(body, p.path).as<Substituted>()) {
        for (const Pair& pr : s->subs) {
          if (pr.to.is<IndexOcc>()) known.insert(pr.to.as<IndexOcc>()->index);
        }
      }
    }
    for (const Index& i : list) {
      if (!known.contains(i)) {
        throw WellFormednessError("scope list names #" + i.name +
                                  " but no term in its body has that index");
      }
    }
  }

  std::map<Index, Expr> terms_;
};

}  // namespace

void check_well_formed(const Expr& e) {
  std::vector<std::string> binders;
  WellFormedness().check(e, binders);
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_names(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace

ModelSpec parse_model(std::string_view text) {
  ModelSpec m;
  std::set<std::string> domain;
  bool have_domain = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fail = [&](const std::string& msg) -> SyntaxError {
      return SyntaxError(msg, line_no, 1);
    };
    if (line.rfind("domain:", 0) == 0) {
      for (std::string& name : split_names(line.substr(7))) {
        if (name.empty()) throw fail("empty entity name in domain");
        if (domain.insert(name).second) m.domain.push_back(name);
      }
      have_domain = true;
    } else if (line.rfind("const ", 0) == 0) {
      auto eq = line.find('=');
      if (eq == std::string::npos) throw fail("expected 'const NAME = ENTITY'");
      std::string name = trim(line.substr(6, eq - 6));
      std::string entity = trim(line.substr(eq + 1));
      if (!domain.contains(entity)) {
        throw UnknownEntity("line " + std::to_string(line_no) + ": '" +
                            entity + "' is not in the domain");
      }
      m.constants[name] = entity;
    } else if (line.rfind("pred ", 0) == 0) {
      auto slash = line.find('/');
      auto colon = line.find(':');
      if (slash == std::string::npos || colon == std::string::npos ||
          colon < slash) {
        throw fail("expected 'pred NAME/ARITY: {...}'");
      }
      std::string name = trim(line.substr(5, slash - 5));
      int arity = 0;
      try {
        arity = std::stoi(trim(line.substr(slash + 1, colon - slash - 1)));
      } catch (const std::exception&) {
        throw fail("bad arity");
      }
      auto& ext = m.predicates[{name, arity}];
      std::string body = trim(line.substr(colon + 1));
      if (body.size() < 2 || body.front() != '{' || body.back() != '}') {
        throw fail("predicate extension must be enclosed in braces");
      }
      body = body.substr(1, body.size() - 2);
      std::size_t pos = 0;
      while (true) {
        pos = body.find('(', pos);
        if (pos == std::string::npos) break;
        auto close = body.find(')', pos);
        if (close == std::string::npos) throw fail("unterminated tuple");
        Tuple tuple;
        for (std::string item : split_names(body.substr(pos + 1, close - pos - 1))) {
          if (item.size() >= 2 && item.front() == '"' && item.back() == '"') {
            tuple.push_back({item.substr(1, item.size() - 2), true});
          } else if (domain.contains(item)) {
            tuple.push_back({item, false});
          } else {
            throw UnknownEntity("line " + std::to_string(line_no) + ": '" +
                                item + "' is not in the domain");
          }
        }
        if (static_cast<int>(tuple.size()) != arity) {
          throw ArityMismatch("line " + std::to_string(line_no) + ": " + name +
                              "/" + std::to_string(arity) + " given a " +
                              std::to_string(tuple.size()) + "-tuple");
        }
        ext.insert(std::move(tuple));
        pos = close + 1;
      }
    } else {
      throw fail("unrecognized model line '" + line + "'");
    }
  }
  if (!have_domain) throw SyntaxError("model has no 'domain:' line", 1, 1);
  return m;
}

std::string print_model(const ModelSpec& m) {
  std::string out = "domain: ";
  for (std::size_t i = 0; i < m.domain.size(); ++i) {
    if (i) out += ", ";
    out += m.domain[i];
  }
  out += '\n';
  for (const auto& [name, entity] : m.constants) {
    out += "const " + name + " = " + entity + "\n";
  }
  for (const auto& [key, ext] : m.predicates) {
    out += "pred " + key.first + "/" + std::to_string(key.second) + ": {";
    bool first = true;
    for (const Tuple& t : ext) {
      if (!first) out += ", ";
      first = false;
      out += '(';
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ',';
        out += t[i].literal ? quote(t[i].name) : t[i].name;
      }
      out += ')';
    }
    out += "}\n";
  }
  return out;
}

}  // namespace qlf
