#include "qlf/harness.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "qlf/discharge.h"
#include "qlf/evaluator.h"
#include "qlf/text.h"

namespace qlf {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (!quoted && line[i] == ';' && line[i + 1] == ';') return line.substr(0, i);
  }
  return line;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Splits "NAME rest..." at the first blank.
std::pair<std::string, std::string> head_rest(const std::string& s) {
  auto sp = s.find_first_of(" \t");
  if (sp == std::string::npos) return {s, ""};
  return {s.substr(0, sp), trim(s.substr(sp))};
}

struct Entry {
  std::string key;
  std::string value;
  int line;
};

Index parse_index_token(const std::string& tok, int line) {
  if (tok.size() < 2 || tok[0] != '#') {
    throw CorpusError("expected an index, got '" + tok + "'", line);
  }
  return Index{tok.substr(1)};
}

std::string metavar_token(const std::string& tok, int line) {
  if (tok.size() < 2 || tok[0] != '?') {
    throw CorpusError("expected a meta-variable, got '" + tok + "'", line);
  }
  return tok.substr(1);
}

Expr parse_at(const std::string& text, int line) {
  try {
    return parse_expr(text);
  } catch (const SyntaxError& e) {
    throw CorpusError(std::string("syntax error: ") + e.what(), line);
  } catch (const WellFormednessError& e) {
    throw CorpusError(e.what(), line);
  }
}

Category category_at(const std::string& text, int line) {
  try {
    return parse_category(text);
  } catch (const SyntaxError& e) {
    throw CorpusError(std::string("bad category: ") + e.what(), line);
  }
}

std::size_t count_at(const std::string& text, int line) {
  try {
    std::size_t used = 0;
    long v = std::stol(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw CorpusError("expected a count, got '" + text + "'", line);
  }
}

ModelSpec load_model(const std::filesystem::path& file, int line) {
  std::ifstream in(file);
  if (!in) throw CorpusError("cannot read witness " + file.string(), line);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_model(buf.str());
  } catch (const std::exception& e) {
    throw CorpusError(file.string() + ": " + e.what(), line);
  }
}

EllipsisSite parse_site(const std::string& value, int line) {
  auto toks = words(value);
  if (toks.empty()) throw CorpusError("empty ellipsis annotation", line);
  EllipsisSite site;
  site.metavar = metavar_token(toks[0], line);
  bool have_path = false;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos) {
      throw CorpusError("expected key=value, got '" + toks[i] + "'", line);
    }
    std::string k = toks[i].substr(0, eq);
    std::string v = toks[i].substr(eq + 1);
    if (k == "antecedent") {
      try {
        site.antecedent_path = parse_path(v);
      } catch (const std::invalid_argument& e) {
        throw CorpusError(e.what(), line);
      }
      have_path = true;
    } else if (k == "parallel") {
      auto gt = v.find('>');
      if (gt == std::string::npos) {
        throw CorpusError("parallel needs #antecedent>#ellipsis", line);
      }
      site.parallel.push_back({parse_index_token(v.substr(0, gt), line),
                               parse_index_token(v.substr(gt + 1), line)});
    } else if (k == "category") {
      site.category = category_at(v, line);
    } else if (k == "antecedent-category") {
      site.antecedent_category = category_at(v, line);
    } else {
      throw CorpusError("unknown ellipsis option '" + k + "'", line);
    }
  }
  if (!have_path) throw CorpusError("ellipsis needs antecedent=PATH", line);
  return site;
}

CorpusCase build_case(const std::string& id, int line,
                      const std::vector<Entry>& entries,
                      const std::filesystem::path& base) {
  CorpusCase c;
  c.id = id;
  c.line = line;
  for (const Entry& e : entries) {
    if (e.key == "qlf") {
      c.qlf = parse_at(e.value, e.line);
    } else if (e.key == "ellipsis") {
      c.sites.push_back(parse_site(e.value, e.line));
    } else if (e.key == "expect") {
      c.expected = count_at(e.value, e.line);
    } else if (e.key == "expect-extended") {
      c.expected_extended = count_at(e.value, e.line);
    } else if (e.key == "functional") {
      for (const std::string& w : words(e.value)) {
        if (!w.ends_with("/2")) {
          throw CorpusError("functional predicates must be name/2", e.line);
        }
        c.functional.push_back(w.substr(0, w.size() - 2));
      }
    } else if (e.key == "witness") {
      for (const std::string& w : words(e.value)) {
        c.witness_files.push_back(w);
        c.witnesses.push_back(load_model(base / w, e.line));
      }
    } else if (e.key == "reference" || e.key == "forbidden") {
      auto [name, text] = head_rest(e.value);
      if (text.empty()) throw CorpusError(e.key + " needs NAME EXPR", e.line);
      c.references.push_back(
          {name, parse_at(text, e.line), e.key == "forbidden"});
    } else if (e.key == "context") {
      auto [name, text] = head_rest(e.value);
      c.contexts[metavar_token(name, e.line)].push_back(parse_at(text, e.line));
    } else if (e.key == "merge-expect") {
      auto toks = words(e.value);
      if (toks.empty()) throw CorpusError("merge-expect needs a category", e.line);
      CategoryExpectation ce;
      ce.expected = category_at(toks[0], e.line);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (!toks[i].starts_with("ignore=")) {
          throw CorpusError("unknown merge-expect option '" + toks[i] + "'",
                            e.line);
        }
        std::stringstream names(toks[i].substr(7));
        for (std::string f; std::getline(names, f, ',');) ce.ignored.insert(f);
      }
      c.category_check = std::move(ce);
    } else if (e.key == "flags") {
      for (const std::string& w : words(e.value)) c.flags.insert(w);
    } else if (e.key == "note") {
    } else {
      throw CorpusError("unknown key '" + e.key + "'", e.line);
    }
  }
  if (!c.qlf) throw CorpusError("case " + id + " has no qlf", line);
  auto metavars = collect_metavars(c.qlf);
  for (const EllipsisSite& s : c.sites) {
    if (std::find(metavars.begin(), metavars.end(), s.metavar) ==
        metavars.end()) {
      throw CorpusError("?" + s.metavar + " does not occur in the qlf", line);
    }
  }
  try {
    EllipsisPlan plan(c.qlf, c.sites);
  } catch (const std::runtime_error& e) {
    throw CorpusError(e.what(), line);
  }
  return c;
}

}  // namespace

std::vector<CorpusCase> parse_corpus(const std::string& text,
                                     const std::filesystem::path& base) {
  std::vector<CorpusCase> out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::optional<std::string> id;
  int case_line = 0;
  std::vector<Entry> entries;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    if (trim(line).empty()) continue;
    bool indented = std::isspace(static_cast<unsigned char>(line[0]));
    std::string body = trim(line);
    if (!id) {
      auto [kw, rest] = head_rest(body);
      if (kw != "case" || rest.empty()) {
        throw CorpusError("expected 'case ID'", lineno);
      }
      id = rest;
      case_line = lineno;
      entries.clear();
      continue;
    }
    if (indented) {
      if (entries.empty()) throw CorpusError("continuation without a key", lineno);
      entries.back().value += " " + body;
      continue;
    }
    if (body == "end") {
      out.push_back(build_case(*id, case_line, entries, base));
      id.reset();
      continue;
    }
    auto colon = body.find(':');
    if (colon == std::string::npos) {
      throw CorpusError("expected 'key: value'", lineno);
    }
    entries.push_back(
        {trim(body.substr(0, colon)), trim(body.substr(colon + 1)), lineno});
  }
  if (id) throw CorpusError("case " + *id + " lacks 'end'", case_line);
  return out;
}

std::vector<CorpusCase> load_corpus_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw CorpusError("cannot read " + file.string(), 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), file.parent_path());
}

std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".qlfc") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusCase> out;
  for (const auto& f : files) {
    for (CorpusCase& c : load_corpus_file(f)) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusCase& a, const CorpusCase& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].id == out[i - 1].id) {
      throw CorpusError("duplicate case id " + out[i].id, out[i].line);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model battery.

namespace {

const std::set<std::string> kBuiltins = {"and", "or", "not", "eq", "ref", "idx"};

struct Vocabulary {
  std::set<std::string> constants;
  // (name, arity) -> string literals seen at each argument position
  std::map<std::pair<std::string, int>, std::vector<std::set<std::string>>> preds;
};

void gather(const Expr& e, Vocabulary& v) {
  if (const auto* c = e.as<Const>()) {
    v.constants.insert(c->name);
  } else if (const auto* t = e.as<Term>()) {
    gather(t->restriction, v);
    gather(t->context, v);
  } else if (const auto* s = e.as<Scoped>()) {
    gather(s->body, v);
  } else if (const auto* l = e.as<Lam>()) {
    gather(l->body, v);
  } else if (const auto* h = e.as<Hat>()) {
    gather(h->body, v);
  } else if (const auto* s = e.as<Substituted>()) {
    gather(s->body, v);
    for (const Pair& p : s->subs) {
      gather(p.from, v);
      gather(p.to, v);
    }
  } else if (const auto* a = e.as<App>()) {
    const auto* f = a->functor.as<Const>();
    if (f && kBuiltins.contains(f->name)) {
    } else if (f) {
      auto& slots = v.preds[{f->name, static_cast<int>(a->args.size())}];
      slots.resize(a->args.size());
      for (std::size_t i = 0; i < a->args.size(); ++i) {
        if (const auto* s = a->args[i].as<StrLit>()) slots[i].insert(s->text);
      }
    } else {
      gather(a->functor, v);
    }
    for (const Expr& x : a->args) gather(x, v);
  }
}

ModelSpec random_model(const Vocabulary& v, const std::set<std::string>& functional,
                       std::size_t n, std::mt19937_64& rng) {
  ModelSpec m;
  for (std::size_t i = 1; i <= n; ++i) m.domain.push_back("e" + std::to_string(i));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (const std::string& c : v.constants) m.constants[c] = m.domain[pick(rng)];
  std::bernoulli_distribution coin(0.5);
  for (const auto& [key, slots] : v.preds) {
    std::vector<std::vector<Atom>> choices(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      // Positions that ever hold a string literal range over literals only.
      for (const std::string& s : slots[i]) choices[i].push_back({s, true});
      if (choices[i].empty()) {
        for (const std::string& d : m.domain) choices[i].push_back({d, false});
      }
    }
    auto& ext = m.predicates[key];
    if (key.second == 2 && functional.contains(key.first)) {
      std::uniform_int_distribution<std::size_t> first(0, choices[0].size() - 1);
      for (const Atom& owner : choices[1]) ext.insert({choices[0][first(rng)], owner});
      continue;
    }
    Tuple cur(slots.size());
    std::function<void(std::size_t)> fill = [&](std::size_t i) {
      if (i == slots.size()) {
        if (coin(rng)) ext.insert(cur);
        return;
      }
      for (const Atom& a : choices[i]) {
        cur[i] = a;
        fill(i + 1);
      }
    };
    fill(0);
  }
  return m;
}

}  // namespace

std::vector<ModelSpec> make_battery(const CorpusCase& c,
                                    const BatteryOptions& opts) {
  Vocabulary v;
  gather(c.qlf, v);
  for (const ReferenceReading& r : c.references) gather(r.formula, v);
  for (const auto& [name, values] : c.contexts) {
    for (const Expr& x : values) gather(x, v);
  }
  std::set<std::string> functional(c.functional.begin(), c.functional.end());
  std::mt19937_64 rng(opts.seed);
  std::vector<ModelSpec> out;
  std::size_t max_domain = std::max<std::size_t>(1, opts.max_domain);
  for (std::size_t i = 0; i < opts.size; ++i) {
    std::size_t n = 1 + i % max_domain;
    out.push_back(random_model(v, functional, n, rng));
  }
  out.insert(out.end(), c.witnesses.begin(), c.witnesses.end());
  return out;
}

// ---------------------------------------------------------------------------
// Readings.

namespace {

std::string describe(const Resolution& r, const std::vector<std::string>& traces) {
  std::string out;
  for (const std::string& t : traces) out += t + " ";
  ScopeAssignment a{r.scopes};
  out += format_assignment(a);
  for (const auto& [name, value] : r.values) {
    if (!value.is<Hat>()) out += " ?" + name + "=" + print_expr(value);
  }
  return out;
}

struct Combination {
  Resolution resolution;
  std::vector<std::string> traces;
};

std::vector<Combination> combinations(const CorpusCase& c, bool extended) {
  EllipsisPlan plan(c.qlf, c.sites);
  std::vector<Combination> out{Combination{}};
  for (std::size_t k = 0; k < plan.sites().size(); ++k) {
    const std::string& mv = plan.sites()[k].site.metavar;
    std::vector<Combination> next;
    for (const EllipsisSolution& s : plan.solve(k, extended)) {
      for (const Combination& prev : out) {
        Combination x = prev;
        x.resolution.values[mv] = s.predicate;
        x.traces.push_back("?" + mv + "{" + format_choicetrace(s.choicetrace) + "}");
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  for (const auto& [name, values] : c.contexts) {
    std::vector<Combination> next;
    for (const Expr& v : values) {
      for (const Combination& prev : out) {
        Combination x = prev;
        x.resolution.values[name] = v;
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool category_matches(const Category& got, const CategoryExpectation& want) {
  if (got.kind != want.expected.kind) return false;
  for (const auto& [name, value] : want.expected.features) {
    if (want.ignored.contains(name)) continue;
    const Category::Value* v = got.find(name);
    if (!v || *v != value) return false;
  }
  return true;
}

}  // namespace

std::vector<ReadingClass> classify(const std::vector<Reading>& readings) {
  std::vector<ReadingClass> out;
  std::map<std::vector<bool>, std::size_t> where;
  for (const Reading& r : readings) {
    auto [it, fresh] = where.emplace(r.signature, out.size());
    if (fresh) out.push_back({r.signature, r, 0, {}});
    ++out[it->second].members;
  }
  return out;
}

ReadingReport enumerate_readings(const CorpusCase& c, const ReadingOptions& opts) {
  ReadingReport report;
  std::vector<ModelSpec> battery = make_battery(c, opts.battery);
  EnumerationOptions eo;
  eo.cap = opts.cap;
  for (const Combination& combo : combinations(c, opts.extended_strict)) {
    auto completions = enumerate_completions(c.qlf, combo.resolution, eo);
    if (completions.empty()) {
      report.rejections.push_back(
          {describe(combo.resolution, combo.traces),
           explain_rejection(c.qlf, combo.resolution, eo)});
      continue;
    }
    for (Resolution& r : completions) {
      Reading reading;
      reading.choices = describe(r, combo.traces);
      try {
        reading.resolved = apply_subs_syntactic(c.qlf, {}, &r);
      } catch (const std::exception&) {
      }
      reading.signature = truth_signature(c.qlf, r, battery);
      reading.resolution = std::move(r);
      report.readings.push_back(std::move(reading));
    }
  }
  report.classes = classify(report.readings);
  for (const ReferenceReading& ref : c.references) {
    auto sig = truth_signature(ref.formula, {}, battery);
    bool found = false;
    for (ReadingClass& k : report.classes) {
      if (k.signature == sig) {
        k.references.push_back(ref.name);
        found = true;
      }
    }
    if (ref.forbidden && found) report.forbidden_present.push_back(ref.name);
    if (!ref.forbidden && !found) report.missing_references.push_back(ref.name);
  }
  for (const EllipsisSite& s : c.sites) {
    if (s.category && s.antecedent_category) {
      report.merged_category = merge_categories(*s.category, *s.antecedent_category);
      break;
    }
  }
  if (c.category_check) {
    report.category_ok = report.merged_category &&
                         category_matches(*report.merged_category, *c.category_check);
  }
  return report;
}

std::vector<ModelSpec> separating_models(const ReadingReport& report,
                                         const std::vector<ModelSpec>& battery) {
  std::vector<std::pair<std::size_t, std::size_t>> open;
  for (std::size_t a = 0; a < report.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < report.classes.size(); ++b) open.emplace_back(a, b);
  }
  std::vector<ModelSpec> out;
  while (!open.empty()) {
    std::size_t best = 0;
    std::size_t best_count = 0;
    for (std::size_t m = 0; m < battery.size(); ++m) {
      std::size_t count = 0;
      for (const auto& [a, b] : open) {
        if (report.classes[a].signature.at(m) != report.classes[b].signature.at(m)) {
          ++count;
        }
      }
      if (count > best_count) {
        best = m;
        best_count = count;
      }
    }
    if (best_count == 0) break;
    out.push_back(battery[best]);
    std::erase_if(open, [&](const auto& p) {
      return report.classes[p.first].signature[best] !=
             report.classes[p.second].signature[best];
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Order independence.

namespace {

std::string state_key(const Resolution& r) {
  std::string key = format_assignment(ScopeAssignment{r.scopes});
  for (const auto& [name, value] : r.values) {
    key += " ?" + name + "=" + std::to_string(value.hash());
  }
  return key;
}

void scope_metavars(const Expr& e, std::vector<std::string>& out) {
  if (const auto* s = e.as<Scoped>()) {
    if (s->scope.metavar &&
        std::find(out.begin(), out.end(), *s->scope.metavar) == out.end()) {
      out.push_back(*s->scope.metavar);
    }
    scope_metavars(s->body, out);
  } else if (const auto* t = e.as<Term>()) {
    scope_metavars(t->restriction, out);
    scope_metavars(t->context, out);
  } else if (const auto* l = e.as<Lam>()) {
    scope_metavars(l->body, out);
  } else if (const auto* a = e.as<App>()) {
    scope_metavars(a->functor, out);
    for (const Expr& x : a->args) scope_metavars(x, out);
  } else if (const auto* s = e.as<Substituted>()) {
    scope_metavars(s->body, out);
  }
}

enum class StepKind { kScope, kValue };

struct Step {
  StepKind kind;
  std::string metavar;
};

class OrderDriver {
 public:
  OrderDriver(const CorpusCase& c, const ReadingOptions& opts)
      : case_(c), battery_(make_battery(c, opts.battery)) {
    eo_.cap = opts.cap;
    EllipsisPlan plan(c.qlf, c.sites);
    for (std::size_t k = 0; k < plan.sites().size(); ++k) {
      auto& opts_for = values_[plan.sites()[k].site.metavar];
      for (const auto& s : plan.solve(k, opts.extended_strict)) {
        opts_for.push_back(s.predicate);
      }
    }
    for (const auto& [name, v] : c.contexts) values_[name] = v;
    std::vector<std::string> scopes;
    scope_metavars(c.qlf, scopes);
    for (const std::string& s : scopes) steps_.push_back({StepKind::kScope, s});
    for (const auto& [name, v] : values_) steps_.push_back({StepKind::kValue, name});
  }

  const std::vector<Step>& steps() const { return steps_; }

  std::set<std::vector<bool>> run(const std::vector<Step>& order) {
    std::set<std::vector<bool>> out;
    descend(Resolution{}, order, 0, out);
    return out;
  }

 private:
  void descend(const Resolution& state, const std::vector<Step>& order,
               std::size_t i, std::set<std::vector<bool>>& out) {
    if (i == order.size()) {
      std::string key = state_key(state);
      auto it = leaves_.find(key);
      if (it == leaves_.end()) {
        std::optional<std::vector<bool>> sig;
        if (check_interpretable(case_.qlf, state).ok()) {
          sig = truth_signature(case_.qlf, state, battery_);
        }
        it = leaves_.emplace(key, sig).first;
      }
      if (it->second) out.insert(*it->second);
      return;
    }
    const Step& step = order[i];
    if (step.kind == StepKind::kValue) {
      for (const Expr& v : values_.at(step.metavar)) {
        Resolution next = state;
        next.values[step.metavar] = v;
        descend(next, order, i + 1, out);
      }
      return;
    }
    for (const auto& list : scope_proposals(state, step.metavar)) {
      Resolution next = state;
      next.scopes[step.metavar] = list;
      descend(next, order, i + 1, out);
    }
  }

  // Values `metavar` takes across the interpretable completions of `state`.
  std::set<std::vector<Index>> scope_proposals(const Resolution& state,
                                               const std::string& metavar) {
    std::set<std::vector<Index>> lists;
    for (const Resolution& r : completions(state)) {
      auto found = r.scopes.find(metavar);
      lists.insert(found == r.scopes.end() ? std::vector<Index>{} : found->second);
    }
    return lists;
  }

  const std::vector<Resolution>& completions(const Resolution& state) {
    std::string key = state_key(state);
    auto it = completions_.find(key);
    if (it != completions_.end()) return it->second;
    EnumerationOptions eo = eo_;
    for (const auto& [name, v] : values_) {
      if (!state.values.contains(name)) eo.value_options[name] = v;
    }
    return completions_.emplace(key, enumerate_completions(case_.qlf, state, eo))
        .first->second;
  }

  const CorpusCase& case_;
  std::vector<ModelSpec> battery_;
  EnumerationOptions eo_;
  std::map<std::string, std::vector<Expr>> values_;
  std::vector<Step> steps_;
  std::map<std::string, std::optional<std::vector<bool>>> leaves_;
  std::map<std::string, std::vector<Resolution>> completions_;
};

std::string format_order(const std::vector<Step>& order) {
  std::string out;
  for (const Step& s : order) {
    if (!out.empty()) out += ",";
    out += "?" + s.metavar;
  }
  return out;
}

}  // namespace

OrderReport check_order_independence(const CorpusCase& c,
                                     std::size_t permutations,
                                     std::uint64_t seed,
                                     const ReadingOptions& opts) {
  OrderReport report;
  OrderDriver driver(c, opts);
  std::mt19937_64 rng(seed);
  std::vector<Step> order = driver.steps();
  std::string first_order;
  for (std::size_t p = 0; p < permutations; ++p) {
    std::shuffle(order.begin(), order.end(), rng);
    auto classes = driver.run(order);
    ++report.permutations;
    if (p == 0) {
      report.reference = std::move(classes);
      first_order = format_order(order);
    } else if (classes != report.reference) {
      report.divergences.push_back(
          format_order(order) + " gives " + std::to_string(classes.size()) +
          " classes, " + first_order + " gives " +
          std::to_string(report.reference.size()));
    }
  }
  return report;
}

CaseResult run_case(const CorpusCase& c, const ReadingOptions& opts) {
  CaseResult result;
  result.id = c.id;
  result.expected = opts.extended_strict && c.expected_extended
                        ? c.expected_extended
                        : c.expected;
  result.report = enumerate_readings(c, opts);
  result.actual = result.report.classes.size();
  std::vector<std::string> problems;
  if (result.expected && *result.expected != result.actual) {
    problems.push_back("expected " + std::to_string(*result.expected) +
                       " classes");
  }
  for (const std::string& r : result.report.missing_references) {
    problems.push_back("reference " + r + " missing");
  }
  for (const std::string& r : result.report.forbidden_present) {
    problems.push_back("forbidden " + r + " present");
  }
  if (!result.report.category_ok) problems.push_back("category merge mismatch");
  result.pass = problems.empty();
  for (const std::string& p : problems) {
    if (!result.detail.empty()) result.detail += "; ";
    result.detail += p;
  }
  return result;
}

}  // namespace qlf
