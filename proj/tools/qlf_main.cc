#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qlf/discharge.h"
#include "qlf/ellipsis.h"
#include "qlf/evaluator.h"
#include "qlf/harness.h"
#include "qlf/scoping.h"
#include "qlf/text.h"

#ifndef QLF_CORPUS_DIR
#define QLF_CORPUS_DIR "corpus"
#endif

namespace fs = std::filesystem;
using namespace qlf;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitOrder = 2;
constexpr int kExitInput = 3;

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path corpus_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("QLF_CORPUS")) return env;
  return QLF_CORPUS_DIR;
}

const CorpusCase& find_case(const std::vector<CorpusCase>& cases,
                            const std::string& id) {
  for (const CorpusCase& c : cases) {
    if (c.id == id) return c;
  }
  throw CorpusError("no case '" + id + "'", 0);
}

// A case file, or a corpus directory, narrowed to one case if requested.
std::vector<CorpusCase> load_cases(const std::string& path, const std::string& id) {
  std::vector<CorpusCase> cases = fs::is_directory(path) ? load_corpus(path)
                                                         : load_corpus_file(path);
  if (id.empty()) return cases;
  return {find_case(cases, id)};
}

std::string bits(const std::vector<bool>& sig) {
  std::string out;
  for (bool b : sig) out += b ? '1' : '0';
  return out;
}

std::string format_value(const Value& v) {
  if (const bool* b = v.truth()) return *b ? "true" : "false";
  if (const Atom* a = v.atom()) return a->literal ? "\"" + a->name + "\"" : a->name;
  return "<property>";
}

int cmd_parse(const std::string& file) {
  Expr e = parse_expr(read_file(file));
  std::cout << print_expr(e) << "\n";
  return kExitPass;
}

int cmd_model_check(const std::string& file) {
  ModelSpec m = parse_model(read_file(file));
  std::cout << print_model(m);
  return kExitPass;
}

int cmd_scopings(const std::string& file, bool all) {
  Expr e = parse_expr(read_file(file));
  if (all) {
    for (const auto& [r, d] : enumerate_diagnosed(e, {})) {
      std::cout << format_assignment(ScopeAssignment{r.scopes}) << "\t"
                << format_diagnosis(d) << "\n";
    }
    return kExitPass;
  }
  for (const ScopeAssignment& a : enumerate_scopings(e)) {
    std::cout << format_assignment(a) << "\t"
              << format_diagnosis(check_interpretable(e, a)) << "\n";
  }
  return kExitPass;
}

int cmd_eval(const std::string& model_file, const std::string& expr_file) {
  ModelSpec m = parse_model(read_file(model_file));
  Expr e = parse_expr(read_file(expr_file));
  Valuation v = evaluate(e, m, {});
  if (!v.interpretable()) {
    std::cout << "uninterpretable";
    if (v.failure) std::cout << " (" << failure_name(*v.failure) << ")";
    std::cout << "\n";
    return kExitPass;
  }
  std::cout << "{";
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    if (i) std::cout << ", ";
    std::cout << format_value(v.values[i]);
  }
  std::cout << "}\n";
  return kExitPass;
}

int cmd_classify(const std::string& dir, const std::string& expr_file) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".model") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ModelSpec> battery;
  for (const auto& f : files) battery.push_back(parse_model(read_file(f)));
  Expr e = parse_expr(read_file(expr_file));
  std::cout << bits(truth_signature(e, {}, battery)) << "\n";
  return kExitPass;
}

int cmd_readings(const std::string& file, const std::string& id,
                 const ReadingOptions& opts) {
  for (const CorpusCase& c : load_cases(file, id)) {
    ReadingReport r = enumerate_readings(c, opts);
    std::cout << "case " << c.id << ": " << r.classes.size() << " classes, "
              << r.readings.size() << " interpretable resolutions, "
              << r.rejections.size() << " rejected solutions\n";
    for (std::size_t k = 0; k < r.classes.size(); ++k) {
      const ReadingClass& cl = r.classes[k];
      std::cout << "  class " << k + 1 << " [" << cl.members << "] "
                << bits(cl.signature).substr(0, 16) << "...";
      for (const std::string& n : cl.references) std::cout << " =" << n;
      std::cout << "\n    " << cl.representative.choices << "\n";
      if (cl.representative.resolved) {
        std::cout << "    " << print_expr(cl.representative.resolved) << "\n";
      }
    }
    for (const Rejection& rj : r.rejections) {
      std::cout << "  rejected " << rj.choices << "\t"
                << format_diagnosis(rj.diagnosis) << "\n";
    }
    if (r.merged_category) {
      std::cout << "  merged category " << print_category(*r.merged_category)
                << "\n";
    }
  }
  return kExitPass;
}

int cmd_corpus_run(const std::string& dir, const std::string& id,
                   const ReadingOptions& opts, bool tsv) {
  std::vector<CorpusCase> cases = load_cases(dir, id);
  bool all_pass = true;
  if (tsv) std::cout << "case\texpected\tactual\tstatus\n";
  for (const CorpusCase& c : cases) {
    CaseResult r = run_case(c, opts);
    all_pass = all_pass && r.pass;
    std::string expected = r.expected ? std::to_string(*r.expected) : "-";
    if (tsv) {
      std::cout << r.id << "\t" << expected << "\t" << r.actual << "\t"
                << (r.pass ? "pass" : "fail") << "\n";
      continue;
    }
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << "  expected "
              << expected << "  actual " << r.actual;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << "\n";
    std::map<std::string, int> reasons;
    for (const Rejection& rj : r.report.rejections) {
      ++reasons[std::string(verdict_name(rj.diagnosis.verdict))];
    }
    for (const auto& [reason, n] : reasons) {
      std::cout << "     rejected " << n << " x " << reason << "\n";
    }
  }
  return all_pass ? kExitPass : kExitMismatch;
}

int cmd_witnesses(const std::string& dir, const std::string& id,
                  ReadingOptions opts, const std::string& out_dir) {
  const CorpusCase c = load_cases(dir, id).at(0);
  CorpusCase bare = c;
  bare.witnesses.clear();
  ReadingReport r = enumerate_readings(bare, opts);
  std::vector<ModelSpec> models =
      separating_models(r, make_battery(bare, opts.battery));
  std::cout << r.classes.size() << " classes, " << models.size()
            << " separating models\n";
  for (std::size_t i = 0; i < models.size(); ++i) {
    std::string text = print_model(models[i]);
    if (out_dir.empty()) {
      std::cout << "# model " << i + 1 << "\n" << text;
    } else {
      fs::path p = fs::path(out_dir) / (c.id + "-" + std::to_string(i + 1) + ".model");
      std::ofstream(p) << text;
      std::cout << p.string() << "\n";
    }
  }
  return kExitPass;
}

int cmd_order_check(const std::string& dir, const std::string& id,
                    std::size_t permutations, std::uint64_t seed,
                    const ReadingOptions& opts) {
  bool ok = true;
  for (const CorpusCase& c : load_cases(dir, id)) {
    OrderReport r = check_order_independence(c, permutations, seed, opts);
    std::cout << (r.ok() ? "PASS " : "FAIL ") << c.id << "  " << r.permutations
              << " orders, " << r.reference.size() << " classes\n";
    for (const std::string& d : r.divergences) std::cout << "     " << d << "\n";
    ok = ok && r.ok();
  }
  return ok ? kExitPass : kExitOrder;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QLF ellipsis resolution and evaluation"};
  app.require_subcommand(1);

  std::string file;
  std::string model_file;
  std::string battery_dir;
  std::string case_id;
  std::string corpus_flag;
  std::string format = "text";
  bool all = false;
  std::size_t permutations = 50;
  std::uint64_t seed = 1;
  ReadingOptions opts;

  auto add_battery = [&](CLI::App* sub) {
    sub->add_flag("--extended-strict", opts.extended_strict,
                  "strict-only candidates from nested ellipses");
    sub->add_option("--battery-seed", opts.battery.seed, "random model seed");
    sub->add_option("--battery-size", opts.battery.size, "random model count");
  };

  auto* parse = app.add_subcommand("parse", "parse and print an expression");
  parse->add_option("FILE", file)->required();

  auto* model_check = app.add_subcommand("model-check", "parse and print a model");
  model_check->add_option("FILE", file)->required();

  auto* scopings = app.add_subcommand("scopings", "enumerate scope assignments");
  scopings->add_option("FILE", file)->required();
  scopings->add_flag("--all", all, "include uninterpretable assignments");

  auto* readings = app.add_subcommand("readings", "enumerate readings of cases");
  readings->add_option("CASE-FILE", file)->required();
  readings->add_option("--case", case_id, "only this case");
  add_battery(readings);

  auto* eval = app.add_subcommand("eval", "value set of an expression");
  eval->add_option("--model", model_file)->required();
  eval->add_option("EXPR-FILE", file)->required();

  auto* classify_cmd = app.add_subcommand("classify", "truth signature");
  classify_cmd->add_option("--battery", battery_dir)->required();
  classify_cmd->add_option("EXPR-FILE", file)->required();

  auto* corpus = app.add_subcommand("corpus", "corpus operations");
  corpus->require_subcommand(1);
  auto* run = corpus->add_subcommand("run", "check reading counts");
  run->add_option("ID", case_id, "only this case");
  run->add_option("--corpus", corpus_flag, "corpus directory or file");
  run->add_option("--format", format)->check(CLI::IsMember({"text", "tsv"}));
  add_battery(run);

  std::string out_dir;
  auto* witnesses = corpus->add_subcommand("witnesses", "derive separating models");
  witnesses->add_option("ID", case_id)->required();
  witnesses->add_option("--corpus", corpus_flag, "corpus directory or file");
  witnesses->add_option("--out", out_dir, "write models here");
  add_battery(witnesses);

  auto* order = app.add_subcommand("order-check", "order-independence driver");
  order->add_option("ID", case_id, "case id")->required();
  order->add_option("--permutations", permutations);
  order->add_option("--seed", seed);
  order->add_option("--corpus", corpus_flag, "corpus directory or file");
  add_battery(order);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) return cmd_parse(file);
    if (*model_check) return cmd_model_check(file);
    if (*scopings) return cmd_scopings(file, all);
    if (*readings) return cmd_readings(file, case_id, opts);
    if (*eval) return cmd_eval(model_file, file);
    if (*classify_cmd) return cmd_classify(battery_dir, file);
    if (*run) {
      return cmd_corpus_run(corpus_dir(corpus_flag).string(), case_id, opts,
                            format == "tsv");
    }
    if (*witnesses) {
      return cmd_witnesses(corpus_dir(corpus_flag).string(), case_id, opts, out_dir);
    }
    if (*order) {
      return cmd_order_check(corpus_dir(corpus_flag).string(), case_id,
                             permutations, seed, opts);
    }
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CorpusError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kExitInput;
  } catch (const WellFormednessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitPass;
}
