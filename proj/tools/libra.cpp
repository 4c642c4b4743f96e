#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "libra/audit.hpp"
#include "libra/codec.hpp"
#include "libra/enumeration.hpp"
#include "libra/goedel.hpp"
#include "libra/revision.hpp"
#include "libra/substitution.hpp"
#include "libra/syntax.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace libra;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  json j;
  in >> j;
  return j;
}

syntax::Expr parse_any(syntax::Arena& a, const std::string& text, syntax::Category cat) {
  // Presentable first unless the text is plainly austere/bare.
  bool austere = text.find_first_not_of("|._ \t0123456789") == std::string::npos &&
                 text.find('|') != std::string::npos;
  if (austere) return syntax::parse(a, text, cat).expr;
  return syntax::parse_presentable(a, text, cat).expr;
}

BigNat parse_number(const std::string& s) {
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) {
    BigNat v = 0;
    for (std::size_t i = 2; i < s.size(); ++i) {
      char c = static_cast<char>(std::tolower(s[i]));
      int d = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
      if (d < 0) throw Error(Errc::malformed_formation, "bad hex digit");
      v = v * 16 + d;
    }
    return v;
  }
  if (s.find_first_not_of("0123456789") != std::string::npos)
    throw Error(Errc::malformed_formation, "expected a number");
  return BigNat(s);
}

revision::Budget budget_from_env(revision::Budget b) {
  if (const char* s = std::getenv("LIBRA_BUDGET_STEPS")) b.max_steps_per_block = std::stoul(s);
  if (const char* s = std::getenv("LIBRA_BUDGET_BLOCKS")) b.max_blocks = std::stoul(s);
  return b;
}

std::shared_ptr<revision::Fragment> load_fragment_file(syntax::Arena& a,
                                                       const std::string& path,
                                                       unsigned steps, unsigned blocks) {
  auto frag = revision::load_fragment(a, load_json_file(path),
                                      fs::path(path).stem().string());
  frag->budget = budget_from_env(frag->budget);
  if (steps) frag->budget.max_steps_per_block = steps;
  if (blocks) frag->budget.max_blocks = blocks;
  return frag;
}

void emit(const json& j, bool text, const std::string& text_repr = "") {
  if (text && !text_repr.empty())
    std::cout << text_repr;
  else
    std::cout << j.dump(2) << "\n";
}

struct ScenarioRunner {
  syntax::Arena& a;
  fs::path dir;
  json result = json::object();
  bool ok = true;

  void check(bool cond, const std::string& what) {
    result["checks"].push_back({{"what", what}, {"ok", cond}});
    ok = ok && cond;
  }

  void run_fragment_expectations(const json& scenario, const fs::path& scenario_path) {
    if (!scenario.contains("fragment")) return;
    fs::path frag_path = scenario_path.parent_path() / scenario["fragment"].get<std::string>();
    auto frag = revision::load_fragment(a, load_json_file(frag_path.string()),
                                        frag_path.stem().string());
    frag->budget = budget_from_env(frag->budget);
    auto trace = revision::run(frag);
    const json expect = scenario.value("expect", json::object());
    if (expect.contains("converged")) check(trace.converged == expect["converged"], "converged");
    if (!trace.converged) return;
    if (expect.contains("closure_block_at_most"))
      check(trace.closure_block <= expect["closure_block_at_most"].get<std::uint64_t>(),
            "closure within block budget");
    auto classify_of = [&](const std::string& s) {
      syntax::Expr e = parse_any(a, s, syntax::Category::formula);
      return trace.classify(e.as_formula());
    };
    auto status_name = [](revision::Status st) {
      return st == revision::Status::MaximThesis  ? "maxim"
             : st == revision::Status::MinorThesis ? "minor"
                                                   : "non-thesis";
    };
    const json classifications = expect.value("classifications", json::object());
    for (auto& [k, v] : classifications.items()) {
      check(status_name(classify_of(k).status) == v.get<std::string>(),
            "classification of " + k);
    }
    for (const auto& pair : expect.value("complementary", json::array())) {
      auto A = parse_any(a, pair[0], syntax::Category::formula).as_formula();
      auto B = parse_any(a, pair[1], syntax::Category::formula).as_formula();
      check(revision::relations(trace, A, B).complementary, "complementary pair");
    }
    for (const auto& pair : expect.value("not_connected", json::array())) {
      auto A = parse_any(a, pair[0], syntax::Category::formula).as_formula();
      auto B = parse_any(a, pair[1], syntax::Category::formula).as_formula();
      check(!revision::relations(trace, A, B).connected, "disconnected pair");
    }
    const json kinds = expect.value("kind", json::object());
    for (auto& [k, v] : kinds.items()) {
      auto t = parse_any(a, k, syntax::Category::term).as_term();
      check(revision::kind(trace, t) == v.get<bool>(), "kind of " + k);
    }
    if (expect.contains("mp_witness")) {
      auto w = audit::find_mp_failure(trace);
      check(w.has_value() == expect["mp_witness"].get<bool>(), "mp witness presence");
      if (w) result["mp_witness"] = *w;
    }
    if (expect.value("audit_zero_failures", false)) {
      auto rep = audit::run_all(trace);
      check(rep.all_ok(), "audit zero failures");
      result["audit"] = rep.to_json();
    }
    const json stage_words = expect.value("stage_words", json::object());
    for (auto& [k, v] : stage_words.items()) {
      auto A = parse_any(a, k, syntax::Category::formula).as_formula();
      check(revision::word_to_json(trace, trace.word(A)) == v, "stage word of " + k);
    }
  }

  void run_enum(const json& scenario) {
    if (!scenario.contains("enum")) return;
    const json& e = scenario["enum"];
    auto prefix = enumeration::enumerate_prefix(a, e.value("count", 5ull));
    json values = json::array();
    for (const auto& entry : prefix.entries) values.push_back(entry.value.str());
    result["enum_values"] = values;
    if (e.contains("expect_values")) check(values == e["expect_values"], "enumeration prefix");
  }

  void run_diag(const json& scenario) {
    if (!scenario.contains("diag")) return;
    const json& d = scenario["diag"];
    bool all = true;
    for (const auto& s : d.value("formulas", json::array())) {
      auto A = parse_any(a, s.get<std::string>(), syntax::Category::formula).as_formula();
      auto res = substitution::diagonal(a, A);
      all = all && res.verified;
      result["diag"].push_back(res.certificate);
    }
    if (d.value("expect_verified", true)) check(all, "diagonal certificates verified");
  }
};

int run_scenario(syntax::Arena& a, const std::string& name, const std::string& dir) {
  fs::path scenario_path = fs::path(dir) / (name + ".json");
  json scenario = load_json_file(scenario_path.string());
  ScenarioRunner r{a, fs::path(dir)};
  r.result["name"] = name;
  r.run_fragment_expectations(scenario, scenario_path);
  r.run_enum(scenario);
  r.run_diag(scenario);
  r.result["ok"] = r.ok;
  std::cout << r.result.dump(2) << "\n";
  return r.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for the bar-dot language, its codings and its revision semantics"};
  app.require_subcommand(1);
  syntax::Arena arena;
  bool text = false;
  unsigned threads = 1;
  app.add_flag("--text", text, "human-readable output where available");
  app.add_option("--threads", threads, "worker threads for audits");

  std::string in_text, category = "auto", form = "presentable", to_form = "presentable";
  std::string number_arg, file_arg, sentence, term_a, term_b, scen_name;
  std::string scen_dir = "scenarios";
  std::uint64_t index_arg = 0, count_arg = 5;
  unsigned max_bits = 14, steps = 0, blocks = 0;
  std::uint64_t budget_bits = 1u << 16;
  bool hex = false;

  auto* c_parse = app.add_subcommand("parse", "parse austere/bare/presentable text");
  c_parse->add_option("text", in_text)->required();
  c_parse->add_option("--category", category, "term|formula|auto");
  auto* c_print = app.add_subcommand("print", "reprint an expression in another form");
  c_print->add_option("text", in_text)->required();
  c_print->add_option("--category", category);
  c_print->add_option("--to", to_form, "austere|bare|presentable");
  auto* c_encode = app.add_subcommand("encode", "formation text to number");
  c_encode->add_option("text", in_text)->required();
  c_encode->add_flag("--hex", hex);
  auto* c_decode = app.add_subcommand("decode", "number to formation text");
  c_decode->add_option("number", number_arg)->required();
  auto* c_code = app.add_subcommand("code", "the coding of a number or an expression");
  c_code->add_option("input", in_text)->required();
  c_code->add_option("--budget-bits", budget_bits);
  auto* c_sub = app.add_subcommand("sub", "code-level substitution");
  c_sub->add_option("--formula", in_text)->required();
  c_sub->add_option("--index", index_arg);
  c_sub->add_option("--term", term_a)->required();
  auto* c_diag = app.add_subcommand("diag", "diagonal sentence with certificate");
  c_diag->add_option("--formula", in_text)->required();
  auto* c_enum = app.add_subcommand("enum", "enumeration prefix of cognomina");
  c_enum->add_option("--count", count_arg);
  c_enum->add_option("--max-bits", max_bits);
  auto* c_sim = app.add_subcommand("simulate", "run a fragment to fragment closure");
  c_sim->add_option("fragment", file_arg)->required();
  c_sim->add_option("--steps", steps);
  c_sim->add_option("--blocks", blocks);
  auto* c_cls = app.add_subcommand("classify", "classify sentences of a fragment");
  c_cls->add_option("fragment", file_arg)->required();
  c_cls->add_option("--sentence", sentence);
  c_cls->add_option("--steps", steps);
  c_cls->add_option("--blocks", blocks);
  auto* c_rel = app.add_subcommand("relations", "valency relations of two sentences");
  c_rel->add_option("fragment", file_arg)->required();
  c_rel->add_option("--a", term_a)->required();
  c_rel->add_option("--b", term_b)->required();
  auto* c_audit = app.add_subcommand("audit", "posit and regulation audits of a fragment");
  c_audit->add_option("fragment", file_arg)->required();
  c_audit->add_option("--steps", steps);
  c_audit->add_option("--blocks", blocks);
  auto* c_scen = app.add_subcommand("scenario", "run a shipped scenario");
  auto* c_scen_run = c_scen->add_subcommand("run", "run one scenario by name");
  c_scen_run->add_option("name", scen_name)->required();
  c_scen_run->add_option("--dir", scen_dir);

  CLI11_PARSE(app, argc, argv);

  auto cat_of = [&](const std::string& s) {
    if (s == "term") return syntax::Category::term;
    if (s == "formula") return syntax::Category::formula;
    return syntax::Category::auto_detect;
  };
  auto form_of = [&](const std::string& s) {
    if (s == "austere") return syntax::Form::austere;
    if (s == "bare") return syntax::Form::bare;
    return syntax::Form::presentable;
  };

  try {
    if (*c_parse) {
      auto r = parse_any(arena, in_text, cat_of(category));
      json out;
      out["category"] = r.is_term ? "term" : "formula";
      out["presentable"] = syntax::print(arena, r, syntax::Form::presentable);
      out["austere"] = syntax::print(arena, r, syntax::Form::austere);
      out["bare"] = syntax::print(arena, r, syntax::Form::bare);
      json ns = json::array();
      for (auto v : arena.noemata(r.id)) ns.push_back(v);
      out["noemata"] = ns;
      if (r.is_term) {
        auto cls = syntax::classify_term(arena, r.as_term());
        out["classes"] = {{"praenomen", cls.praenomen},
                          {"cognomen", cls.cognomen},
                          {"pronomen", cls.pronomen}};
        if (cls.cognomen) out["caliber"] = syntax::caliber(arena, r.as_term());
      }
      emit(out, text, out["presentable"].get<std::string>() + "\n");
      return 0;
    }
    if (*c_print) {
      auto r = parse_any(arena, in_text, cat_of(category));
      std::cout << syntax::print(arena, r, form_of(to_form)) << "\n";
      return 0;
    }
    if (*c_encode) {
      auto r = syntax::parse(arena, in_text, syntax::Category::auto_detect);
      BigNat v = codec::value_of(arena, r.expr);
      if (hex) {
        std::cout << "0x" << std::hex << v << "\n";
      } else {
        std::cout << v.str() << "\n";
      }
      return 0;
    }
    if (*c_decode) {
      BigNat n = number_arg.find_first_of("|.") != std::string::npos
                     ? codec::value_of(
                           arena, syntax::parse(arena, number_arg,
                                                syntax::Category::auto_detect)
                                      .expr)
                     : parse_number(number_arg);
      auto syms = codec::formation_of(n);
      json out;
      std::string austere, bare;
      for (auto k : syms) {
        austere.push_back('|');
        austere.append(k, '.');
        bare += "|_" + std::to_string(k);
      }
      out["austere"] = austere;
      out["bare"] = bare;
      out["symbols"] = syms.size();
      out["bits"] = codec::length(n);
      try {
        auto e = syntax::parse_symbols(arena, syms, syntax::Category::auto_detect);
        out["category"] = e.detected == syntax::Category::term ? "term" : "formula";
        out["presentable"] = syntax::print(arena, e.expr, syntax::Form::presentable);
      } catch (const Error&) {
        out["category"] = "none";
      }
      emit(out, text, austere + "\n");
      return 0;
    }
    if (*c_code) {
      json out;
      goedel::CodeDag code(0);
      if (in_text.find_first_not_of("0123456789") == std::string::npos) {
        code = goedel::goedel_code(parse_number(in_text));
      } else {
        auto e = parse_any(arena, in_text, syntax::Category::auto_detect);
        code = goedel::goedel_code(codec::value_of(arena, e));
      }
      out["source"] = code.source().str();
      if (auto bits = code.bit_length(BigNat(1) << 24)) {
        out["bit_length"] = bits->str();
      } else {
        out["bit_length"] = "exceeds 2^24";
      }
      if (auto bits = code.bit_length(BigNat(budget_bits))) {
        auto s = goedel::materialize_string(code, budget_bits);
        std::string austere;
        for (char c : s) austere.push_back(c == '1' ? '|' : '.');
        out["austere"] = austere;
        syntax::TermId t = goedel::numeral_expr(arena, code.source());
        out["presentable"] =
            syntax::print(arena, syntax::Expr::term(t), syntax::Form::presentable);
      } else {
        out["materialization"] = "over budget";
      }
      emit(out, text);
      return 0;
    }
    if (*c_sub) {
      auto x = parse_any(arena, in_text, syntax::Category::auto_detect);
      auto y = parse_any(arena, term_a, syntax::Category::term);
      auto r = substitution::sub(arena, substitution::CodedExpr{x}, index_arg,
                                 substitution::CodedExpr{y});
      json out;
      out["result"] = syntax::print(arena, r.expr, syntax::Form::presentable);
      if (auto bits = syntax::expr_bit_length_capped(arena, r.expr, BigNat(1) << 20))
        out["value"] = codec::value_of(arena, r.expr).str();
      emit(out, text, out["result"].get<std::string>() + "\n");
      return 0;
    }
    if (*c_diag) {
      auto A = parse_any(arena, in_text, syntax::Category::formula).as_formula();
      auto res = substitution::diagonal(arena, A);
      emit(res.certificate, text);
      return res.verified ? 0 : 1;
    }
    if (*c_enum) {
      auto prefix = enumeration::enumerate_prefix(arena, count_arg, max_bits);
      json out = json::array();
      for (const auto& e : prefix.entries) {
        out.push_back(
            {{"index", e.index},
             {"value", e.value.str()},
             {"austere",
              syntax::print(arena, syntax::Expr::term(e.representative), syntax::Form::austere)},
             {"presentable", syntax::print(arena, syntax::Expr::term(e.representative),
                                           syntax::Form::presentable)},
             {"had_unknowns", e.had_unknowns}});
      }
      emit(out, text);
      return 0;
    }
    if (*c_sim || *c_cls || *c_rel || *c_audit) {
      auto frag = load_fragment_file(arena, file_arg, steps, blocks);
      auto trace = revision::run(frag);
      if (*c_sim) {
        emit(trace.to_json(), text);
        return trace.converged ? 0 : 2;
      }
      if (!trace.converged) throw Error(Errc::not_converged, "trace did not converge");
      if (*c_cls) {
        json out;
        auto one = [&](syntax::FormulaId f) {
          auto c = trace.classify(f);
          const auto& w = trace.word(f);
          auto v = trace.valor_of(w);
          return json{{"formula",
                       syntax::print(arena, syntax::Expr::formula(f), syntax::Form::presentable)},
                      {"classification", c.status == revision::Status::MaximThesis  ? "maxim"
                                         : c.status == revision::Status::MinorThesis ? "minor"
                                                                                     : "non-thesis"},
                      {"valency", revision::valency_json(trace, w)},
                      {"valor", {{"at_closure", v.at_closure},
                                 {"block", v.idx.block},
                                 {"offset", v.idx.offset}}}};
        };
        if (!sentence.empty()) {
          auto f = parse_any(arena, sentence, syntax::Category::formula).as_formula();
          out = one(f);
        } else {
          out = json::array();
          for (auto f : frag->tracked) out.push_back(one(f));
        }
        emit(out, text);
        return 0;
      }
      if (*c_rel) {
        auto A = parse_any(arena, term_a, syntax::Category::formula).as_formula();
        auto B = parse_any(arena, term_b, syntax::Category::formula).as_formula();
        auto r = revision::relations(trace, A, B);
        json out = {{"parivalent", r.parivalent},
                    {"altervalent", r.altervalent},
                    {"contravalent", r.contravalent},
                    {"incompatible", r.incompatible},
                    {"paridictive", r.paridictive},
                    {"contradictive", r.contradictive},
                    {"complementary", r.complementary},
                    {"connected", r.connected},
                    {"ambovalence", revision::word_to_json(trace, r.ambovalence)},
                    {"velvalence", revision::word_to_json(trace, r.velvalence)},
                    {"subvalence", revision::word_to_json(trace, r.subvalence)},
                    {"homovalence", revision::word_to_json(trace, r.homovalence)}};
        emit(out, text);
        return 0;
      }
      auto rep = audit::run_all(trace, threads);
      emit(rep.to_json(), text, rep.to_text());
      return rep.all_ok() ? 0 : 1;
    }
    if (*c_scen_run) {
      return run_scenario(arena, scen_name, scen_dir);
    }
  } catch (const syntax::AmbiguousError& e) {
    json err = {{"error", "Ambiguous"}, {"message", e.what()}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  } catch (const Error& e) {
    json err = {{"error", e.code_name()}, {"message", e.what()}};
    std::cerr << err.dump(2) << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << json({{"error", "Internal"}, {"message", e.what()}}).dump(2) << "\n";
    return 1;
  }
  return 0;
}
