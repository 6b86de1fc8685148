// gwcalc: compute, verify and cache genus-0 Gromov-Witten invariants.
//
// Exit codes: 0 success, 1 failed verification or I/O error, 2 bad flags,
// 3 inconsistent relations, 4 underdetermined system.

#include <gwcalc/gwcalc.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace gwcalc;

namespace {

struct Options {
  std::string target;
  std::string target_file;
  bool real = false;
  int max_degree = -1;
  std::optional<int> degree;
  std::string insertions;
  std::string insertions_only;
  std::string seed_sign = "+";
  std::vector<std::string> suites;
  std::string format = "csv";
  std::string cache;
  int threads = 0;
  int descendant_depth = 2;
  int max_length = 5;
  int t_degree = 6;
  std::string series = "phi";
};

TargetSpace load_target(const Options& o) {
  if (!o.target.empty() && !o.target_file.empty()) throw Error("give either --target or --target-file, not both");
  if (!o.target_file.empty()) {
    std::ifstream in(o.target_file);
    if (!in) throw Error("cannot read target file " + o.target_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed target file: ") + e.what());
    }
    return target_from_json(j);
  }
  if (o.target.empty()) throw Error("--target or --target-file is required");
  return target_from_name(o.target);
}

int parse_seed(const std::string& s) {
  if (s == "+" || s == "+1" || s == "1") return 1;
  if (s == "-" || s == "-1") return -1;
  throw Error("--seed-sign must be + or -");
}

std::optional<std::filesystem::path> cache_path(const Options& o) {
  if (!o.cache.empty()) return std::filesystem::path(o.cache);
  if (const char* env = std::getenv("GWCALC_CACHE"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

bool real_capable(const TargetSpace& t) {
  return t.has_involution() && t.involution_is_diagonal() && t.is_projective() && t.complex_dim() % 2 == 1;
}

/// Loads the cache (if any), extends it to the requested degrees and writes it back.
InvariantTable obtain_table(const Options& o, const TargetSpace& t, bool real, int complex_degree, int real_degree) {
  const int seed = parse_seed(o.seed_sign);
  const auto path = cache_path(o);
  std::optional<InvariantTable> table;
  if (path && std::filesystem::exists(*path)) {
    table.emplace(InvariantTable::load(*path, t));
    if (real && table->seed_sign() != seed) throw Error("cache holds the opposite seed sign; clear it first");
  } else {
    table.emplace(t, seed);
  }
  const std::size_t before = table->size();
  SolveOptions so;
  so.threads = o.threads;
  extend_primary_complex(*table, complex_degree, so);
  if (real) extend_primary_real(*table, real_degree, seed, so);
  if (path && table->size() != before) table->save(*path);
  return std::move(*table);
}

void check_format(const std::string& f) {
  if (f != "csv" && f != "json") throw Error("--format must be csv or json");
}

nlohmann::json key_json(const InvariantKey& k, const Rational& v) {
  nlohmann::json ins = nlohmann::json::array();
  for (const auto& i : k.insertions) ins.push_back({{"a", i.a}, {"basis", i.basis}});
  return {{"kind", kind_name(k.kind)}, {"genus", k.genus}, {"degree", k.degree}, {"insertions", ins},
          {"value", to_fraction_string(v)}};
}

int cmd_compute(const Options& o) {
  check_format(o.format);
  const TargetSpace t = load_target(o);
  const Kind kind = o.real ? Kind::real : Kind::complex;
  if (o.degree && *o.degree < 0) throw Error("--degree must be non-negative");
  int max_degree = o.max_degree >= 0 ? o.max_degree : (o.degree ? *o.degree : 3);
  if (o.degree) max_degree = std::max(max_degree, *o.degree);
  const int complex_degree = o.real ? complex_degree_needed(t, max_degree) : max_degree;
  const InvariantTable table = obtain_table(o, t, o.real, complex_degree, max_degree);

  if (!o.insertions.empty()) {
    if (!o.degree) throw Error("--insertions needs --degree");
    const auto raw = parse_insertions(t, o.insertions);
    InvariantKey k{kind, 0, *o.degree, raw};
    ComplexInvariants complex(table);
    Rational v = 0;
    std::vector<Insertion> ins;
    for (const auto& b : raw) ins.push_back({b.a, t.basis_class(static_cast<std::size_t>(b.basis))});
    if (kind == Kind::complex) {
      v = complex.value(*o.degree, ins);
    } else {
      RealInvariants real(table, complex);
      v = real.value(*o.degree, ins);
    }
    if (o.format == "json")
      std::cout << key_json(k, v).dump(1) << "\n";
    else
      std::cout << "kind,genus,degree,insertions,value\n" << csv_row(k, v);
    return 0;
  }

  std::optional<int> only;
  if (!o.insertions_only.empty()) only = parse_class_name(t, o.insertions_only);
  InvariantTable shown(t, table.seed_sign());
  for (const auto& [k, e] : table.entries()) {
    if (k.kind != kind) continue;
    if (o.degree && k.degree != *o.degree) continue;
    if (k.degree > max_degree) continue;
    if (only) {
      bool all = true;
      for (const auto& i : k.insertions) all = all && i.a == 0 && i.basis == *only;
      if (!all) continue;
    }
    shown.put(k, e.value, e.provenance);
  }
  if (o.format == "json")
    std::cout << shown.to_json().dump(1) << "\n";
  else
    std::cout << table_to_csv(shown);
  return 0;
}

int cmd_verify(const Options& o) {
  const TargetSpace t = load_target(o);
  std::vector<std::string> suites = o.suites;
  const bool real = o.real || real_capable(t);
  if (suites.empty()) {
    for (const auto& s : suite_names())
      if (real || (s != "rwdvv" && s != "rtrr-cross")) suites.push_back(s);
  }
  for (const auto& s : suites) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) throw Error("unknown suite: " + s);
  }
  VerifyOptions vo;
  vo.max_degree = o.max_degree >= 0 ? o.max_degree : 2;
  vo.max_descendant = o.descendant_depth;
  vo.max_length = o.max_length;
  vo.threads = o.threads;
  const InvariantTable table = obtain_table(o, t, real, vo.max_degree, vo.max_degree);

  bool all = true;
  for (const auto& s : suites) {
    const SuiteResult r = run_suite(s, table, vo);
    std::cout << r.name << ": " << (r.passed ? "pass" : "FAIL") << " (" << r.checked << " checked)\n";
    if (!r.passed) {
      std::cout << "  " << r.counterexample << "\n";
      all = false;
    }
  }
  return all ? 0 : 1;
}

int cmd_potential(const Options& o) {
  const TargetSpace t = load_target(o);
  Truncation tr;
  tr.max_q = o.max_degree >= 0 ? o.max_degree : 3;
  tr.max_t_degree = o.t_degree;
  tr.max_descendant = o.descendant_depth;
  const bool wants_complex = o.series == "phi" || o.series == "f0";
  if (!wants_complex && o.series != "phi-real" && o.series != "omega" && o.series != "f0-real")
    throw Error("unknown series: " + o.series);
  const bool real = !wants_complex;
  const int complex_degree = real ? complex_degree_needed(t, tr.max_q) : tr.max_q;
  const InvariantTable table = obtain_table(o, t, real, complex_degree, tr.max_q);
  const Potentials p = build_potentials(table, tr, real, o.threads);
  const std::map<std::string, const std::optional<GradedSeries>*> by_name{
      {"phi", &p.phi}, {"f0", &p.f0}, {"phi-real", &p.phi_real}, {"omega", &p.omega}, {"f0-real", &p.f0_real}};
  const auto& s = *by_name.at(o.series);
  if (!s) throw Error("series " + o.series + " is not available for " + t.name());
  std::cout << s->to_json().dump(1) << "\n";
  return 0;
}

int cmd_cache(const Options& o, const std::string& action) {
  const auto path = cache_path(o);
  if (!path) throw Error("no cache: pass --cache or set GWCALC_CACHE");
  if (action == "clear") {
    std::filesystem::remove(*path);
    std::cout << "0 entries\n";
    return 0;
  }
  if (!std::filesystem::exists(*path)) {
    if (action == "export") {
      check_format(o.format);
      if (o.format == "csv") std::cout << "kind,genus,degree,insertions,value\n";
      else std::cout << "{}\n";
      return 0;
    }
    std::cout << "0 entries\n";
    return 0;
  }
  const InvariantTable table = InvariantTable::load(*path);
  if (action == "export") {
    check_format(o.format);
    if (o.format == "json")
      std::cout << table.to_json().dump(1) << "\n";
    else
      std::cout << table_to_csv(table);
    return 0;
  }
  std::cout << table.size() << " entries\n";
  if (table.size() == 0) return 0;
  std::cout << "target " << table.target().name() << "\n";
  std::cout << "seed_sign " << (table.seed_sign() > 0 ? "+1" : "-1") << "\n";
  std::map<std::pair<std::string, int>, std::size_t> counts;
  for (const auto& [k, e] : table.entries()) ++counts[{kind_name(k.kind), k.degree}];
  for (const auto& [kd, n] : counts) std::cout << kd.first << " d=" << kd.second << ": " << n << "\n";
  return 0;
}

void add_target_flags(CLI::App* c, Options& o) {
  c->add_option("--target", o.target, "Built-in target: P<n>, P<2m-1>-tau, P<2m-1>-eta");
  c->add_option("--target-file", o.target_file, "Target space JSON");
  c->add_flag("--real", o.real, "Real invariants (target needs an involution)");
  c->add_option("--max-degree", o.max_degree, "Largest curve degree to solve")->check(CLI::NonNegativeNumber);
  c->add_option("--seed-sign", o.seed_sign, "Sign of the real seed <pt>_1: + or -");
  c->add_option("--cache", o.cache, "Cache file (default: $GWCALC_CACHE)");
  c->add_option("--threads", o.threads, "Worker threads (0: hardware count)")->check(CLI::NonNegativeNumber);
  c->add_option("--descendant-depth", o.descendant_depth, "Largest psi power considered")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genus-0 Gromov-Witten invariants of projective spaces"};
  app.require_subcommand(1);
  Options o;
  std::string cache_action;

  auto* compute = app.add_subcommand("compute", "Solve and print invariants");
  add_target_flags(compute, o);
  compute->add_option("--degree", o.degree, "Only this degree (required with --insertions)");
  compute->add_option("--insertions", o.insertions, "One invariant, e.g. \"tau1(h),pt\"");
  compute->add_option("--insertions-only", o.insertions_only, "Only primaries with every insertion this class");
  compute->add_option("--format", o.format, "csv or json");

  auto* verify = app.add_subcommand("verify", "Run consistency suites");
  add_target_flags(verify, o);
  verify->add_option("--suite", o.suites, "Suites to run (default: all applicable)")->delimiter(',');
  verify->add_option("--max-length", o.max_length, "Most insertions in checked keys")->check(CLI::PositiveNumber);

  auto* potential = app.add_subcommand("potential", "Print a truncated genus-0 potential as JSON");
  add_target_flags(potential, o);
  potential->add_option("--series", o.series, "phi, f0, phi-real, omega or f0-real");
  potential->add_option("--t-degree", o.t_degree, "Largest total t-degree")->check(CLI::NonNegativeNumber);

  auto* cache = app.add_subcommand("cache", "Inspect the invariant cache");
  cache->add_option("action", cache_action, "show, clear or export")
      ->required()
      ->check(CLI::IsMember({"show", "clear", "export"}));
  cache->add_option("--cache", o.cache, "Cache file (default: $GWCALC_CACHE)");
  cache->add_option("--format", o.format, "csv or json (export)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*compute) return cmd_compute(o);
    if (*verify) return cmd_verify(o);
    if (*potential) return cmd_potential(o);
    return cmd_cache(o, cache_action);
  } catch (const InconsistentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConflictError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const UnderdeterminedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
