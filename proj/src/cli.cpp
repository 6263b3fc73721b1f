#include "deltamap/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "deltamap/decode.hpp"
#include "deltamap/deltadist.hpp"
#include "deltamap/errors.hpp"
#include "deltamap/io.hpp"
#include "deltamap/oracle.hpp"
#include "deltamap/relaxation.hpp"

namespace deltamap::cli {

namespace {

struct InputOptions {
  std::string path;
  std::string format = "auto";
  bool neg_log = false;
};

void add_input(CLI::App& app, InputOptions& input, const char* what) {
  app.add_option("file", input.path, what)->required();
  app.add_option("--format", input.format, "Input format")
      ->check(CLI::IsMember({"auto", "native", "uai"}));
  app.add_flag("--uai-neg-log", input.neg_log, "Read UAI tables as probabilities; cost = -log p");
}

NativeDocument load(const InputOptions& input) {
  const auto text = read_file(input.path);
  const bool uai = input.format == "uai" ||
                   (input.format == "auto" &&
                    std::filesystem::path(input.path).extension() == ".uai");
  if (uai) return {parse_uai(text, UaiOptions{input.neg_log}), {}};
  return parse_native_document(text);
}

Arithmetic parse_arith(const std::string& name) {
  return name == "float" ? Arithmetic::Float : Arithmetic::Rational;
}

void print_tables(std::ostream& out, const MarginalSet& tables) {
  for (const auto& [scope, values] : tables.tables) {
    out << "marginal";
    for (int site : scope.sites()) out << ' ' << site;
    out << '\n';
    for (std::size_t k = 0; k < values.size(); ++k) out << (k ? " " : "") << to_string(values[k]);
    out << '\n';
  }
}

void print_assignment(std::ostream& out, const Assignment& x) {
  out << "assignment";
  for (int label : x) out << ' ' << label;
  out << '\n';
}

struct SolveResult {
  std::string name;
  Rational value;
  MarginalSet marginals;
};

SolveResult solve_one(const Model& model, const std::string& relaxation, ProblemKind kind,
                      Arithmetic arith, bool reduce, const std::string& lp_dump) {
  const auto merged = merge_to_frontier(model);
  auto relax = relaxation == "exact" ? build_exact_em(merged, kind)
                                     : build_pseudo(merged, kind, BuildOptions{reduce});
  if (!lp_dump.empty()) {
    std::ofstream file(lp_dump + (kind == ProblemKind::Min   ? ".min.lp"
                                  : kind == ProblemKind::Max ? ".max.lp"
                                                             : ".delta.lp"));
    if (!file) throw Error("cannot write " + lp_dump);
    write_lp(relax.lp, file);
  }
  SolveOptions options;
  options.arithmetic = arith;
  const auto solution = solve(relax.lp, options);
  if (!solution.optimal()) {
    throw LpError(std::string(to_string(kind)) + " LP is " + to_string(solution.status));
  }
  return {to_string(kind), solution.objective, extract_marginals(solution, relax.variables)};
}

struct SolveArgs {
  InputOptions input;
  std::string sense = "min";
  std::string relaxation = "pseudo";
  std::string arith = "rational";
  std::string out_path;
  std::string lp_dump;
  bool reduce = false;
};

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  auto document = load(args.input);
  std::vector<ProblemKind> kinds;
  if (args.relaxation == "delta") {
    kinds = {ProblemKind::Delta};
  } else if (args.sense == "modes") {
    kinds = {ProblemKind::Min, ProblemKind::Max};
  } else {
    kinds = {args.sense == "max" ? ProblemKind::Max : ProblemKind::Min};
  }
  NativeDocument saved{document.model, {}};
  for (auto kind : kinds) {
    const auto result = solve_one(document.model, args.relaxation, kind, parse_arith(args.arith),
                                  args.reduce, args.lp_dump);
    out << result.name << "_optimum " << to_string(result.value) << '\n';
    print_tables(out, result.marginals);
    SolutionSection section;
    section.name = result.name;
    section.meta.emplace_back("relaxation", args.relaxation);
    section.meta.emplace_back("arithmetic", args.arith);
    section.value = result.value;
    section.marginals = result.marginals.tables;
    saved.solutions.push_back(std::move(section));
  }
  if (!args.out_path.empty()) {
    std::ofstream file(args.out_path);
    if (!file) throw Error("cannot write " + args.out_path);
    file << serialize_native(saved);
  }
  return kExitOk;
}

struct DecodeArgs {
  InputOptions input;
  std::string sign = "inf";
  std::string solution;
  std::string arith = "rational";
  std::string certificate_path;
  bool fallback = false;
};

int cmd_decode(const DecodeArgs& args, std::ostream& out, std::ostream& err) {
  auto document = load(args.input);
  const auto& model = document.model;
  const Sign sign = args.sign == "sup" ? Sign::Sup : Sign::Inf;
  Arithmetic arith = parse_arith(args.arith);

  // Marginals from the document, or a fresh delta solve when it has none.
  std::string name = args.solution;
  if (name.empty()) {
    if (document.find_solution("delta")) {
      name = "delta";
    } else if (document.find_solution(sign == Sign::Inf ? "min" : "max")) {
      name = sign == Sign::Inf ? "min" : "max";
    }
  }
  MarginalSet marginals{model.num_sites(), model.num_labels(), {}};
  bool delta = true;
  if (name.empty()) {
    marginals = solve_one(model, "pseudo", ProblemKind::Delta, arith, false, "").marginals;
  } else {
    const auto* section = document.find_solution(name);
    if (section == nullptr) throw PreconditionError("no solution section named '" + name + "'");
    marginals.tables = section->marginals;
    delta = name == "delta" || section->find_meta("kind").value_or("") == "delta";
    if (section->find_meta("arithmetic").value_or("") == "float") arith = Arithmetic::Float;
  }

  DecodeOptions options;
  options.delta = delta;
  options.arithmetic = arith;
  Assignment x;
  try {
    x = greedy_decode(marginals, model, sign, options);
  } catch (const DecodeFailure& failure) {
    const auto certificate = failure_certificate(model, sign, failure);
    if (!args.fallback) {
      if (args.certificate_path.empty()) {
        err << certificate;
      } else {
        std::ofstream file(args.certificate_path);
        file << certificate;
      }
      err << "decode failed: " << failure.what() << '\n';
      return kExitDecodeFailure;
    }
    err << "decode failed (" << failure.what() << "); resolving by conditioning\n";
    SolveOptions solve_options;
    solve_options.arithmetic = arith;
    x = resolve_by_conditioning(model, sign, solve_options);
  } catch (const DecodeUnsupported& unsupported) {
    if (!args.fallback) throw;
    err << "decode unsupported (" << unsupported.what() << "); resolving by conditioning\n";
    SolveOptions solve_options;
    solve_options.arithmetic = arith;
    x = resolve_by_conditioning(model, sign, solve_options);
  }
  print_assignment(out, x);
  out << "value " << to_string(evaluate(model, x)) << '\n';
  return kExitOk;
}

struct OracleArgs {
  InputOptions input;
  unsigned workers = 1;
  std::size_t cap = kDefaultEnumerationCap;
};

int cmd_oracle(const OracleArgs& args, std::ostream& out) {
  const auto document = load(args.input);
  const auto modes = enumerate_modes(document.model, {args.cap, args.workers});
  out << "min " << to_string(modes.min_value) << '\n' << "max " << to_string(modes.max_value) << '\n';
  for (const auto& x : modes.argmin) {
    out << "argmin";
    for (int label : x) out << ' ' << label;
    out << '\n';
  }
  for (const auto& x : modes.argmax) {
    out << "argmax";
    for (int label : x) out << ' ' << label;
    out << '\n';
  }
  return kExitOk;
}

struct VerifyArgs {
  InputOptions input;
  std::uint64_t seed = 1;
};

DenseFunction random_dense(int sites, int labels, std::mt19937_64& rng) {
  DenseFunction f(sites, labels);
  for (auto& v : f.values()) v = Rational(static_cast<long>(rng() % 11) - 5);
  return f;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  const auto document = load(args.input);
  const auto& model = document.model;
  const int n = model.num_sites();
  const int L = model.num_labels();
  bool all_ok = true;
  auto report = [&](const char* check, bool ok, const std::string& detail) {
    out << check << (ok ? " ok" : " fail") << (detail.empty() ? "" : " ") << detail << '\n';
    all_ok = all_ok && ok;
  };

  std::size_t total = 1;
  bool dense = true;
  for (int i = 0; i < n && dense; ++i) {
    total *= static_cast<std::size_t>(L);
    dense = total <= dense_cap();
  }
  if (!dense || model.factors().empty()) {
    out << "dense checks skipped (" << (dense ? "no factors" : "L^n above the dense cap")
        << ")\n";
  } else {
    std::mt19937_64 rng(args.seed);
    const auto scopes = model.scopes();
    const auto f = random_dense(n, L, rng);
    const auto g = random_dense(n, L, rng);
    const auto pf = project(f, scopes);
    const auto pg = project(g, scopes);
    report("projection-idempotent", project(pf, scopes) == pf, "");
    DenseFunction residual = f;
    for (std::size_t x = 0; x < residual.size(); ++x) residual[x] -= pf[x];
    report("projection-orthogonal", inner_product(residual, pg) == 0, "");
    bool margins_kept = true;
    for (const auto& c : frontier_closure(scopes)) margins_kept = margins_kept && margin(pf, c) == margin(f, c);
    report("projection-margins", margins_kept, "");

    const auto tables = margins(random_dense(n, L, rng), scopes);
    report("lift-margins", margins(lift(tables, random_dense(n, L, rng)), scopes) == tables, "");

    const auto modes = enumerate_modes(model);
    const auto merged = merge_to_frontier(model);
    auto exact = [&](ProblemKind kind) {
      auto relax = build_exact_em(merged, kind);
      return std::make_pair(solve(relax.lp), std::move(relax));
    };
    const auto [emin, rmin] = exact(ProblemKind::Min);
    const auto [emax, rmax] = exact(ProblemKind::Max);
    const auto [edelta, rdelta] = exact(ProblemKind::Delta);
    report("exact-min", emin.optimal() && emin.objective == modes.min_value,
           to_string(emin.objective) + " vs " + to_string(modes.min_value));
    report("exact-max", emax.optimal() && emax.objective == modes.max_value,
           to_string(emax.objective) + " vs " + to_string(modes.max_value));
    const Rational spread = modes.min_value - modes.max_value;
    report("exact-delta", edelta.optimal() && edelta.objective == spread,
           to_string(edelta.objective) + " vs " + to_string(spread));

    if (edelta.optimal()) {
      const auto q = extract_global(edelta, rdelta.variables);
      report("delta-axioms", is_delta(q), "sum |q| = " + to_string(l1_norm(q.values())));
      const auto split = decompose(q);
      bool rebuilt = true;
      for (std::size_t x = 0; x < q.size(); ++x) {
        rebuilt = rebuilt && split.positive[x] - split.negative[x] == q[x];
      }
      report("delta-decompose", rebuilt, split.unique ? "unique" : "completed");
    }

    const auto local = solve_one(model, "pseudo", ProblemKind::Delta, Arithmetic::Rational, false, "");
    Rational closed_form;
    for (const auto& [scope, values] : local.marginals.tables) {
      closed_form = std::max(closed_form, l1_norm(values));
    }
    auto completion = build_min_l1_completion(local.marginals);
    const auto best = solve(completion.lp);
    report("completion", best.optimal() && best.objective == closed_form,
           "completion " + (best.optimal() ? to_string(best.objective) : std::string("none")) +
               " closed form " + to_string(closed_form));
  }

  const auto merged = merge_to_frontier(model);
  if (!model.factors().empty()) {
    const auto modes = enumerate_modes(model);
    const auto lp_min = solve_one(merged, "pseudo", ProblemKind::Min, Arithmetic::Rational, false, "");
    const auto lp_max = solve_one(merged, "pseudo", ProblemKind::Max, Arithmetic::Rational, false, "");
    const auto lp_delta = solve_one(merged, "pseudo", ProblemKind::Delta, Arithmetic::Rational, false, "");
    report("sandwich",
           lp_min.value <= modes.min_value && lp_max.value >= modes.max_value &&
               lp_delta.value <= modes.min_value - modes.max_value,
           to_string(lp_min.value) + " " + to_string(modes.min_value) + " " +
               to_string(modes.max_value) + " " + to_string(lp_max.value) + " " +
               to_string(lp_delta.value));
  }
  return all_ok ? kExitOk : kExitFailure;
}

struct ReportArgs {
  std::vector<std::string> families;
  std::size_t count = 20;
  std::uint64_t seed = 1;
  std::string csv_path;
  std::string certificate_dir;
  std::string arith = "rational";
  unsigned workers = 1;
  GeneratorConfig config;
  bool no_unary = false;
};

int cmd_report(const ReportArgs& args, std::ostream& out) {
  HarnessOptions options;
  options.arithmetic = parse_arith(args.arith);
  options.workers = args.workers;
  TightnessReport report;
  for (const auto& name : args.families) {
    GeneratorConfig config = args.config;
    config.family = parse_family(name);
    config.unary = !args.no_unary;
    append(report, tightness_report(config, args.seed, args.count, options));
  }
  if (!args.csv_path.empty()) {
    if (args.csv_path == "-") {
      write_csv(report, out);
    } else {
      std::ofstream file(args.csv_path);
      if (!file) throw Error("cannot write " + args.csv_path);
      write_csv(report, file);
    }
  }
  if (!args.certificate_dir.empty()) {
    std::filesystem::create_directories(args.certificate_dir);
    for (const auto& c : report.certificates) {
      std::ofstream file(std::filesystem::path(args.certificate_dir) / c.name);
      if (!file) throw Error("cannot write certificate " + c.name);
      file << c.text;
    }
  }
  write_summary(report, out);
  return kExitOk;
}

int cmd_replay(const std::vector<std::string>& paths, std::ostream& out) {
  bool all = true;
  for (const auto& path : paths) {
    const auto result = replay_certificate(read_file(path));
    out << path << (result.ok ? " ok " : " fail ") << result.message << '\n';
    all = all && result.ok;
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expectation-based LP relaxations for MAP inference in higher-order models"};
  app.name("deltamap");
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a relaxation and print optimum and marginals");
  add_input(*solve_cmd, solve_args.input, "Model file (native or .uai)");
  solve_cmd->add_option("--sense", solve_args.sense, "min, max, or modes (both)")
      ->check(CLI::IsMember({"min", "max", "modes"}));
  solve_cmd->add_option("--relaxation", solve_args.relaxation, "pseudo, delta, or exact")
      ->check(CLI::IsMember({"pseudo", "delta", "exact"}));
  solve_cmd->add_option("--arith", solve_args.arith, "LP arithmetic")
      ->check(CLI::IsMember({"rational", "float"}));
  solve_cmd->add_option("--out", solve_args.out_path, "Write model and marginals here");
  solve_cmd->add_option("--lp", solve_args.lp_dump, "Write LP text files with this prefix");
  solve_cmd->add_flag("--reduce", solve_args.reduce,
                      "One normalization row per connected component");

  DecodeArgs decode_args;
  auto* decode_cmd = app.add_subcommand("decode", "Greedy MAP decoding from optimal marginals");
  add_input(*decode_cmd, decode_args.input, "Marginals file from solve --out, or a model");
  decode_cmd->add_option("--sign", decode_args.sign, "inf (minimum) or sup (maximum)")
      ->check(CLI::IsMember({"inf", "sup"}));
  decode_cmd->add_option("--solution", decode_args.solution, "Solution section to decode");
  decode_cmd->add_option("--arith", decode_args.arith, "Arithmetic of the marginals")
      ->check(CLI::IsMember({"rational", "float"}));
  decode_cmd->add_option("--certificate", decode_args.certificate_path,
                         "Write the failure certificate here");
  decode_cmd->add_flag("--fallback", decode_args.fallback,
                       "On failure, re-solve with clamped variables");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive modes");
  add_input(*oracle_cmd, oracle_args.input, "Model file");
  oracle_cmd->add_option("--workers", oracle_args.workers, "Enumeration threads (0 = all)");
  oracle_cmd->add_option("--cap", oracle_args.cap, "Maximum number of assignments");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Run the property checks on one instance");
  add_input(*verify_cmd, verify_args.input, "Model file");
  verify_cmd->add_option("--seed", verify_args.seed, "Seed for the random test functions");

  ReportArgs report_args;
  report_args.families = {"chain", "tree", "cycle", "grid", "hypergraph", "zero"};
  auto* report_cmd = app.add_subcommand("report", "Tightness report over generated instances");
  report_cmd->add_option("--family", report_args.families, "Families to generate")
      ->check(CLI::IsMember({"chain", "tree", "cycle", "grid", "hypergraph", "zero"}));
  report_cmd->add_option("--count", report_args.count, "Instances per family");
  report_cmd->add_option("--seed", report_args.seed, "Generator seed");
  report_cmd->add_option("--csv", report_args.csv_path, "CSV output file ('-' for stdout)");
  report_cmd->add_option("--certificates", report_args.certificate_dir,
                         "Directory for counterexample certificates");
  report_cmd->add_option("--arith", report_args.arith, "LP arithmetic")
      ->check(CLI::IsMember({"rational", "float"}));
  report_cmd->add_option("--workers", report_args.workers, "Parallel instances (0 = all)");
  report_cmd->add_option("--min-sites", report_args.config.min_sites);
  report_cmd->add_option("--max-sites", report_args.config.max_sites);
  report_cmd->add_option("--min-labels", report_args.config.min_labels);
  report_cmd->add_option("--max-labels", report_args.config.max_labels);
  report_cmd->add_option("--cost-min", report_args.config.cost_min);
  report_cmd->add_option("--cost-max", report_args.config.cost_max);
  report_cmd->add_flag("--no-unary", report_args.no_unary, "Omit random unary factors");

  std::vector<std::string> replay_paths;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run certificates and check they reproduce");
  replay_cmd->add_option("certificates", replay_paths, "Certificate files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args, out);
    if (*decode_cmd) return cmd_decode(decode_args, out, err);
    if (*oracle_cmd) return cmd_oracle(oracle_args, out);
    if (*verify_cmd) return cmd_verify(verify_args, out);
    if (*report_cmd) return cmd_report(report_args, out);
    if (*replay_cmd) return cmd_replay(replay_paths, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidAssignment& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace deltamap::cli
