#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "seqprice/cli.hpp"
#include "seqprice/instances.hpp"
#include "seqprice/io.hpp"
#include "seqprice/verify.hpp"

namespace seqprice {

namespace {

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<int> parse_sizes(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return out;
}

struct GenArgs {
  std::string family;
  std::string out_path;
  std::string ref_exante_path;
  std::string subfamily = "coverage";
  int t = 2;
  int m = 9;
  int n = 0;  // 0 = family default (monotone-lb: all ell buyers; random: 2)
  int support = 2;
  double eps = -1.0;
  std::uint64_t seed = 1;
};

SubaddFamily subadd_family_from(const std::string& name) {
  if (name == "coverage") return SubaddFamily::coverage;
  if (name == "budgeted") return SubaddFamily::budgeted_additive;
  if (name == "xos") return SubaddFamily::xos_random;
  throw CLI::ValidationError("--subfamily", "unknown subadditive family: " + name);
}

GsFamily gs_family_from(const std::string& name) {
  if (name == "additive") return GsFamily::additive;
  if (name == "unit-demand") return GsFamily::unit_demand;
  if (name == "mixed") return GsFamily::mixed;
  throw CLI::ValidationError("--subfamily", "unknown GS family: " + name);
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  InstanceFile file;
  std::optional<ExAnteSolution> ref;

  if (a.family == "xos-lb") {
    XosLbInstance inst = gen_xos_lb(a.t, a.eps < 0 ? 1e-6 : a.eps, a.seed);
    file.instance = inst.instance;
    file.reference_pricings =
        std::vector<RandomPricing>(inst.instance.buyer_count(), inst.reference);
    ref = inst.reference_solution();
  } else if (a.family == "monotone-lb") {
    int n = a.n > 0 ? a.n
                    : largest_prime_at_most(static_cast<int>(std::sqrt(a.m)));
    MonotoneLbInstance inst = gen_monotone_lb(a.m, n, a.eps < 0 ? 1e-2 : a.eps);
    file.instance = inst.instance;
    file.reference_pricings = inst.reference;
    ref = inst.reference_solution();
  } else if (a.family == "rrs-lb") {
    RrsLbInstance inst = gen_rrs_lb(a.m, a.eps < 0 ? 1e-3 : a.eps);
    file.instance.m = a.m;
    file.instance.buyers.push_back(inst.buyer());
    file.reference_pricings = {RandomPricing::point(inst.reference)};
  } else if (a.family == "random-subadd") {
    file.instance = gen_random_subadditive(a.m, a.n > 0 ? a.n : 2, a.support,
                                           subadd_family_from(a.subfamily), a.seed);
  } else if (a.family == "random-gs") {
    file.instance = gen_random_gs(a.m, a.n > 0 ? a.n : 2, a.support,
                                  gs_family_from(a.subfamily), a.seed);
  } else {
    throw CLI::ValidationError("--family", "unknown family: " + a.family);
  }

  Json j = to_json(file);
  if (a.out_path.empty()) {
    out << canonical_dump(j);
  } else {
    write_json_file(a.out_path, j);
    out << "wrote " << a.out_path << " (m=" << file.instance.m
        << ", n=" << file.instance.buyer_count() << ")\n";
  }
  if (!a.ref_exante_path.empty()) {
    if (!ref) throw std::runtime_error("no reference solution for family " + a.family);
    write_json_file(a.ref_exante_path, to_json(*ref));
    out << "wrote " << a.ref_exante_path << " (value=" << ref->value << ")\n";
  }
  return 0;
}

struct SolveArgs {
  std::string instance_path;
  std::string out_path;
  std::string grid;
  std::size_t budget = 1000000;
  std::size_t per_item_cap = 0;
  std::size_t column_limit = 10000;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  InstanceFile file = instance_from_json(read_json_file(a.instance_path));
  CandidateOptions copts;
  copts.budget = a.budget;
  copts.per_item_cap = a.per_item_cap;
  SolveOptions sopts;
  sopts.column_limit = a.column_limit;
  std::vector<double> extra = parse_grid(a.grid);

  // Keep the LP within its column limit: shrink per-item grids when needed
  // and fall back to the file's reference pricings as a last resort.
  std::size_t allowance =
      std::max<std::size_t>(2, a.column_limit / file.instance.buyer_count());
  std::vector<std::vector<ItemPricing>> candidates;
  for (int i = 0; i < file.instance.buyer_count(); ++i) {
    std::vector<ItemPricing> cands;
    bool have_grid = false;
    for (int attempt = 0; attempt < 2 && !have_grid; ++attempt) {
      CandidateOptions attempt_opts = copts;
      if (attempt == 1) {
        // A cap below 3 keeps no finite price; rather than solve a
        // meaningless {0, inf} grid, fall through to reference pricings.
        attempt_opts.per_item_cap = std::max<std::size_t>(
            3, static_cast<std::size_t>(std::floor(std::pow(
                   static_cast<double>(allowance),
                   1.0 / std::max(1, file.instance.m)))));
      }
      try {
        std::vector<ItemPricing> grid =
            candidate_prices(file.instance.buyers[i], extra, attempt_opts);
        if (grid.size() <= allowance) {
          cands = std::move(grid);
          have_grid = true;
        }
      } catch (const std::exception&) {
        // over budget or unsupported marginal enumeration; try smaller / refs
      }
    }
    if (file.reference_pricings)
      for (const auto& wp : (*file.reference_pricings)[i].support())
        cands.push_back(wp.pricing);
    if (cands.empty())
      throw std::runtime_error("buyer " + std::to_string(i) +
                               ": no candidate pricings (grid over budget and no "
                               "reference pricings)");
    candidates.push_back(std::move(cands));
  }

  ExAnteSolution sol = solve_exante(file.instance.buyers, candidates, sopts);
  validate_exante(file.instance.buyers, sol);
  if (a.out_path.empty()) {
    out << canonical_dump(to_json(sol));
  } else {
    write_json_file(a.out_path, to_json(sol));
    out << "wrote " << a.out_path << " (value=" << sol.value << ")\n";
  }
  return 0;
}

struct RunArgs {
  std::string instance_path;
  std::string exante_path;
  std::string mechanism = "ocrs-seq";
  std::string out_path;
  std::string per_trial_csv;
  long trials = 1000;
  std::uint64_t seed = 1;
  bool force = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  InstanceFile file = instance_from_json(read_json_file(a.instance_path));
  ExAnteSolution sol = exante_from_json(read_json_file(a.exante_path));
  MechanismKind kind = mechanism_from_string(a.mechanism);

  if (kind == MechanismKind::gs && !a.force && file.instance.m <= 12) {
    for (const auto& d : file.instance.buyers) {
      std::string reason;
      try {
        ClassCheckResult r = check_class(d, ValuationClass::gross_substitutes);
        if (!r.ok) reason = r.detail;
      } catch (const std::exception& e) {
        reason = std::string("could not verify: ") + e.what();
      }
      if (!reason.empty()) {
        err << "buyers fail the gross-substitutes check (" << reason
            << "); rerun with --force to proceed anyway\n";
        return 1;
      }
    }
  }

  auto runner = make_runner(kind, file.instance, sol);
  MonteCarloResult mc = monte_carlo(*runner, file.instance, a.trials, a.seed,
                                    !a.per_trial_csv.empty());

  RunReport report;
  report.exante = sol;
  report.mechanism = a.mechanism;
  report.trials = a.trials;
  report.seed = a.seed;
  report.mean_revenue = mc.mean;
  report.std_err = mc.std_err;
  report.ratio = mc.mean > 0 ? sol.value / mc.mean : kInf;
  report.availability = mc.availability;
  report.offer_rate = mc.offer_rate;

  if (!a.per_trial_csv.empty()) {
    std::ofstream csv(a.per_trial_csv);
    if (!csv) throw std::runtime_error("cannot write " + a.per_trial_csv);
    csv << "trial,revenue\n";
    for (std::size_t t = 0; t < mc.per_trial.size(); ++t)
      csv << t << "," << mc.per_trial[t] << "\n";
  }
  if (a.out_path.empty()) {
    out << canonical_dump(to_json(report));
  } else {
    write_json_file(a.out_path, to_json(report));
    out << "wrote " << a.out_path << " (mean_revenue=" << mc.mean
        << ", stderr=" << mc.std_err << ")\n";
  }
  return 0;
}

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 1;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  std::vector<verify::Check> checks;
  auto add = [&](verify::Check c) { checks.push_back(std::move(c)); };
  auto add_all = [&](std::vector<verify::Check> cs) {
    for (auto& c : cs) checks.push_back(std::move(c));
  };

  bool all = a.suite == "all";
  if (all || a.suite == "hull") {
    add(verify::hull_random(a.seed, 100));
    add(verify::hull_gs_exact(a.seed, 50));
  }
  if (all || a.suite == "rrs") {
    add(verify::rrs_subadditive(a.seed, 50));
  }
  if (all || a.suite == "ocrs") {
    add(verify::gs_rrs_and_ocrs(a.seed, 50));
    add(verify::availability(a.seed, 4000));
  }
  if (all || a.suite == "instances") {
    add_all(verify::xos_lb_suite(a.seed));
    add_all(verify::monotone_lb_suite(a.seed, 2000));
    add_all(verify::rrs_lb_suite(a.seed));
  }
  if (all) {
    add(verify::demand_ground_truth(a.seed, 400));
    add(verify::gs_end_to_end(a.seed, 6, 20000));
    add_all(verify::pipeline_report(a.seed, 1000));
  }
  if (checks.empty())
    throw CLI::ValidationError("--suite", "unknown suite: " + a.suite);

  bool ok = true;
  for (const auto& c : checks) {
    out << (c.ok ? "[ok]   " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    ok = ok && c.ok;
  }
  out << (ok ? "verify: all checks passed\n" : "verify: FAILURES\n");
  return ok ? 0 : 1;
}

struct BenchArgs {
  std::string family = "coverage";
  std::string sizes = "2,4,6";
  std::string out_path;
  long trials = 2000;
  std::uint64_t seed = 1;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  SubaddFamily family = subadd_family_from(a.family);
  std::ostringstream csv;
  csv << "m,earev,mech_revenue,stderr,ratio\n";
  for (int m : parse_sizes(a.sizes)) {
    Instance inst = gen_random_subadditive(m, 2, 2, family, a.seed + m);
    CandidateOptions copts;
    copts.per_item_cap = m <= 2 ? 16 : m <= 4 ? 8 : 4;
    ExAnteSolution sol = solve_exante_auto(inst.buyers, {}, copts);
    validate_exante(inst.buyers, sol);
    auto runner = make_runner(MechanismKind::subadd, inst, sol);
    MonteCarloResult mc = monte_carlo(*runner, inst, a.trials, a.seed + 7 * m);
    double ratio = mc.mean > 0 ? sol.value / mc.mean : kInf;
    csv << m << "," << sol.value << "," << mc.mean << "," << mc.std_err << ","
        << ratio << "\n";
  }
  if (a.out_path.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(a.out_path);
    if (!f) throw std::runtime_error("cannot write " + a.out_path);
    f << csv.str();
    out << "wrote " << a.out_path << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "seqprice: ex ante relaxation solving and sequential item pricing "
      "simulation.\nTrial t of seed s uses the RNG stream "
      "splitmix64(s ^ (t+1)*0x9e3779b97f4a7c15).",
      "seqprice"};
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json", json_errors, "report errors as JSON on stderr");

  GenArgs gen;
  CLI::App* cgen = app.add_subcommand(
      "gen", "generate an instance file (families: xos-lb, monotone-lb, rrs-lb, "
             "random-subadd, random-gs)");
  cgen->add_option("--family", gen.family, "instance family")->required();
  cgen->add_option("--t", gen.t, "xos-lb scale parameter (even, >= 2)");
  cgen->add_option("--m", gen.m, "item count");
  cgen->add_option("--n", gen.n, "buyer count");
  cgen->add_option("--support", gen.support, "support size per buyer");
  cgen->add_option("--eps", gen.eps, "family tie-break epsilon");
  cgen->add_option("--subfamily", gen.subfamily,
                   "random family: coverage|budgeted|xos or "
                   "additive|unit-demand|mixed");
  cgen->add_option("--seed", gen.seed, "generator seed");
  cgen->add_option("--out", gen.out_path, "instance JSON path (default stdout)");
  cgen->add_option("--ref-exante", gen.ref_exante_path,
                   "also write the family's reference ex ante solution");

  SolveArgs solve;
  CLI::App* csolve =
      app.add_subcommand("solve", "solve the ex ante relaxation over a candidate "
                                  "price grid (plus any reference pricings)");
  csolve->add_option("--instance", solve.instance_path, "instance JSON")->required();
  csolve->add_option("--out", solve.out_path, "ex ante JSON path (default stdout)");
  csolve->add_option("--grid", solve.grid, "comma-separated extra price grid");
  csolve->add_option("--budget", solve.budget, "candidate Cartesian budget");
  csolve->add_option("--per-item-cap", solve.per_item_cap,
                     "cap per-item candidates (keeps the largest)");
  csolve->add_option("--column-limit", solve.column_limit, "LP column limit");

  RunArgs run;
  CLI::App* crun = app.add_subcommand(
      "run", "simulate a sequential mechanism against a solved instance");
  crun->add_option("--instance", run.instance_path, "instance JSON")->required();
  crun->add_option("--exante", run.exante_path, "ex ante JSON")->required();
  crun->add_option("--mechanism", run.mechanism,
                   "ocrs-seq|subadd|gs|mono-n|mono-m2");
  crun->add_option("--trials", run.trials, "Monte Carlo trials");
  crun->add_option("--seed", run.seed, "simulation seed");
  crun->add_option("--out", run.out_path, "run report JSON path (default stdout)");
  crun->add_option("--per-trial-csv", run.per_trial_csv,
                   "also write per-trial revenues as CSV");
  crun->add_flag("--force", run.force, "skip the gross-substitutes precheck");

  VerifyArgs ver;
  CLI::App* cver = app.add_subcommand(
      "verify", "run randomized verification suites (exit 1 on failure)");
  cver->add_option("--suite", ver.suite, "rrs|ocrs|hull|instances|all");
  cver->add_option("--seed", ver.seed, "suite seed");

  BenchArgs bench;
  CLI::App* cbench = app.add_subcommand(
      "bench",
      "gap-versus-m sweep; emits CSV columns m,earev,mech_revenue,stderr,ratio");
  cbench->add_option("--family", bench.family, "coverage|budgeted|xos");
  cbench->add_option("--sizes", bench.sizes, "comma-separated item counts");
  cbench->add_option("--trials", bench.trials, "Monte Carlo trials per size");
  cbench->add_option("--seed", bench.seed, "sweep seed");
  cbench->add_option("--out", bench.out_path, "CSV path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    if (json_errors)
      err << Json{{"error", e.what()}, {"code", 2}}.dump() << "\n";
    else
      err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (cgen->parsed()) return cmd_gen(gen, out);
    if (csolve->parsed()) return cmd_solve(solve, out);
    if (crun->parsed()) return cmd_run(run, out, err);
    if (cver->parsed()) return cmd_verify(ver, out);
    if (cbench->parsed()) return cmd_bench(bench, out);
  } catch (const std::exception& e) {
    if (json_errors)
      err << Json{{"error", e.what()}, {"code", 1}}.dump() << "\n";
    else
      err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace seqprice
