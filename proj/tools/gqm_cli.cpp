// gqm: command-line front end. Exit codes: 0 ok, 1 invalid input,
// 2 numeric failure, 3 a verification check failed.

#include "gqm/errors.hpp"
#include "gqm/experiment.hpp"
#include "gqm/field_io.hpp"
#include "gqm/measurement.hpp"
#include "gqm/state_io.hpp"
#include "gqm/verify.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace gqm;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNumeric = 2;
constexpr int kCheckFailed = 3;

void print_check(const CheckResult& c) {
  std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << format_double(c.measured) << ' '
            << c.relation << ' ' << format_double(c.threshold) << '\n';
}

int cmd_run(const std::string& config_path, const std::string& output, int threads, long long seed) {
  ExperimentConfig cfg = load_config(config_path);
  if (!output.empty()) cfg.output = output;
  if (threads > 0) cfg.threads = threads;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  const auto problems = validate_config(cfg);
  if (!problems.empty()) {
    std::string msg = "invalid overrides:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
  const RunReport report = run_experiment(cfg);
  write_run_outputs(report, build_grid(cfg), cfg.output);
  for (const auto& c : report.checks) print_check(c);
  std::cout << "outputs written to " << cfg.output << '\n';
  if (report.failed) {
    std::cerr << "numeric failure: " << report.failure << '\n';
    return kNumeric;
  }
  for (const auto& c : report.checks) {
    if (!c.passed) return kCheckFailed;
  }
  return kOk;
}

int cmd_verify(const std::string& suite, long long seed, int threads) {
  const auto reports = seed >= 0 ? run_verification(suite, static_cast<std::uint64_t>(seed), threads)
                                 : run_verification(suite, 20240611, threads);
  bool ok = true;
  for (const auto& r : reports) {
    std::cout << "[" << r.suite << "]\n";
    for (const auto& c : r.checks) print_check(c);
    ok = ok && r.passed();
  }
  std::cout << (ok ? "all checks passed" : "some checks failed") << '\n';
  return ok ? kOk : kCheckFailed;
}

int cmd_wilson(const std::string& path_file, const std::string& config_path, double hbar) {
  const ExperimentConfig cfg = load_config(config_path);
  const LatticePath path = load_path(path_file);
  const GaugeField1D field = build_field(cfg);
  const double h = hbar > 0 ? hbar : cfg.hbar;
  const Matrix w = wilson_line(path, field, h).matrix();
  nlohmann::json out = {{"dim", w.rows()}, {"hbar", h}, {"segments", path.segments()}, {"matrix", matrix_to_json(w)}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_measure(const std::string& state_file, const std::string& observable, long long seed,
                const std::string& output, double hbar) {
  const Wavefunction psi = load_state(state_file);
  MeasurementDistribution dist;
  if (observable == "position") {
    dist = position_distribution(psi);
  } else if (observable == "momentum") {
    dist = outcome_probabilities(expand(psi, Observable::momentum(psi.grid(), hbar)));
  } else {
    std::mt19937_64 rng(seed >= 0 ? static_cast<std::uint64_t>(seed) : 1);
    dist = outcome_probabilities(expand(psi, Observable::random_hermitian(psi.grid(), rng)));
  }
  if (output.empty()) {
    write_distribution_csv(std::cout, dist);
  } else {
    std::ofstream os(output);
    if (!os) throw ValidationError("cannot write " + output);
    write_distribution_csv(os, dist);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gqm: group-algebra-valued quantum mechanics on a 1-D lattice"};
  app.require_subcommand(1);

  std::string config, output, path_file, state_file, observable = "position", suite;
  int threads = 0;
  long long seed = -1;
  double hbar = 0.0;

  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("-c,--config", config, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "output directory (overrides the config)");
  run->add_option("-j,--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("-s,--seed", seed, "seed (overrides the config)")->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "run built-in property checks");
  verify->add_option("suite", suite, "algebra, gauge, pde, path, measurement or all")->required();
  verify->add_option("-s,--seed", seed, "base seed")->check(CLI::NonNegativeNumber);
  verify->add_option("-j,--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* wilson = app.add_subcommand("wilson", "Wilson line along a path file in the field of a config");
  wilson->add_option("-p,--path", path_file, "path file, one '<t> <x>' per line")->required()->check(CLI::ExistingFile);
  wilson->add_option("-c,--config", config, "config supplying group and field")->required()->check(CLI::ExistingFile);
  wilson->add_option("--hbar", hbar, "hbar (defaults to the config value)")->check(CLI::PositiveNumber);

  auto* measure = app.add_subcommand("measure", "outcome distribution of an observable on a saved state");
  measure->add_option("--state", state_file, "state JSON")->required()->check(CLI::ExistingFile);
  measure->add_option("--observable", observable, "position, momentum or random")
      ->check(CLI::IsMember({"position", "momentum", "random"}));
  measure->add_option("-s,--seed", seed, "seed for the random observable")->check(CLI::NonNegativeNumber);
  measure->add_option("-o,--output", output, "CSV file (stdout if omitted)");
  measure->add_option("--hbar", hbar, "hbar for the momentum operator")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(config, output, threads, seed);
    if (*verify) return cmd_verify(suite, seed, threads > 0 ? threads : 1);
    if (*wilson) return cmd_wilson(path_file, config, hbar);
    if (*measure) return cmd_measure(state_file, observable, seed, output, hbar > 0 ? hbar : 1.0);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kNumeric;
  } catch (const UndefinedDistribution& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}
