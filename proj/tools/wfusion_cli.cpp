#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wfusion/cavity.hpp"
#include "wfusion/fusion.hpp"
#include "wfusion/pipeline.hpp"
#include "wfusion/serialize.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

using wfusion::ordered_json;

// Accepts the protocol's design angle as the literal "2pi/9" next to plain
// decimals, so it is exactly representable on the command line.
double parse_lambda_t(const std::string& text) {
  if (text == "2pi/9") return wfusion::cavity::magic_time();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad --lambda-t value '" + text + "'");
  }
  if (used != text.size())
    throw std::invalid_argument("bad --lambda-t value '" + text + "'");
  return v;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file '" + out_path + "'");
  f << text;
}

std::string envelope(const std::string& command, ordered_json parameters,
                     ordered_json results,
                     std::optional<std::uint64_t> seed = std::nullopt) {
  ordered_json j;
  j["command"] = command;
  j["parameters"] = std::move(parameters);
  j["results"] = std::move(results);
  j["tool_version"] = kToolVersion;
  if (seed) j["seed"] = *seed;
  return j.dump(2) + "\n";
}

struct FuseArgs {
  int n = 0, m = 0, t = 0;
  std::string lambda_t = "2pi/9";
  std::string format = "json";
  std::string out;
};

void run_fuse(const FuseArgs& a, bool three) {
  const double lt = parse_lambda_t(a.lambda_t);
  const wfusion::BranchReport report = three
                                           ? wfusion::fuse_three(a.n, a.m, a.t, lt)
                                           : wfusion::fuse_two(a.n, a.m, lt);
  if (a.format == "csv") {
    write_output(wfusion::report_to_csv(report), a.out);
    return;
  }
  ordered_json params;
  params["n"] = a.n;
  params["m"] = a.m;
  if (three) params["t"] = a.t;
  params["lambda_t"] = a.lambda_t;
  params["format"] = a.format;
  params["out"] = a.out;
  write_output(envelope(three ? "fuse3" : "fuse2", std::move(params),
                        wfusion::report_to_json(report)),
               a.out);
}

struct ValidateArgs {
  std::vector<double> ratios;
  int n_max = 3;
  int dt_divisor = wfusion::cavity::kDefaultStepsPerDetuningPeriod;
  std::string lambda_t = "2pi/9";
  std::string format = "json";
  std::string out;
};

void run_validate(const ValidateArgs& a) {
  if (a.ratios.empty()) throw std::invalid_argument("need at least one --delta-over-g");
  const double lt = parse_lambda_t(a.lambda_t);
  if (!(lt > 0.0)) throw std::invalid_argument("--lambda-t must be > 0");
  for (double r : a.ratios)
    if (!(r >= 1.0))
      throw std::invalid_argument("--delta-over-g values must be >= 1");

  struct Row {
    double ratio, fidelity, leakage;
  };
  std::vector<Row> rows;
  for (double r : a.ratios) {
    wfusion::cavity::CavityParams params;
    params.g = 1.0;  // dynamics depend only on delta/g and lambda_t
    params.delta = r;
    params.n_max = a.n_max;
    const auto err = wfusion::cavity::dispersive_error(params, lt, a.dt_divisor);
    rows.push_back({r, err.atomic_fidelity, err.photon_leakage});
  }

  if (a.format == "csv") {
    std::string text = "delta_over_g,atomic_fidelity,photon_leakage\n";
    char buf[160];
    for (const Row& row : rows) {
      std::snprintf(buf, sizeof(buf), "%.15g,%.15g,%.15g\n", row.ratio,
                    row.fidelity, row.leakage);
      text += buf;
    }
    write_output(text, a.out);
    return;
  }
  ordered_json params;
  params["delta_over_g"] = a.ratios;
  params["nmax"] = a.n_max;
  params["dt_divisor"] = a.dt_divisor;
  params["lambda_t"] = a.lambda_t;
  params["format"] = a.format;
  params["out"] = a.out;
  ordered_json results = ordered_json::array();
  for (const Row& row : rows) {
    ordered_json jr;
    jr["delta_over_g"] = wfusion::round15(row.ratio);
    jr["atomic_fidelity"] = wfusion::round15(row.fidelity);
    jr["photon_leakage"] = wfusion::round15(row.leakage);
    results.push_back(std::move(jr));
  }
  write_output(envelope("validate", std::move(params),
                        ordered_json{{"rows", std::move(results)}}),
               a.out);
}

struct PipelineArgs {
  int target = 0;
  std::string primitive = "two";
  bool recycle = false;
  long trials = 100000;
  std::uint64_t seed = 1;
  bool exact = false;
  long max_rounds = 0;  // 0 = unbounded
  std::string format = "json";
  std::string out;
};

void run_pipeline(const PipelineArgs& a) {
  wfusion::StrategyConfig cfg;
  if (a.primitive == "two")
    cfg.primitive = wfusion::Primitive::two_fusion;
  else if (a.primitive == "three")
    cfg.primitive = wfusion::Primitive::three_fusion;
  else
    throw std::invalid_argument("--primitive must be 'two' or 'three'");
  cfg.recycle = a.recycle;
  cfg.target_size = a.target;
  if (a.max_rounds > 0) cfg.max_rounds = a.max_rounds;

  const double exact_cost = wfusion::expected_cost(cfg);
  std::optional<wfusion::YieldStats> mc;
  if (!a.exact) mc = wfusion::simulate_pipeline(cfg, a.trials, a.seed);

  const std::string strategy =
      a.primitive + (a.recycle ? std::string("+recycle") : std::string());

  if (a.format == "csv") {
    std::string text = "target,strategy,expected_cost,mc_mean,mc_stderr,trials,seed\n";
    char buf[200];
    if (mc) {
      std::snprintf(buf, sizeof(buf), "%d,%s,%.15g,%.15g,%.15g,%ld,%llu\n",
                    a.target, strategy.c_str(), exact_cost,
                    mc->expected_bell_pairs, mc->bell_pairs_stderr, mc->trials,
                    static_cast<unsigned long long>(mc->seed));
    } else {
      std::snprintf(buf, sizeof(buf), "%d,%s,%.15g,,,,\n", a.target,
                    strategy.c_str(), exact_cost);
    }
    write_output(text + buf, a.out);
    return;
  }

  ordered_json params;
  params["target"] = a.target;
  params["primitive"] = a.primitive;
  params["recycle"] = a.recycle;
  params["trials"] = a.trials;
  params["seed"] = a.seed;
  params["exact"] = a.exact;
  params["max_rounds"] = a.max_rounds;
  params["format"] = a.format;
  params["out"] = a.out;

  ordered_json results;
  results["strategy"] = strategy;
  results["expected_cost"] = wfusion::round15(exact_cost);
  results["monte_carlo"] = mc ? wfusion::yield_to_json(*mc) : ordered_json(nullptr);
  write_output(envelope("pipeline", std::move(params), std::move(results), a.seed),
               a.out);
}

struct FeasibilityArgs {
  double g_khz = 24.0;
  double delta_over_g = 10.0;
  double atomic_decay_s = 3e-2;
  double cavity_decay_s = 3e-2;
  std::string format = "json";
  std::string out;
};

void run_feasibility(const FeasibilityArgs& a) {
  const double g = 2.0 * std::numbers::pi * a.g_khz * 1e3;
  if (!(g > 0.0)) throw std::invalid_argument("--g-khz must be > 0");
  const double delta = a.delta_over_g * g;
  const wfusion::FeasibilityReport r =
      wfusion::feasibility_report(g, delta, a.atomic_decay_s, a.cavity_decay_s);
  if (a.format == "csv") {
    write_output(wfusion::feasibility_to_csv(r), a.out);
    return;
  }
  ordered_json params;
  params["g_khz"] = a.g_khz;
  params["delta_over_g"] = a.delta_over_g;
  params["atomic_decay_s"] = a.atomic_decay_s;
  params["cavity_decay_s"] = a.cavity_decay_s;
  params["format"] = a.format;
  params["out"] = a.out;
  write_output(envelope("feasibility", std::move(params),
                        wfusion::feasibility_to_json(r)),
               a.out);
}

void add_format_options(CLI::App* cmd, std::string& format, std::string& out) {
  cmd->add_option("--format", format, "Output format (json|csv)")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", out, "Write output to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"W-state fusion protocol simulator"};
  app.require_subcommand(1);

  FuseArgs fuse2_args;
  CLI::App* fuse2 = app.add_subcommand("fuse2", "Fuse two W states via one ancilla");
  fuse2->add_option("--n", fuse2_args.n, "Size of the first W state")->required();
  fuse2->add_option("--m", fuse2_args.m, "Size of the second W state")->required();
  fuse2->add_option("--lambda-t", fuse2_args.lambda_t,
                    "Interaction angle (decimal or '2pi/9')");
  add_format_options(fuse2, fuse2_args.format, fuse2_args.out);

  FuseArgs fuse3_args;
  CLI::App* fuse3 = app.add_subcommand("fuse3", "Fuse three W states");
  fuse3->add_option("--n", fuse3_args.n, "Size of the first W state")->required();
  fuse3->add_option("--m", fuse3_args.m, "Size of the second W state")->required();
  fuse3->add_option("--t", fuse3_args.t, "Size of the third W state")->required();
  fuse3->add_option("--lambda-t", fuse3_args.lambda_t,
                    "Interaction angle (decimal or '2pi/9')");
  add_format_options(fuse3, fuse3_args.format, fuse3_args.out);

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check the dispersive approximation against full dynamics");
  validate
      ->add_option("--delta-over-g", validate_args.ratios,
                   "Detuning-to-coupling ratios (comma separated)")
      ->required()
      ->delimiter(',');
  validate->add_option("--nmax", validate_args.n_max, "Photon-number cutoff");
  validate->add_option("--dt-divisor", validate_args.dt_divisor,
                       "Integrator steps per detuning period");
  validate->add_option("--lambda-t", validate_args.lambda_t,
                       "Interaction angle (decimal or '2pi/9')");
  add_format_options(validate, validate_args.format, validate_args.out);

  PipelineArgs pipeline_args;
  CLI::App* pipeline =
      app.add_subcommand("pipeline", "Iterative-fusion resource analysis");
  pipeline->add_option("--target", pipeline_args.target, "Target W size")
      ->required();
  pipeline->add_option("--primitive", pipeline_args.primitive,
                       "Fusion primitive (two|three)");
  pipeline->add_flag("--recycle", pipeline_args.recycle,
                     "Re-fuse recyclable and byproduct states");
  pipeline->add_option("--trials", pipeline_args.trials, "Monte Carlo trials");
  pipeline->add_option("--seed", pipeline_args.seed, "RNG seed");
  pipeline->add_flag("--exact", pipeline_args.exact,
                     "Emit only the exact expected cost (no Monte Carlo)");
  pipeline->add_option("--max-rounds", pipeline_args.max_rounds,
                       "Cap fusion attempts per run (0 = unbounded)");
  add_format_options(pipeline, pipeline_args.format, pipeline_args.out);

  FeasibilityArgs feas_args;
  CLI::App* feasibility =
      app.add_subcommand("feasibility", "Experimental timescale margins");
  feasibility->add_option("--g-khz", feas_args.g_khz,
                          "Coupling strength g/(2*pi) in kHz");
  feasibility->add_option("--delta-over-g", feas_args.delta_over_g,
                          "Detuning-to-coupling ratio");
  feasibility->add_option("--atomic-decay-s", feas_args.atomic_decay_s,
                          "Atomic radiative lifetime in seconds");
  feasibility->add_option("--cavity-decay-s", feas_args.cavity_decay_s,
                          "Cavity decay time in seconds");
  add_format_options(feasibility, feas_args.format, feas_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fuse2->parsed()) run_fuse(fuse2_args, false);
    if (fuse3->parsed()) run_fuse(fuse3_args, true);
    if (validate->parsed()) run_validate(validate_args);
    if (pipeline->parsed()) run_pipeline(pipeline_args);
    if (feasibility->parsed()) run_feasibility(feas_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const wfusion::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
