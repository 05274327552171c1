// spde: command-line front end for simulation, estimation and Monte Carlo runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spde/harness.hpp"
#include "spde/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spde;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir = ".";
  std::optional<std::string> kind;
  std::optional<int> N, M1, M2, K, L, n, reps;
  std::optional<double> theta0, theta1, eta1, theta2, sigma, alpha, mu0, delta;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--threads", o.threads, "worker threads (0: all cores)");
  app.add_option("--out-dir", o.out_dir, "output directory");
  app.add_option("--kind", o.kind, "noise case: Q1, Q2-known-mu0, Q2-unknown-mu0");
  app.add_option("--N", o.N, "time steps");
  app.add_option("--M1", o.M1, "space steps in y");
  app.add_option("--M2", o.M2, "space steps in z");
  app.add_option("--K", o.K, "modes in y");
  app.add_option("--L", o.L, "modes in z");
  app.add_option("--n", o.n, "coarse time steps for the realized variations");
  app.add_option("--delta", o.delta, "interior margin of the space thinning");
  app.add_option("--replications", o.reps, "Monte Carlo replications");
  app.add_option("--theta0", o.theta0);
  app.add_option("--theta1", o.theta1);
  app.add_option("--eta1", o.eta1);
  app.add_option("--theta2", o.theta2);
  app.add_option("--sigma", o.sigma);
  app.add_option("--alpha", o.alpha);
  app.add_option("--mu0", o.mu0);
}

ExperimentConfig build_config(const Overrides& o) {
  const ExperimentConfig base = o.config_path.empty() ? parse_config("{}") : load_config(o.config_path);
  json j = json::parse(config_to_json(base));
  auto set = [&](const char* a, const char* b, const auto& v) {
    if (v) j[a][b] = *v;
  };
  set("params", "theta0", o.theta0);
  set("params", "theta1", o.theta1);
  set("params", "eta1", o.eta1);
  set("params", "theta2", o.theta2);
  set("params", "sigma", o.sigma);
  set("params", "alpha", o.alpha);
  set("params", "mu0", o.mu0);
  set("grid", "N", o.N);
  set("grid", "M1", o.M1);
  set("grid", "M2", o.M2);
  set("truncation", "K", o.K);
  set("truncation", "L", o.L);
  set("thinning", "n", o.n);
  set("thinning", "delta", o.delta);
  if (o.kind) j["kind"] = *o.kind;
  if (o.reps) j["replications"] = *o.reps;
  if (o.seed) j["seed"] = *o.seed;
  if (o.threads) j["threads"] = *o.threads;
  else j["threads"] = base.threads;
  return parse_config(j.dump());
}

fs::path out_file(const Overrides& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  return fs::path(o.out_dir) / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
  std::cout << p.string() << '\n';
}

FieldSample simulate(const ExperimentConfig& c, std::uint64_t rep) {
  return simulate_field({c.params, c.kind, c.grid, c.trunc, {}, c.seed, rep});
}

std::string rep_name(const char* stem, std::uint64_t rep, const char* ext) {
  return std::string(stem) + "_rep" + std::to_string(rep) + ext;
}

void run_simulate(const Overrides& o, std::uint64_t rep) {
  const ExperimentConfig c = build_config(o);
  const FieldSample f = simulate(c, rep);
  const fs::path p = out_file(o, rep_name("field", rep, ".bin"));
  write_field(p.string(), f);
  std::cout << p.string() << '\n';
  write_text(out_file(o, "config.json"), config_to_json(c) + "\n");
}

void run_estimate(const Overrides& o, const std::string& field_path, std::uint64_t rep) {
  const ExperimentConfig c = build_config(o);
  const FieldSample f = read_field(field_path);
  const ReplicationRecord r = estimate_field(f, c, rep);

  const SpaceThinning thin = c.space_thinning();
  const TimeThinning tt = c.time_thinning();
  write_text(out_file(o, "squared_increments.csv"),
             squared_increment_csv(squared_increment_field(f, thin, c.params.alpha()), thin));
  write_text(out_file(o, "path_1_1.csv"),
             path_csv(approx_coordinate(f, Mode{1, 1}, r.fit.kappa_hat, r.fit.eta_hat, tt), tt));
  write_text(out_file(o, "path_1_2.csv"),
             path_csv(approx_coordinate(f, Mode{1, 2}, r.fit.kappa_hat, r.fit.eta_hat, tt), tt));
  write_text(out_file(o, "record.json"), record_json(r));

  std::optional<CovarianceMatrix> cov;
  if (auto p = params_from_estimates(r.estimates, c.params.alpha())) {
    switch (c.kind) {
      case NoiseKind::Q1: cov = covariance_J(*p); break;
      case NoiseKind::Q2KnownMu0: cov = covariance_K(*p); break;
      case NoiseKind::Q2UnknownMu0: cov = covariance_L(*p); break;
    }
  }
  write_text(out_file(o, "estimates.json"), estimates_json(r.estimates, cov ? &*cov : nullptr));
}

void run_mc(const Overrides& o) {
  const ExperimentConfig c = build_config(o);
  const SummaryTable t = run_monte_carlo(c);
  write_text(out_file(o, "summary.csv"), summary_csv(t));
  write_text(out_file(o, "summary.json"), summary_json(t, c));
  write_text(out_file(o, "records.csv"), records_csv(t));
  std::cerr << "replications " << t.total << ", plug-in failures " << t.failed << '\n';
}

void run_oracle(const Overrides& o, double y, double z) {
  const ExperimentConfig c = build_config(o);
  const auto series = expected_squared_increment_series(c.params, c.kind, c.grid.N, y, z, c.trunc);
  std::string csv = "i,expected_squared_increment\n";
  double total = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    csv += std::to_string(i + 1) + ',' + format_double(series[i]) + '\n';
    total += series[i];
  }
  write_text(out_file(o, "oracle_increments.csv"), csv);
  const double dt = c.grid.dt();
  json j;
  j["y"] = y;
  j["z"] = z;
  j["N"] = c.grid.N;
  j["expected_Z"] = total / (c.grid.N * std::pow(dt, c.params.alpha()));
  j["asymptotic_mean"] = asymptotic_mean(c.params, c.kind, y, z);
  write_text(out_file(o, "oracle_summary.json"), j.dump(2) + "\n");
}

void run_cross_section(const Overrides& o, const std::string& field_path, std::uint64_t rep,
                       const std::string& axis, double level) {
  const ExperimentConfig c = build_config(o);
  const FieldSample f = field_path.empty() ? simulate(c, rep) : read_field(field_path);
  const CrossSection cs = cross_section_dump(f, parse_axis(axis), level);
  write_text(out_file(o, "cross_section_" + axis + "_" + format_double(level) + ".csv"), cross_section_csv(cs));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and parameter estimation for a linear parabolic SPDE on the unit square"};
  app.require_subcommand(1);

  Overrides o;
  std::uint64_t rep = 0;
  std::string field_path, axis = "t";
  double y = 0.5, z = 0.5, level = 0.5;

  auto* sim = app.add_subcommand("simulate", "simulate one replication and dump the field");
  add_common(*sim, o);
  sim->add_option("--rep", rep, "replication index");

  auto* est = app.add_subcommand("estimate", "run the estimation pipeline on a stored field");
  add_common(*est, o);
  est->add_option("--field", field_path, "binary field dump")->required()->check(CLI::ExistingFile);
  est->add_option("--rep", rep, "replication index recorded in the output");

  auto* mc = app.add_subcommand("mc", "Monte Carlo summary over replications");
  add_common(*mc, o);

  auto* orc = app.add_subcommand("oracle", "expected squared increments and the asymptotic mean");
  add_common(*orc, o);
  orc->add_option("--y", y, "spatial point y");
  orc->add_option("--z", z, "spatial point z");

  auto* cs = app.add_subcommand("cross-section", "two-dimensional slice of a field");
  add_common(*cs, o);
  cs->add_option("--field", field_path, "binary field dump (simulated when omitted)");
  cs->add_option("--rep", rep, "replication index when simulating");
  cs->add_option("--axis", axis, "fixed coordinate: t, y or z");
  cs->add_option("--level", level, "value of the fixed coordinate (a grid node)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) run_simulate(o, rep);
    else if (*est) run_estimate(o, field_path, rep);
    else if (*mc) run_mc(o);
    else if (*orc) run_oracle(o, y, z);
    else if (*cs) run_cross_section(o, field_path, rep, axis, level);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
