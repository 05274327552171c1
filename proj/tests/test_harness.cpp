#include <doctest.h>

#include <stdexcept>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spde/harness.hpp"
#include "spde/io.hpp"
#include "stats.hpp"

using namespace spde;

namespace {

// Small enough for unit tests, large enough for five interior points.
ExperimentConfig small_config() {
  ExperimentConfig c;
  c.grid = SpaceTimeGrid(200, 24, 24);
  c.trunc = TruncationSpec(24, 24);
  c.thinning.n = 20;
  c.thinning.delta = 0.1;
  c.replications = 4;
  c.seed = RngSeed{9};
  c.threads = 1;
  return c;
}

std::filesystem::path temp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  const ExperimentConfig d = parse_config("{}");
  CHECK(d.grid.N == 1000);
  CHECK(d.grid.M1 == 50);
  CHECK(d.trunc.K == 256);
  CHECK(d.replications == 25);
  CHECK(d.space_thinning().m1 == 5);

  const ExperimentConfig c = parse_config(R"({
    "params": {"theta2": 0.3, "sigma": 0.5, "alpha": 0.3, "mu0": 1.5},
    "kind": "Q2-unknown-mu0",
    "grid": {"N": 100, "M1": 30, "M2": 40},
    "truncation": {"K": 16, "L": 8},
    "thinning": {"n": 10, "delta": 0.1, "mbar1": 6, "mbar2": 8},
    "contrast": {"kappa": [-5, 5], "grid": [3, 4]},
    "replications": 7, "seed": 123, "threads": 2
  })");
  CHECK(c.params.theta2() == 0.3);
  CHECK(c.params.theta1() == 0.2);
  CHECK(*c.params.mu0() == 1.5);
  CHECK(c.kind == NoiseKind::Q2UnknownMu0);
  CHECK(c.grid.M2 == 40);
  CHECK(c.trunc.L == 8);
  CHECK(c.contrast.kappa.hi == 5.0);
  CHECK(c.contrast.grid_eta == 4);
  CHECK(c.seed.master == 123);

  const ExperimentConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"kind": "Q3"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"kind": "Q2-known-mu0"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"params": {"alpha": 1.2}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"replications": 0})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"N": 10}, "thinning": {"n": 20}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"M1": 3}})"), std::invalid_argument);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), std::invalid_argument);
}

TEST_CASE("diagnostic ratios") {
  const Exponents e;
  const auto d50 = diagnostic_ratios(50, 25, 1000, 200, 200, 0.5, e);
  CHECK(d50.consistency_space == doctest::Approx(0.00779).epsilon(1e-3));
  CHECK(d50.consistency_grid == doctest::Approx(0.2517).epsilon(1e-3));
  const auto d100 = diagnostic_ratios(100, 25, 1000, 200, 200, 0.5, e);
  CHECK(d100.consistency_space == doctest::Approx(0.011017).epsilon(1e-4));
  CHECK(d100.consistency_grid == doctest::Approx(0.50300).epsilon(1e-4));
  const auto d150 = diagnostic_ratios(150, 25, 1000, 200, 200, 0.5, e);
  CHECK(d150.consistency_space == doctest::Approx(0.013493).epsilon(1e-4));
  CHECK(d150.consistency_grid == doctest::Approx(0.7542).epsilon(1e-3));
}

TEST_CASE("replications are deterministic and thread-count independent") {
  ExperimentConfig c = small_config();
  const auto a = run_replication(c, 2);
  const auto b = run_replication(c, 2);
  CHECK(a.fit.scale == b.fit.scale);
  CHECK(a.qv11 == b.qv11);
  CHECK(record_json(a) == record_json(b));

  const SummaryTable one = run_monte_carlo(c);
  c.threads = 3;
  const SummaryTable three = run_monte_carlo(c);
  CHECK(summary_csv(one) == summary_csv(three));
  CHECK(records_csv(one) == records_csv(three));
  CHECK(one.total == 4);
  CHECK(one.succeeded + one.failed == 4);
  CHECK(one.rows.front().parameter == "s");
  CHECK(one.rows.back().parameter == "lambda11");
  CHECK(summary_csv(one).rfind("parameter,true,mean,sd,fail_count\n", 0) == 0);
}

TEST_CASE("single replication has zero sd") {
  ExperimentConfig c = small_config();
  c.replications = 1;
  const SummaryTable t = run_monte_carlo(c);
  for (const auto& r : t.rows)
    if (r.fail_count == 0) CHECK(r.sd == 0.0);
}

TEST_CASE("noiseless field is flagged degenerate and fails cleanly") {
  ExperimentConfig c = small_config();
  c.params = c.params.with_sigma(0.0);
  c.replications = 2;
  const SummaryTable t = run_monte_carlo(c);
  for (const auto& r : t.records) {
    CHECK(r.degenerate);
    CHECK(r.fit.scale == c.contrast.scale.lo);
    CHECK(r.estimates.failure == PluginFailure::NonpositiveBase);
  }
  CHECK(t.failed == 2);
}

TEST_CASE("different replications are uncorrelated") {
  ExperimentConfig c = small_config();
  c.grid = SpaceTimeGrid(40, 4, 4);
  c.trunc = TruncationSpec(8, 8);
  std::vector<double> a, b;
  for (int r = 0; r < 400; ++r) {
    SimulationRequest req{c.params, c.kind, c.grid, c.trunc, {}, c.seed, static_cast<std::uint64_t>(2 * r)};
    const FieldSample f = simulate_field(req);
    req.rep_index = 2 * r + 1;
    const FieldSample g = simulate_field(req);
    a.push_back(f.at(40, 2, 2));
    b.push_back(g.at(40, 2, 2));
  }
  CHECK(std::abs(testing::correlation(a, b)) < 3.0 / std::sqrt(400.0));
}

TEST_CASE("field dump round trip") {
  SimulationRequest req{small_config().params, NoiseKind::Q1, SpaceTimeGrid(5, 3, 4), TruncationSpec(4, 4),
                        {}, RngSeed{1}, 0};
  const FieldSample f = simulate_field(req);
  const auto path = temp_path("spde_roundtrip.bin");
  write_field(path.string(), f);
  CHECK(std::filesystem::file_size(path) == 40 + 8 * f.grid().node_count());
  const FieldSample g = read_field(path.string());
  CHECK(g.grid() == f.grid());
  CHECK(std::equal(f.values().begin(), f.values().end(), g.values().begin()));

  {
    std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(0);
    io.write("XXXX", 4);
  }
  CHECK_THROWS_AS(read_field(path.string()), std::runtime_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_field(path.string()), std::runtime_error);
}

TEST_CASE("estimate_field on a stored field matches the live pipeline") {
  const ExperimentConfig c = small_config();
  SimulationRequest req{c.params, c.kind, c.grid, c.trunc, {}, c.seed, 1};
  const auto path = temp_path("spde_estimate.bin");
  write_field(path.string(), simulate_field(req));
  const auto stored = estimate_field(read_field(path.string()), c, 1);
  std::filesystem::remove(path);
  CHECK(record_json(stored) == record_json(run_replication(c, 1)));

  ExperimentConfig other = c;
  other.grid = SpaceTimeGrid(100, 24, 24);
  CHECK_THROWS_AS(estimate_field(simulate_field(req), other, 1), std::invalid_argument);
}

TEST_CASE("cross sections") {
  SimulationRequest req{small_config().params, NoiseKind::Q1, SpaceTimeGrid(4, 4, 2), TruncationSpec(3, 3),
                        {}, RngSeed{2}, 0};
  const FieldSample f = simulate_field(req);
  const CrossSection t = cross_section_dump(f, Axis::T, 0.5);
  CHECK(t.index == 2);
  CHECK(t.series.size() == 5 * 3);
  CHECK(t.series[4].value == f.at(2, 1, 1));
  const CrossSection y = cross_section_dump(f, Axis::Y, 0.25);
  CHECK(y.series.size() == 5 * 3);
  CHECK(y.series[3].u == 0.25);
  CHECK(y.series[3].value == f.at(1, 1, 0));
  const CrossSection z = cross_section_dump(f, Axis::Z, 1.0);
  for (const auto& p : z.series) CHECK(p.value == 0.0);
  CHECK_THROWS_AS(cross_section_dump(f, Axis::Y, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(cross_section_dump(f, Axis::T, 1.5), std::invalid_argument);
  CHECK(cross_section_csv(t).rfind("y,z,value\n", 0) == 0);
  CHECK(parse_axis("z") == Axis::Z);
  CHECK_THROWS_AS(parse_axis("w"), std::invalid_argument);
}

TEST_CASE("text writers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e300) == "1e+300");
  const SpaceThinning thin = build_space_thinning(10, 10, 5, 5, 0.2);
  SquaredIncrementField Z{4, 4, 0.5, 10, std::vector<double>(16, 0.25)};
  const std::string csv = squared_increment_csv(Z, thin);
  CHECK(csv.rfind("y\\z,0.2,0.4,0.6,0.8\n", 0) == 0);
}
