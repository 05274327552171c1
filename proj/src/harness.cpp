#include "spde/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "spde/io.hpp"

namespace spde {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------- config

SpaceThinning ExperimentConfig::space_thinning() const {
  auto pick = [&](int mbar, int target, int M, const char* axis) {
    if (mbar > 0) return mbar;
    const int chosen = choose_mbar(M, target, thinning.delta);
    if (chosen == 0)
      throw std::invalid_argument(std::string("no coarse count yields ") + std::to_string(target) +
                                  " interior points on " + axis);
    return chosen;
  };
  return build_space_thinning(grid.M1, grid.M2, pick(thinning.mbar1, thinning.target_m1, grid.M1, "y"),
                              pick(thinning.mbar2, thinning.target_m2, grid.M2, "z"), thinning.delta);
}

TimeThinning ExperimentConfig::time_thinning() const { return build_time_thinning(grid.N, thinning.n); }

void ExperimentConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
  if (is_q2(kind) && !params.mu0()) throw std::invalid_argument("Q2 noise requires params.mu0");
  contrast.validate();
  space_thinning();
  time_thinning();
}

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

Interval read_interval(const json& j, const char* key, Interval fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 2) throw std::invalid_argument(std::string(key) + " must be [lo, hi]");
  return {a[0].get<double>(), a[1].get<double>()};
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(json_text);
    if (j.contains("params")) {
      const auto& p = j.at("params");
      double theta0 = cfg.params.theta0(), theta1 = cfg.params.theta1(), eta1 = cfg.params.eta1(),
             theta2 = cfg.params.theta2(), sigma = cfg.params.sigma(), alpha = cfg.params.alpha();
      std::optional<double> mu0;
      read_if(p, "theta0", theta0);
      read_if(p, "theta1", theta1);
      read_if(p, "eta1", eta1);
      read_if(p, "theta2", theta2);
      read_if(p, "sigma", sigma);
      read_if(p, "alpha", alpha);
      if (p.contains("mu0") && !p.at("mu0").is_null()) mu0 = p.at("mu0").get<double>();
      cfg.params = ModelParams(theta0, theta1, eta1, theta2, sigma, alpha, mu0);
    }
    if (j.contains("kind")) cfg.kind = parse_noise_kind(j.at("kind").get<std::string>());
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      int N = cfg.grid.N, M1 = cfg.grid.M1, M2 = cfg.grid.M2;
      read_if(g, "N", N);
      read_if(g, "M1", M1);
      read_if(g, "M2", M2);
      cfg.grid = SpaceTimeGrid(N, M1, M2);
    }
    if (j.contains("truncation")) {
      const auto& t = j.at("truncation");
      int K = cfg.trunc.K, L = cfg.trunc.L;
      read_if(t, "K", K);
      read_if(t, "L", L);
      cfg.trunc = TruncationSpec(K, L);
    }
    if (j.contains("thinning")) {
      const auto& t = j.at("thinning");
      read_if(t, "mbar1", cfg.thinning.mbar1);
      read_if(t, "mbar2", cfg.thinning.mbar2);
      read_if(t, "target_m1", cfg.thinning.target_m1);
      read_if(t, "target_m2", cfg.thinning.target_m2);
      read_if(t, "delta", cfg.thinning.delta);
      read_if(t, "n", cfg.thinning.n);
    }
    if (j.contains("contrast")) {
      const auto& c = j.at("contrast");
      cfg.contrast.scale = read_interval(c, "scale", cfg.contrast.scale);
      cfg.contrast.kappa = read_interval(c, "kappa", cfg.contrast.kappa);
      cfg.contrast.eta = read_interval(c, "eta", cfg.contrast.eta);
      if (c.contains("grid")) {
        const auto& g = c.at("grid");
        cfg.contrast.grid_kappa = g.at(0).get<int>();
        cfg.contrast.grid_eta = g.at(1).get<int>();
      }
      read_if(c, "max_iter", cfg.contrast.max_iter);
      read_if(c, "grad_tol", cfg.contrast.grad_tol);
      read_if(c, "step_tol", cfg.contrast.step_tol);
    }
    read_if(j, "replications", cfg.replications);
    read_if(j, "seed", cfg.seed.master);
    read_if(j, "threads", cfg.threads);
    if (j.contains("exponents")) {
      const auto& e = j.at("exponents");
      read_if(e, "rho", cfg.exponents.rho);
      read_if(e, "gamma", cfg.exponents.gamma);
      read_if(e, "epsilon", cfg.exponents.epsilon);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

namespace {

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  const ModelParams& p = c.params;
  j["params"] = {{"theta0", p.theta0()}, {"theta1", p.theta1()}, {"eta1", p.eta1()},
                 {"theta2", p.theta2()}, {"sigma", p.sigma()},   {"alpha", p.alpha()},
                 {"mu0", p.mu0() ? ordered_json(*p.mu0()) : ordered_json(nullptr)}};
  j["kind"] = std::string(to_string(c.kind));
  j["grid"] = {{"N", c.grid.N}, {"M1", c.grid.M1}, {"M2", c.grid.M2}};
  j["truncation"] = {{"K", c.trunc.K}, {"L", c.trunc.L}};
  j["thinning"] = {{"mbar1", c.thinning.mbar1},         {"mbar2", c.thinning.mbar2},
                   {"target_m1", c.thinning.target_m1}, {"target_m2", c.thinning.target_m2},
                   {"delta", c.thinning.delta},         {"n", c.thinning.n}};
  j["contrast"] = {{"scale", {c.contrast.scale.lo, c.contrast.scale.hi}},
                   {"kappa", {c.contrast.kappa.lo, c.contrast.kappa.hi}},
                   {"eta", {c.contrast.eta.lo, c.contrast.eta.hi}},
                   {"grid", {c.contrast.grid_kappa, c.contrast.grid_eta}},
                   {"max_iter", c.contrast.max_iter},
                   {"grad_tol", c.contrast.grad_tol},
                   {"step_tol", c.contrast.step_tol}};
  j["replications"] = c.replications;
  j["seed"] = c.seed.master;
  j["exponents"] = {{"rho", c.exponents.rho}, {"gamma", c.exponents.gamma}, {"epsilon", c.exponents.epsilon}};
  return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

// -------------------------------------------------------------- pipeline

ReplicationRecord estimate_field(const FieldSample& field, const ExperimentConfig& config,
                                 std::uint64_t rep_index) {
  if (!(field.grid() == config.grid)) throw std::invalid_argument("field grid does not match config");
  const double alpha = config.params.alpha();
  const SpaceThinning thin = config.space_thinning();
  const TimeThinning tt = config.time_thinning();

  ReplicationRecord rec;
  rec.rep_index = rep_index;
  const SquaredIncrementField Z = squared_increment_field(field, thin, alpha);
  rec.degenerate = std::all_of(Z.values.begin(), Z.values.end(), [](double v) { return v == 0.0; });
  rec.fit = minimize_contrast(Z, thin, alpha, config.contrast);

  const auto p11 = approx_coordinate(field, Mode{1, 1}, rec.fit.kappa_hat, rec.fit.eta_hat, tt);
  const auto p12 = approx_coordinate(field, Mode{1, 2}, rec.fit.kappa_hat, rec.fit.eta_hat, tt);
  rec.qv11 = realized_qv(p11).value;
  rec.qv12 = realized_qv(p12).value;
  rec.horizon = tt.horizon();

  const MinimumContrastFit& f = rec.fit;
  switch (config.kind) {
    case NoiseKind::Q1:
      rec.estimates = q1_plugin(f.scale, f.kappa_hat, f.eta_hat, rec.qv11, rec.qv12, alpha);
      break;
    case NoiseKind::Q2KnownMu0:
      rec.estimates = q2_known_plugin(f.scale, f.kappa_hat, f.eta_hat, rec.qv11, *config.params.mu0(), alpha);
      break;
    case NoiseKind::Q2UnknownMu0:
      rec.estimates = q2_unknown_plugin(f.scale, f.kappa_hat, f.eta_hat, rec.qv11, rec.qv12, alpha);
      break;
  }
  return rec;
}

ReplicationRecord run_replication(const ExperimentConfig& config, std::uint64_t rep_index) {
  SimulationRequest req{config.params, config.kind, config.grid, config.trunc, {}, config.seed, rep_index};
  return estimate_field(simulate_field(req), config, rep_index);
}

Diagnostics diagnostic_ratios(int n, int m, int N, int M1, int M2, double alpha, const Exponents& e) {
  const double nn = n;
  const double denom_space = m * std::pow(static_cast<double>(N), 2.0 * e.gamma);
  const double denom_grid = std::pow(static_cast<double>(std::min(M1, M2)), 2.0 * e.epsilon);
  return {std::pow(nn, 1.0 - alpha) / denom_space, std::pow(nn, 1.0 - alpha + e.epsilon) / denom_grid,
          std::pow(nn, 2.0 - alpha) / denom_space, std::pow(nn, 2.0 - alpha + e.epsilon) / denom_grid};
}

namespace {

struct Column {
  std::string name;
  double truth;
  std::optional<double> (*extract)(const ReplicationRecord&);
};

std::vector<Column> columns_for(const ExperimentConfig& c) {
  const ModelParams& p = c.params;
  const DerivedRatios r = derived_ratios(p);
  const bool q1 = c.kind == NoiseKind::Q1;
  std::vector<Column> cols;
  cols.push_back({q1 ? "s" : "S", q1 ? r.s : r.S,
                  [](const ReplicationRecord& x) -> std::optional<double> { return x.fit.scale; }});
  cols.push_back({"kappa", r.kappa,
                  [](const ReplicationRecord& x) -> std::optional<double> { return x.fit.kappa_hat; }});
  cols.push_back({"eta", r.eta,
                  [](const ReplicationRecord& x) -> std::optional<double> { return x.fit.eta_hat; }});
  if (q1)
    cols.push_back({"theta0", p.theta0(), [](const ReplicationRecord& x) { return x.estimates.theta0; }});
  if (c.kind == NoiseKind::Q2UnknownMu0)
    cols.push_back({"mu0", *p.mu0(), [](const ReplicationRecord& x) { return x.estimates.mu0; }});
  cols.push_back({"theta1", p.theta1(), [](const ReplicationRecord& x) { return x.estimates.theta1; }});
  cols.push_back({"eta1", p.eta1(), [](const ReplicationRecord& x) { return x.estimates.eta1; }});
  cols.push_back({"theta2", p.theta2(), [](const ReplicationRecord& x) { return x.estimates.theta2; }});
  cols.push_back({"sigma2", p.sigma() * p.sigma(),
                  [](const ReplicationRecord& x) { return x.estimates.sigma2; }});
  if (q1)
    cols.push_back({"lambda11", eigenvalue(Mode{1, 1}, p),
                    [](const ReplicationRecord& x) { return x.estimates.lambda11_hat; }});
  return cols;
}

}  // namespace

SummaryTable summarize(const ExperimentConfig& config, std::vector<ReplicationRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.rep_index < b.rep_index; });
  SummaryTable t;
  t.kind = config.kind;
  t.total = static_cast<int>(records.size());
  for (const auto& r : records) (r.estimates.ok() ? t.succeeded : t.failed)++;

  for (const Column& col : columns_for(config)) {
    SummaryRow row{col.name, col.truth, 0.0, 0.0, 0};
    std::vector<double> xs;
    for (const auto& r : records) {
      if (auto v = col.extract(r))
        xs.push_back(*v);
      else
        ++row.fail_count;
    }
    if (!xs.empty()) {
      double sum = 0.0;
      for (double x : xs) sum += x;
      row.mean = sum / xs.size();
      if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - row.mean) * (x - row.mean);
        row.sd = std::sqrt(ss / (xs.size() - 1));
      }
    } else {
      row.mean = std::nan("");
      row.sd = std::nan("");
    }
    t.rows.push_back(row);
  }
  const SpaceThinning thin = config.space_thinning();
  t.diagnostics = diagnostic_ratios(config.thinning.n, thin.m(), config.grid.N, config.grid.M1,
                                    config.grid.M2, config.params.alpha(), config.exponents);
  t.records = std::move(records);
  return t;
}

SummaryTable run_monte_carlo(const ExperimentConfig& config) {
  config.validate();
  const int reps = config.replications;
  int workers = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, reps);

  std::vector<ReplicationRecord> records(reps);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int r = next++; r < reps && !failed; r = next++) {
      try {
        records[r] = run_replication(config, static_cast<std::uint64_t>(r));
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return summarize(config, std::move(records));
}

// --------------------------------------------------------------- output

std::string summary_csv(const SummaryTable& t) {
  std::ostringstream os;
  os << "parameter,true,mean,sd,fail_count\n";
  for (const auto& r : t.rows)
    os << r.parameter << ',' << format_double(r.true_value) << ',' << format_double(r.mean) << ','
       << format_double(r.sd) << ',' << r.fail_count << '\n';
  return os.str();
}

std::string summary_json(const SummaryTable& t, const ExperimentConfig& config) {
  ordered_json j;
  j["case"] = std::string(to_string(t.kind));
  j["replications"] = t.total;
  j["succeeded"] = t.succeeded;
  j["failed"] = t.failed;
  auto rows = ordered_json::array();
  for (const auto& r : t.rows) {
    auto num = [](double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); };
    rows.push_back({{"parameter", r.parameter}, {"true", r.true_value}, {"mean", num(r.mean)},
                    {"sd", num(r.sd)}, {"fail_count", r.fail_count}});
  }
  j["summary"] = rows;
  j["diagnostics"] = {{"n^(1-a)/(m N^(2g))", t.diagnostics.consistency_space},
                      {"n^(1-a+e)/min(M)^(2e)", t.diagnostics.consistency_grid},
                      {"n^(2-a)/(m N^(2g))", t.diagnostics.normality_space},
                      {"n^(2-a+e)/min(M)^(2e)", t.diagnostics.normality_grid}};
  j["config"] = config_json(config);
  return j.dump(2) + "\n";
}

std::string records_csv(const SummaryTable& t) {
  std::ostringstream os;
  os << "rep,scale,kappa,eta,contrast,converged,qv11,qv12,theta0,theta1,eta1,theta2,sigma2,mu0,"
        "lambda11,failure,degenerate\n";
  auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  for (const auto& r : t.records) {
    const auto& e = r.estimates;
    os << r.rep_index << ',' << format_double(r.fit.scale) << ',' << format_double(r.fit.kappa_hat) << ','
       << format_double(r.fit.eta_hat) << ',' << format_double(r.fit.contrast) << ','
       << (r.fit.converged ? 1 : 0) << ',' << format_double(r.qv11) << ',' << format_double(r.qv12) << ','
       << opt(e.theta0) << ',' << opt(e.theta1) << ',' << opt(e.eta1) << ',' << opt(e.theta2) << ','
       << opt(e.sigma2) << ',' << opt(e.mu0) << ',' << opt(e.lambda11_hat) << ','
       << (e.failure ? std::string(to_string(*e.failure)) : std::string()) << ','
       << (r.degenerate ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string record_json(const ReplicationRecord& r) {
  ordered_json j;
  j["rep_index"] = r.rep_index;
  j["fit"] = ordered_json::parse(fit_json(r.fit));
  j["qv11"] = r.qv11;
  j["qv12"] = r.qv12;
  j["horizon"] = r.horizon;
  j["degenerate"] = r.degenerate;
  j["estimates"] = ordered_json::parse(estimates_json(r.estimates));
  return j.dump(2) + "\n";
}

// --------------------------------------------------------- cross sections

Axis parse_axis(std::string_view text) {
  if (text == "t") return Axis::T;
  if (text == "y") return Axis::Y;
  if (text == "z") return Axis::Z;
  throw std::invalid_argument("axis must be one of t, y, z");
}

namespace {

int node_index(double level, int count) {
  const double scaled = level * count;
  const double rounded = std::round(scaled);
  if (!(level >= 0.0 && level <= 1.0) || std::abs(scaled - rounded) > 1e-9)
    throw std::invalid_argument("level " + format_double(level) + " is not a grid node");
  return static_cast<int>(rounded);
}

}  // namespace

CrossSection cross_section_dump(const FieldSample& field, Axis axis, double level) {
  const SpaceTimeGrid& g = field.grid();
  CrossSection cs;
  cs.axis = axis;
  cs.level = level;
  switch (axis) {
    case Axis::T:
      cs.index = node_index(level, g.N);
      for (int a = 0; a <= g.M1; ++a)
        for (int b = 0; b <= g.M2; ++b) cs.series.push_back({g.y(a), g.z(b), field.at(cs.index, a, b)});
      break;
    case Axis::Y:
      cs.index = node_index(level, g.M1);
      for (int i = 0; i <= g.N; ++i)
        for (int b = 0; b <= g.M2; ++b) cs.series.push_back({g.t(i), g.z(b), field.at(i, cs.index, b)});
      break;
    case Axis::Z:
      cs.index = node_index(level, g.M2);
      for (int i = 0; i <= g.N; ++i)
        for (int a = 0; a <= g.M1; ++a) cs.series.push_back({g.t(i), g.y(a), field.at(i, a, cs.index)});
      break;
  }
  return cs;
}

std::string cross_section_csv(const CrossSection& cs) {
  static const char* headers[] = {"y,z,value\n", "t,z,value\n", "t,y,value\n"};
  std::ostringstream os;
  os << headers[static_cast<int>(cs.axis)];
  for (const auto& p : cs.series)
    os << format_double(p.u) << ',' << format_double(p.v) << ',' << format_double(p.value) << '\n';
  return os.str();
}

}  // namespace spde
