#include "spde/simulator.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace spde {

SpaceTimeGrid::SpaceTimeGrid(int N_, int M1_, int M2_) : N(N_), M1(M1_), M2(M2_) {
  if (N < 1 || M1 < 1 || M2 < 1) throw std::invalid_argument("grid sizes must be >= 1");
}

TruncationSpec::TruncationSpec(int K_, int L_) : K(K_), L(L_) {
  if (K < 1 || L < 1) throw std::invalid_argument("truncation cutoffs must be >= 1");
}

FieldSample::FieldSample(SpaceTimeGrid grid, std::vector<double> values, Provenance provenance)
    : grid_(grid), values_(std::move(values)), provenance_(std::move(provenance)) {
  if (values_.size() != grid_.node_count())
    throw std::invalid_argument("field size does not match grid");
}

CoordinatePaths::CoordinatePaths(TruncationSpec trunc, int N)
    : trunc_(trunc), N_(N),
      data_(static_cast<std::size_t>(trunc.K) * trunc.L * (N + 1), 0.0) {}

std::size_t CoordinatePaths::offset(Mode m) const {
  if (m.k > trunc_.K || m.l > trunc_.L) throw std::out_of_range("mode outside truncation");
  return (static_cast<std::size_t>(m.k - 1) * trunc_.L + (m.l - 1)) * (N_ + 1);
}

OuStep ou_step(double lambda, double gamma, double dt) {
  const double decay = std::exp(-lambda * dt);
  // 1 - e^{-2 lambda dt} without cancellation for small lambda dt
  const double var_factor = -std::expm1(-2.0 * lambda * dt) / (2.0 * lambda);
  return {decay, gamma * std::sqrt(var_factor)};
}

double ou_transition(double x_prev, double lambda, double gamma, double dt, double noise) {
  const OuStep step = ou_step(lambda, gamma, dt);
  return step.decay * x_prev + step.sd * noise;
}

void sample_ou_path(double x0, OuStep step, std::uint64_t stream_seed, std::span<double> out) {
  Engine engine(stream_seed);
  std::normal_distribution<double> normal;
  double x = x0;
  out[0] = x;
  for (std::size_t i = 1; i < out.size(); ++i) {
    x = step.decay * x + step.sd * normal(engine);
    out[i] = x;
  }
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_request(const SimulationRequest& req) {
  if (is_q2(req.kind) && !req.params.mu0())
    throw std::invalid_argument("Q2 noise requires mu0");
  for (const auto& [mode, value] : req.init.coefficients) {
    if (mode.k > req.trunc.K || mode.l > req.trunc.L)
      throw std::invalid_argument("initial condition references a mode outside the truncation");
    if (!std::isfinite(value)) throw std::invalid_argument("initial condition must be finite");
  }
}

/// Fills row l-1 of `row_paths` with the paths of modes (k, 1..L).
void sample_mode_row(const SimulationRequest& req, int k, std::uint64_t rep_seed,
                     RowMatrix& row_paths) {
  const double dt = req.grid.dt();
  for (int l = 1; l <= req.trunc.L; ++l) {
    const Mode mode{k, l};
    const double gamma = req.params.sigma() * damping_factor(req.kind, mode, req.params);
    const OuStep step = ou_step(eigenvalue(mode, req.params), gamma, dt);
    std::span<double> out(row_paths.row(l - 1).data(), static_cast<std::size_t>(req.grid.N + 1));
    sample_ou_path(req.init.at(mode), step, mode_seed(rep_seed, k, l), out);
  }
}

/// Shared accumulation kernel for the streaming and stored-path routes:
/// X(i, j1, j2) += a_k(y_j1) * sum_l b_l(z_j2) x_{k,l}(t_i).
class FieldAccumulator {
 public:
  FieldAccumulator(const SpaceTimeGrid& grid, const ModelParams& params, int L)
      : grid_(grid), params_(params), values_(grid.node_count(), 0.0),
        z_factors_(grid.M2 + 1, L), y_factor_(grid.M1 + 1) {
    for (int l = 1; l <= L; ++l)
      for (int j = 0; j <= grid.M2; ++j)
        z_factors_(j, l - 1) = eigen_factor(l, grid.z(j), params.eta());
  }

  void add_row(int k, const RowMatrix& row_paths) {
    for (int j = 0; j <= grid_.M1; ++j) y_factor_(j) = eigen_factor(k, grid_.y(j), params_.kappa());
    // (M2+1) x (N+1): column i holds sum_l b_l(z_j2) x_{k,l}(t_i)
    const Eigen::MatrixXd z_profile = z_factors_ * row_paths;
    const std::size_t width = grid_.M2 + 1;
    for (int i = 0; i <= grid_.N; ++i) {
      const double* col = z_profile.col(i).data();
      for (int j1 = 1; j1 < grid_.M1; ++j1) {
        const double a = y_factor_(j1);
        double* dst = values_.data() + (static_cast<std::size_t>(i) * (grid_.M1 + 1) + j1) * width;
        // j2 = 0 and j2 = M2 carry zero factors, leaving the boundary at exactly 0
        for (int j2 = 1; j2 < grid_.M2; ++j2) dst[j2] += a * col[j2];
      }
    }
  }

  std::vector<double> take() { return std::move(values_); }

 private:
  const SpaceTimeGrid& grid_;
  const ModelParams& params_;
  std::vector<double> values_;
  Eigen::MatrixXd z_factors_;
  Eigen::VectorXd y_factor_;
};

std::string params_summary(const ModelParams& p) {
  std::string s = "theta0=" + std::to_string(p.theta0()) + " theta1=" + std::to_string(p.theta1()) +
                  " eta1=" + std::to_string(p.eta1()) + " theta2=" + std::to_string(p.theta2()) +
                  " sigma=" + std::to_string(p.sigma()) + " alpha=" + std::to_string(p.alpha());
  if (p.mu0()) s += " mu0=" + std::to_string(*p.mu0());
  return s;
}

}  // namespace

CoordinatePaths simulate_coordinate_paths(const SimulationRequest& req, std::size_t memory_budget) {
  check_request(req);
  const double bytes = static_cast<double>(req.trunc.K) * req.trunc.L * (req.grid.N + 1) * sizeof(double);
  if (bytes > static_cast<double>(memory_budget))
    throw ResourceError("coordinate paths need " + std::to_string(bytes) +
                        " bytes, budget is " + std::to_string(memory_budget));

  CoordinatePaths paths(req.trunc, req.grid.N);
  const std::uint64_t rep_seed = replication_seed(req.seed, req.rep_index);
  const double dt = req.grid.dt();
  for (int k = 1; k <= req.trunc.K; ++k) {
    for (int l = 1; l <= req.trunc.L; ++l) {
      const Mode mode{k, l};
      const double gamma = req.params.sigma() * damping_factor(req.kind, mode, req.params);
      sample_ou_path(req.init.at(mode), ou_step(eigenvalue(mode, req.params), gamma, dt),
                     mode_seed(rep_seed, k, l), paths.path(mode));
    }
  }
  return paths;
}

FieldSample synthesize_field(const CoordinatePaths& paths, const SpaceTimeGrid& grid,
                             const ModelParams& params, Provenance provenance) {
  if (paths.N() != grid.N) throw std::invalid_argument("paths and grid disagree on N");
  const TruncationSpec trunc = paths.trunc();
  FieldAccumulator acc(grid, params, trunc.L);
  RowMatrix row_paths(trunc.L, grid.N + 1);
  for (int k = 1; k <= trunc.K; ++k) {
    for (int l = 1; l <= trunc.L; ++l) {
      const auto src = paths.path(Mode{k, l});
      std::copy(src.begin(), src.end(), row_paths.row(l - 1).data());
    }
    acc.add_row(k, row_paths);
  }
  provenance.trunc = trunc;
  return FieldSample(grid, acc.take(), std::move(provenance));
}

FieldSample simulate_field(const SimulationRequest& req) {
  check_request(req);
  const std::uint64_t rep_seed = replication_seed(req.seed, req.rep_index);
  FieldAccumulator acc(req.grid, req.params, req.trunc.L);
  RowMatrix row_paths(req.trunc.L, req.grid.N + 1);
  for (int k = 1; k <= req.trunc.K; ++k) {
    sample_mode_row(req, k, rep_seed, row_paths);
    acc.add_row(k, row_paths);
  }
  Provenance prov{params_summary(req.params), req.kind, req.trunc, req.seed.master, req.rep_index};
  return FieldSample(req.grid, acc.take(), std::move(prov));
}

}  // namespace spde
