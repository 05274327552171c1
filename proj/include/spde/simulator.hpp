#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/model.hpp"
#include "spde/rng.hpp"

namespace spde {

/// Raised when a request would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observation lattice t_i = i/N, y_j = j/M1, z_j = j/M2 on [0,1]^3.
struct SpaceTimeGrid {
  int N = 1;
  int M1 = 1;
  int M2 = 1;

  SpaceTimeGrid() = default;
  SpaceTimeGrid(int N_, int M1_, int M2_);

  double dt() const { return 1.0 / N; }
  double t(int i) const { return i == N ? 1.0 : static_cast<double>(i) / N; }
  double y(int j) const { return j == M1 ? 1.0 : static_cast<double>(j) / M1; }
  double z(int j) const { return j == M2 ? 1.0 : static_cast<double>(j) / M2; }

  std::size_t node_count() const {
    return static_cast<std::size_t>(N + 1) * (M1 + 1) * (M2 + 1);
  }

  friend bool operator==(const SpaceTimeGrid&, const SpaceTimeGrid&) = default;
};

/// Spectral cutoffs: modes 1..K in y and 1..L in z.
struct TruncationSpec {
  int K = 1;
  int L = 1;

  TruncationSpec() = default;
  TruncationSpec(int K_, int L_);

  friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

/// Spectral coefficients <xi, e_{k,l}> of the initial value; missing modes are 0.
struct InitialCondition {
  std::map<Mode, double> coefficients;

  double at(Mode m) const {
    auto it = coefficients.find(m);
    return it == coefficients.end() ? 0.0 : it->second;
  }
};

struct Provenance {
  std::string params;
  NoiseKind kind = NoiseKind::Q1;
  TruncationSpec trunc;
  std::uint64_t seed = 0;
  std::uint64_t rep_index = 0;
};

/// Observed field X(t_i, y_j1, z_j2), stored row-major in (i, j1, j2).
class FieldSample {
 public:
  FieldSample(SpaceTimeGrid grid, std::vector<double> values, Provenance provenance = {});

  const SpaceTimeGrid& grid() const { return grid_; }
  const Provenance& provenance() const { return provenance_; }
  std::span<const double> values() const { return values_; }

  double at(int i, int j1, int j2) const { return values_[index(i, j1, j2)]; }

  /// Spatial slice at time index i, (M1+1) x (M2+1) row-major.
  std::span<const double> slice(int i) const {
    const std::size_t stride = static_cast<std::size_t>(grid_.M1 + 1) * (grid_.M2 + 1);
    return std::span<const double>(values_).subspan(i * stride, stride);
  }

  std::size_t index(int i, int j1, int j2) const {
    return (static_cast<std::size_t>(i) * (grid_.M1 + 1) + j1) * (grid_.M2 + 1) + j2;
  }

 private:
  SpaceTimeGrid grid_;
  std::vector<double> values_;
  Provenance provenance_;
};

/// K*L coordinate paths sampled at t_0..t_N, mode-major.
class CoordinatePaths {
 public:
  CoordinatePaths(TruncationSpec trunc, int N);

  const TruncationSpec& trunc() const { return trunc_; }
  int N() const { return N_; }

  std::span<double> path(Mode m) { return {data_.data() + offset(m), static_cast<std::size_t>(N_ + 1)}; }
  std::span<const double> path(Mode m) const {
    return {data_.data() + offset(m), static_cast<std::size_t>(N_ + 1)};
  }

 private:
  std::size_t offset(Mode m) const;

  TruncationSpec trunc_;
  int N_;
  std::vector<double> data_;
};

/// Exact OU transition over dt:
///   e^{-lambda dt} x_prev + gamma sqrt((1 - e^{-2 lambda dt}) / (2 lambda)) noise
double ou_transition(double x_prev, double lambda, double gamma, double dt, double noise);

/// Per-mode decay and conditional standard deviation of one exact OU step.
struct OuStep {
  double decay;
  double sd;
};
OuStep ou_step(double lambda, double gamma, double dt);

/// Fills `out` (length N+1) with an exact-in-law OU path started at x0, using
/// the stream seeded by `stream_seed`.
void sample_ou_path(double x0, OuStep step, std::uint64_t stream_seed, std::span<double> out);

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;

struct SimulationRequest {
  ModelParams params;
  NoiseKind kind = NoiseKind::Q1;
  SpaceTimeGrid grid;
  TruncationSpec trunc;
  InitialCondition init;
  RngSeed seed;
  std::uint64_t rep_index = 0;
};

/// Independent exact OU paths for all modes within the truncation.  Mode
/// (k,l) draws from the stream mode_seed(replication_seed(seed, rep), k, l).
/// Throws ResourceError when K*L*(N+1) doubles exceed `memory_budget` bytes.
CoordinatePaths simulate_coordinate_paths(const SimulationRequest& req,
                                          std::size_t memory_budget = kDefaultMemoryBudget);

/// X(t_i, y, z) = sum_{k<=K, l<=L} x_{k,l}(t_i) e_{k,l}(y, z) on every grid node.
FieldSample synthesize_field(const CoordinatePaths& paths, const SpaceTimeGrid& grid,
                             const ModelParams& params, Provenance provenance = {});

/// Same result as synthesize_field(simulate_coordinate_paths(req)) but keeps
/// only one row of L paths in memory at a time.
FieldSample simulate_field(const SimulationRequest& req);

}  // namespace spde
