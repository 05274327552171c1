#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spde/contrast.hpp"
#include "spde/increments.hpp"
#include "spde/plugin.hpp"
#include "spde/reconstruction.hpp"
#include "spde/simulator.hpp"

namespace spde {

struct ThinningConfig {
  int mbar1 = 0;  // 0: pick the smallest mbar giving target_m1 interior points
  int mbar2 = 0;
  int target_m1 = 5;
  int target_m2 = 5;
  double delta = 0.05;
  int n = 100;
};

/// Rate exponents used only for the logged diagnostic ratios.
struct Exponents {
  double rho = 0.47;
  double gamma = 0.26;
  double epsilon = 0.499;
};

/// Everything needed to run the simulate -> estimate pipeline.  The defaults
/// are the desk-scale Q1 configuration.
struct ExperimentConfig {
  ModelParams params{0.0, 0.2, 0.2, 0.2, 1.0, 0.5};
  NoiseKind kind = NoiseKind::Q1;
  SpaceTimeGrid grid{1000, 50, 50};
  TruncationSpec trunc{256, 256};
  ThinningConfig thinning;
  ContrastConfig contrast;
  int replications = 25;
  RngSeed seed{20240601};
  int threads = 0;  // 0: hardware concurrency; never affects results
  Exponents exponents;

  /// Throws std::invalid_argument on any inconsistency (including a
  /// thinning that cannot be built on the grid).
  void validate() const;
  SpaceThinning space_thinning() const;
  TimeThinning time_thinning() const;
};

/// Parses the JSON config document (see README for the schema); missing
/// keys keep their defaults.  Throws std::invalid_argument on bad input.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

struct ReplicationRecord {
  std::uint64_t rep_index = 0;
  MinimumContrastFit fit;
  double qv11 = 0.0;
  double qv12 = 0.0;
  double horizon = 0.0;  // t~_n actually used by the realized variations
  PluginEstimates estimates;
  bool degenerate = false;  // Z_N identically zero
};

/// Estimation pipeline on an observed field: contrast fit, reconstruction
/// of modes (1,1) and (1,2), realized variations and the case's plug-in.
ReplicationRecord estimate_field(const FieldSample& field, const ExperimentConfig& config,
                                 std::uint64_t rep_index = 0);

/// Simulates replication `rep_index` and runs estimate_field on it.
ReplicationRecord run_replication(const ExperimentConfig& config, std::uint64_t rep_index);

struct SummaryRow {
  std::string parameter;
  double true_value = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  int fail_count = 0;
};

struct Diagnostics {
  double consistency_space = 0.0;    // n^{1-a} / (m N^{2 gamma})
  double consistency_grid = 0.0;     // n^{1-a+eps} / min(M1, M2)^{2 eps}
  double normality_space = 0.0;      // n^{2-a} / (m N^{2 gamma})
  double normality_grid = 0.0;       // n^{2-a+eps} / min(M1, M2)^{2 eps}
};

Diagnostics diagnostic_ratios(int n, int m, int N, int M1, int M2, double alpha,
                              const Exponents& e);

struct SummaryTable {
  NoiseKind kind = NoiseKind::Q1;
  int total = 0;
  int succeeded = 0;
  int failed = 0;
  std::vector<SummaryRow> rows;
  Diagnostics diagnostics;
  std::vector<ReplicationRecord> records;  // sorted by rep_index
};

/// Summary over already computed records (sorted internally).
SummaryTable summarize(const ExperimentConfig& config, std::vector<ReplicationRecord> records);

/// Runs config.replications replications on config.threads workers.
SummaryTable run_monte_carlo(const ExperimentConfig& config);

std::string summary_csv(const SummaryTable& table);
std::string summary_json(const SummaryTable& table, const ExperimentConfig& config);
std::string records_csv(const SummaryTable& table);
std::string record_json(const ReplicationRecord& record);

enum class Axis { T, Y, Z };
Axis parse_axis(std::string_view text);

struct CrossSectionPoint {
  double u;  // first remaining coordinate
  double v;  // second remaining coordinate
  double value;
};

/// Two-dimensional slice at a fixed t, y or z; remaining coordinates are
/// (y, z), (t, z) or (t, y) respectively.
struct CrossSection {
  Axis axis = Axis::T;
  double level = 0.0;
  int index = 0;
  std::vector<CrossSectionPoint> series;
};

/// Throws std::invalid_argument when `level` is not a node of the grid.
CrossSection cross_section_dump(const FieldSample& field, Axis axis, double level);
std::string cross_section_csv(const CrossSection& cs);

}  // namespace spde
