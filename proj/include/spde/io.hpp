#pragma once

#include <cstdint>
#include <string>

#include "spde/contrast.hpp"
#include "spde/increments.hpp"
#include "spde/plugin.hpp"
#include "spde/reconstruction.hpp"
#include "spde/simulator.hpp"

namespace spde {

// Binary field dump, all integers and floats little-endian:
//   offset 0   8 bytes  magic "SPDEFLD\0"
//   offset 8   uint32   format version (1)
//   offset 12  uint32   reserved (0)
//   offset 16  uint64   N
//   offset 24  uint64   M1
//   offset 32  uint64   M2
//   offset 40  float64  X(i, j1, j2), (N+1)(M1+1)(M2+1) values, j2 fastest
inline constexpr char kFieldMagic[8] = {'S', 'P', 'D', 'E', 'F', 'L', 'D', '\0'};
inline constexpr std::uint32_t kFieldVersion = 1;

void write_field(const std::string& path, const FieldSample& field);
/// Throws std::runtime_error on a bad magic, version or size.
FieldSample read_field(const std::string& path);

/// Z_N matrix: header row "y\z,z~_1,...", then one row per y~.
std::string squared_increment_csv(const SquaredIncrementField& Z, const SpaceThinning& thin);

/// Two columns: t~, value.
std::string path_csv(const ApproxCoordinatePath& path, const TimeThinning& tt);

std::string fit_json(const MinimumContrastFit& fit);
std::string estimates_json(const PluginEstimates& est,
                           const CovarianceMatrix* covariance = nullptr);

/// Shortest round-trip decimal form used by every text writer.
std::string format_double(double x);

}  // namespace spde
