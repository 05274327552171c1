#include "spde/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spde {

static_assert(std::endian::native == std::endian::little,
              "field dumps are written in native order and must be little-endian");

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("truncated field file");
  return value;
}

nlohmann::json json_number(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace

void write_field(const std::string& path, const FieldSample& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.write(kFieldMagic, sizeof(kFieldMagic));
  put<std::uint32_t>(os, kFieldVersion);
  put<std::uint32_t>(os, 0);
  put<std::uint64_t>(os, field.grid().N);
  put<std::uint64_t>(os, field.grid().M1);
  put<std::uint64_t>(os, field.grid().M2);
  const auto v = field.values();
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

FieldSample read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kFieldMagic, sizeof(magic)) != 0)
    throw std::runtime_error("'" + path + "' is not a field dump");
  const auto version = get<std::uint32_t>(is);
  if (version != kFieldVersion)
    throw std::runtime_error("unsupported field dump version " + std::to_string(version));
  get<std::uint32_t>(is);
  const auto N = get<std::uint64_t>(is);
  const auto M1 = get<std::uint64_t>(is);
  const auto M2 = get<std::uint64_t>(is);
  constexpr std::uint64_t kMaxDim = 1u << 24;
  if (N == 0 || M1 == 0 || M2 == 0 || N > kMaxDim || M1 > kMaxDim || M2 > kMaxDim)
    throw std::runtime_error("field dump has invalid dimensions");
  SpaceTimeGrid grid(static_cast<int>(N), static_cast<int>(M1), static_cast<int>(M2));
  std::vector<double> values(grid.node_count());
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated field file");
  return FieldSample(grid, std::move(values));
}

std::string squared_increment_csv(const SquaredIncrementField& Z, const SpaceThinning& thin) {
  std::ostringstream os;
  os << "y\\z";
  for (double z : thin.points_z) os << ',' << format_double(z);
  os << '\n';
  for (int a = 0; a < Z.m1; ++a) {
    os << format_double(thin.points_y[a]);
    for (int b = 0; b < Z.m2; ++b) os << ',' << format_double(Z.at(a, b));
    os << '\n';
  }
  return os.str();
}

std::string path_csv(const ApproxCoordinatePath& path, const TimeThinning& tt) {
  std::ostringstream os;
  os << "t,value\n";
  for (std::size_t i = 0; i < path.values.size(); ++i)
    os << format_double(tt.point(static_cast<int>(i))) << ',' << format_double(path.values[i]) << '\n';
  return os.str();
}

std::string fit_json(const MinimumContrastFit& fit) {
  nlohmann::ordered_json j;
  j["scale"] = fit.scale;
  j["kappa_hat"] = fit.kappa_hat;
  j["eta_hat"] = fit.eta_hat;
  j["contrast"] = fit.contrast;
  j["converged"] = fit.converged;
  j["n_restarts_used"] = fit.n_restarts_used;
  j["grad_norm"] = fit.grad_norm;
  return j.dump(2);
}

std::string estimates_json(const PluginEstimates& est, const CovarianceMatrix* covariance) {
  nlohmann::ordered_json j;
  j["case"] = std::string(to_string(est.kind));
  j["failure"] = est.failure ? nlohmann::ordered_json(std::string(to_string(*est.failure)))
                             : nlohmann::ordered_json(nullptr);
  j["theta0"] = json_number(est.theta0);
  j["theta1"] = json_number(est.theta1);
  j["eta1"] = json_number(est.eta1);
  j["theta2"] = json_number(est.theta2);
  j["sigma2"] = json_number(est.sigma2);
  j["mu0"] = json_number(est.mu0);
  j["lambda11_hat"] = json_number(est.lambda11_hat);
  if (covariance) {
    const char* names[] = {"J", "K", "L"};
    nlohmann::ordered_json c;
    c["which"] = names[static_cast<int>(covariance->which)];
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < covariance->entries.rows(); ++r) {
      auto row = nlohmann::ordered_json::array();
      for (Eigen::Index col = 0; col < covariance->entries.cols(); ++col)
        row.push_back(covariance->entries(r, col));
      rows.push_back(row);
    }
    c["entries"] = rows;
    j["covariance"] = c;
  }
  return j.dump(2);
}

}  // namespace spde
