#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ramp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int iteration, std::vector<double> zeta_trace)
      : Error(what), iteration_(iteration), zeta_trace_(std::move(zeta_trace)) {}
  int iteration() const { return iteration_; }
  const std::vector<double>& zeta_trace() const { return zeta_trace_; }

 private:
  int iteration_;
  std::vector<double> zeta_trace_;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, std::vector<double> grid, std::vector<double> rhs)
      : Error(what), grid_(std::move(grid)), rhs_(std::move(rhs)) {}
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& rhs() const { return rhs_; }

 private:
  std::vector<double> grid_;
  std::vector<double> rhs_;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Independent substream seed for object `stream` under master `seed` (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Named substreams used across the project.
namespace stream {
inline constexpr std::uint64_t kDesign = 1;
inline constexpr std::uint64_t kCoefficients = 2;
inline constexpr std::uint64_t kErrors = 3;
inline constexpr std::uint64_t kWeightSearch = 4;
inline constexpr std::uint64_t kMonteCarlo = 5;
inline constexpr std::uint64_t kReplicate = 100;
}  // namespace stream

using WarningHandler = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink (default: stderr). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace ramp
