#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace exradon {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorCode {
  BadParams,
  SupportTouchesSingularity,
  NonFinite,
  HyperplaneHitsSingularity,
  OffsetOutOfRange,
  HalfspaceTouchesOrigin,
  InfiniteMass,
  DerivativeOrderUnsupported,
  IntegralDegree,
  PoleHit,
  TOverflow,
  TooFewSamples,
  DegenerateSample,
  Infeasible,
  Divergence,
  ConfigError,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to machine-readable output.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

inline bool is_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::round(x)) <= tol;
}

}  // namespace exradon
