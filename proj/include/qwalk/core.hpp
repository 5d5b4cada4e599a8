#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qwalk {

inline constexpr const char* version = "0.1.0";

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;
using WaveVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt2 = 1.41421356237309504880;
inline constexpr double sqrt3 = 1.73205080756887729353;
inline constexpr cplx I_ {0.0, 1.0};

// Exit-code mapping used by the CLI: input problems are 2, numerical failures 1.
enum class ErrorKind { invalid_input, domain, singular, convergence, region, capacity, parse };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept {
    return (kind_ == ErrorKind::singular || kind_ == ErrorKind::convergence ||
            kind_ == ErrorKind::region) ? 1 : 2;
  }
private:
  ErrorKind kind_;
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& w) : Error(ErrorKind::invalid_input, w) {}
};
struct MassOutOfRange : Error {
  explicit MassOutOfRange(double m)
    : Error(ErrorKind::domain, "mass out of range [-1,1]: " + std::to_string(m)) {}
};
struct SingularPoint : Error {
  explicit SingularPoint(const std::string& w) : Error(ErrorKind::singular, w) {}
};
struct NonConvergence : Error {
  explicit NonConvergence(const std::string& w) : Error(ErrorKind::convergence, w) {}
};
struct RegionViolation : Error {
  explicit RegionViolation(const std::string& w) : Error(ErrorKind::region, w) {}
};
struct CapExceeded : Error {
  explicit CapExceeded(const std::string& w) : Error(ErrorKind::capacity, w) {}
};
struct ParseError : Error {
  ParseError(const std::string& w, std::size_t pos)
    : Error(ErrorKind::parse, w + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

// sigma_0 = I, then x, y, z.
inline Mat pauli(int i) {
  Mat m = Mat::Zero(2, 2);
  switch (i) {
    case 0: m(0, 0) = 1; m(1, 1) = 1; break;
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = -I_; m(1, 0) = I_; break;
    case 3: m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw InvalidInput("pauli index");
  }
  return m;
}

inline Mat sigma_dot(const Vec3& v) {
  return v[0] * pauli(1) + v[1] * pauli(2) + v[2] * pauli(3);
}

// Pauli vector of a 2x2 matrix M = a0 I + a.sigma (complex coefficients).
inline Eigen::Vector3cd pauli_components(const Mat& m) {
  Eigen::Vector3cd r;
  for (int i = 0; i < 3; ++i) r[i] = (pauli(i + 1) * m).trace() / 2.0;
  return r;
}

inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline double unitarity_residual(const Mat& m) {
  const Mat id = Mat::Identity(m.rows(), m.cols());
  return std::max(spectral_norm(m.adjoint() * m - id), spectral_norm(m * m.adjoint() - id));
}

inline Mat block2(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
  const auto n = a.rows();
  Mat m(2 * n, 2 * n);
  m << a, b, c, d;
  return m;
}

// sin(n w)/sin(w), continuous through w = 0 and w = pi.
inline double chebyshev_ratio(long n, double w) {
  const double s = std::sin(w);
  if (std::abs(s) > 1e-7) return std::sin(static_cast<double>(n) * w) / s;
  const double nd = static_cast<double>(n);
  const bool near_pi = std::cos(w) < 0.0;
  const double delta = near_pi ? pi - w : w;
  const double sign = (near_pi && n % 2 == 0) ? -1.0 : 1.0;
  return sign * nd * (1.0 - (nd * nd - 1.0) * delta * delta / 6.0);
}

inline Vec3 pad3(const WaveVector& k) {
  Vec3 v = Vec3::Zero();
  for (Eigen::Index i = 0; i < k.size() && i < 3; ++i) v[i] = k[i];
  return v;
}

}  // namespace qwalk
