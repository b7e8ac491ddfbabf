#ifndef STARK_ENTANGLEMENT_HPP
#define STARK_ENTANGLEMENT_HPP

// Wootters concurrence and entanglement of formation for two qubits.
//
// Two routes are provided. The closed form exploits the X structure of
// TwoAtomDensityMatrix; the generic route works on any 4x4 density matrix and
// is what the closed form is checked against.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "two_atom_state.hpp"

namespace stark {

/// Four eigenvalues of rho * rho_tilde, descending.
using Spectrum = std::array<double, 4>;

struct EntanglementResult {
  double concurrence = 0.0;
  double eof = 0.0;
  Spectrum spectrum{};
};

/// Tolerances of the generic route.
struct WoottersTolerance {
  double hermiticity = 1e-10;
  double positivity = 1e-10;
  double trace = 1e-8;
  double clamp = 1e-10;  ///< imaginary parts and small negatives below this are dropped
};

// x log2 x with its continuous extension at 0
inline double xlog2x(double x) { return x <= 0.0 ? 0.0 : x * std::log2(x); }

inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -xlog2x(x) - xlog2x(1.0 - x);
}

inline double eof(double concurrence) {
  constexpr double slack = 1e-12;
  if (!(concurrence >= -slack && concurrence <= 1.0 + slack))
    throw std::invalid_argument("eof: concurrence outside [0, 1]");
  const double c = std::clamp(concurrence, 0.0, 1.0);
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

inline Spectrum xstate_spectrum(const TwoAtomDensityMatrix& rho) {
  const double outer = std::max(0.0, rho.alpha * rho.eta);
  const double inner = std::sqrt(std::max(0.0, rho.gamma * rho.delta));
  const double coh = std::abs(rho.epsilon);
  Spectrum s{outer, outer, (inner + coh) * (inner + coh), (inner - coh) * (inner - coh)};
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

/// C = 2 max(0, |eps| - sqrt(alpha eta)).
inline double concurrence(const TwoAtomDensityMatrix& rho) {
  const double c = 2.0 * (std::abs(rho.epsilon) - std::sqrt(std::max(0.0, rho.alpha * rho.eta)));
  return std::max(0.0, c);
}

inline EntanglementResult entanglement(const TwoAtomDensityMatrix& rho) {
  const double c = std::min(concurrence(rho), 1.0);
  return EntanglementResult{c, eof(c), xstate_spectrum(rho)};
}

/// sigma_y (x) sigma_y in the computational basis.
inline Eigen::Matrix4cd spin_flip() {
  Eigen::Matrix4cd y = Eigen::Matrix4cd::Zero();
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  return y;
}

inline Eigen::Matrix4cd spin_flipped(const Eigen::Matrix4cd& rho) {
  const Eigen::Matrix4cd y = spin_flip();
  return y * rho.conjugate() * y;
}

namespace detail {

inline void check_density(const Eigen::Matrix4cd& rho, bool allow_unnormalized,
                          const WoottersTolerance& tol) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol.hermiticity)
    throw std::invalid_argument("concurrence_generic: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.positivity)
    throw std::invalid_argument("concurrence_generic: matrix is not positive semidefinite");
  if (!allow_unnormalized && std::abs(rho.trace().real() - 1.0) > tol.trace)
    throw std::invalid_argument("concurrence_generic: trace differs from 1");
}

} // namespace detail

/// Eigenvalues of the non-Hermitian product rho * rho_tilde, descending.
/// Imaginary parts and negatives below the clamp tolerance are set to zero;
/// anything larger is reported as an error since the product is similar to a
/// positive semidefinite matrix.
inline Spectrum product_spectrum(const Eigen::Matrix4cd& rho, const WoottersTolerance& tol = {}) {
  const Eigen::Matrix4cd r = rho * spin_flipped(rho);
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> ces(r, false);
  if (ces.info() != Eigen::Success)
    throw std::runtime_error("product_spectrum: eigen-solver did not converge");
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  Spectrum s{};
  for (int i = 0; i < 4; ++i) {
    std::complex<double> v = ces.eigenvalues()(i);
    if (std::abs(v.imag()) > tol.clamp * scale || v.real() < -tol.clamp * scale)
      throw std::runtime_error("product_spectrum: eigenvalue off the non-negative axis");
    s[i] = std::max(0.0, v.real());
  }
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

struct GenericConcurrence {
  double concurrence = 0.0;
  Spectrum spectrum{};  ///< eigenvalues of rho * rho_tilde, descending
  double trace = 1.0;
};

/// Wootters' construction for an arbitrary two-qubit density matrix.
///
/// The square roots of the spectrum are taken as the singular values of
/// tau = X^T (sigma_y x sigma_y) X with rho = X X^+, which keeps them accurate
/// to machine precision even when rho is close to rank deficient. Squaring
/// the square roots gives the eigenvalues of rho * rho_tilde.
inline GenericConcurrence concurrence_generic(const Eigen::Matrix4cd& rho,
                                              bool allow_unnormalized = false,
                                              const WoottersTolerance& tol = {}) {
  detail::check_density(rho, allow_unnormalized, tol);
  const Eigen::Matrix4cd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(herm);
  Eigen::Matrix4cd factor = es.eigenvectors();
  for (int k = 0; k < 4; ++k)
    factor.col(k) *= std::sqrt(std::max(0.0, es.eigenvalues()(k)));
  const Eigen::Matrix4cd tau = factor.transpose() * spin_flip() * factor;
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(tau);
  const Eigen::Vector4d sv = svd.singularValues();  // descending

  GenericConcurrence out;
  out.concurrence = std::max(0.0, sv(0) - sv(1) - sv(2) - sv(3));
  for (int i = 0; i < 4; ++i) out.spectrum[i] = sv(i) * sv(i);
  out.trace = rho.trace().real();
  return out;
}

} // namespace stark

#endif
