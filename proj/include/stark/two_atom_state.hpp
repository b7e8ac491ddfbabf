#ifndef STARK_TWO_ATOM_STATE_HPP
#define STARK_TWO_ATOM_STATE_HPP

// Two atoms, both prepared in |e>, cross the cavity one after the other with
// equal flight times. Tracing out the field leaves an X-shaped two-atom state
// in the basis (|e1e2>, |e1g2>, |g1e2>, |g1g2>):
//
//   | alpha  0      0      0   |
//   | 0      gamma  eps    0   |
//   | 0      eps*   delta  0   |
//   | 0      0      0      eta |

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "effective_model.hpp"

namespace stark {

struct TwoAtomDensityMatrix {
  double alpha = 1.0;  ///< |e1 e2>
  double gamma = 0.0;  ///< |e1 g2>
  double delta = 0.0;  ///< |g1 e2>
  double eta = 0.0;    ///< |g1 g2>
  std::complex<double> epsilon{0.0, 0.0}; ///< <e1 g2|rho|g1 e2>

  double trace() const { return alpha + gamma + delta + eta; }

  TwoAtomDensityMatrix renormalized() const {
    const double tr = trace();
    if (!(tr > 0.0)) throw std::domain_error("TwoAtomDensityMatrix: non-positive trace");
    return TwoAtomDensityMatrix{alpha / tr, gamma / tr, delta / tr, eta / tr, epsilon / tr};
  }

  Eigen::Matrix4cd to_matrix() const {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = alpha;
    m(1, 1) = gamma;
    m(2, 2) = delta;
    m(3, 3) = eta;
    m(1, 2) = epsilon;
    m(2, 1) = std::conj(epsilon);
    return m;
  }
};

struct ThermalField {
  double nbar = 0.0;
  PhotonIndex cutoff = 0;
  std::vector<double> weights;  ///< P_n for n = 0..cutoff, not renormalized
  double tail_deficit = 0.0;    ///< 1 - sum(weights), evaluated as a geometric tail

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Bose-Einstein mean occupation for x = hbar omega / kT.
inline double nbar_from_ratio(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::invalid_argument("nbar_from_ratio: hbar*omega/kT must be finite and > 0");
  return 1.0 / std::expm1(x);
}

/// Hard limit on the thermal Fock expansion; beyond this nbar is unreasonably hot.
inline constexpr PhotonIndex kMaxThermalCutoff = 1'000'000;

/// P_n = nbar^n / (1+nbar)^(n+1), truncated at the smallest N whose tail
/// mass (nbar/(1+nbar))^(N+1) is at most tail_tol.
inline ThermalField thermal_weights(double nbar, double tail_tol) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar))
    throw std::invalid_argument("thermal_weights: nbar must be finite and >= 0");
  if (!(tail_tol > 0.0 && tail_tol < 1.0))
    throw std::invalid_argument("thermal_weights: tail_tol must lie in (0, 1)");

  ThermalField f;
  f.nbar = nbar;
  const double ratio = nbar / (1.0 + nbar);
  double weight = 1.0 / (1.0 + nbar);
  double tail = ratio;  // mass beyond the current index
  f.weights.push_back(weight);
  while (tail > tail_tol) {
    if (static_cast<PhotonIndex>(f.weights.size()) > kMaxThermalCutoff)
      throw std::length_error("thermal_weights: cutoff exceeds " +
                              std::to_string(kMaxThermalCutoff));
    weight *= ratio;
    tail *= ratio;
    f.weights.push_back(weight);
  }
  f.cutoff = static_cast<PhotonIndex>(f.weights.size()) - 1;
  f.tail_deficit = tail;
  return f;
}

namespace detail {

inline void accumulate_fock(const PassageAmplitudes& first, const PassageAmplitudes& second,
                            double weight, TwoAtomDensityMatrix& acc) {
  const double stay = first.stay_probability();
  const double moved = first.transfer_probability();
  const std::complex<double> a(first.r1, -first.s1);
  const std::complex<double> b_conj(second.r1, second.s1);
  acc.alpha += weight * stay * stay;
  acc.gamma += weight * stay * moved;
  acc.delta += weight * moved * second.stay_probability();
  acc.eta += weight * moved * second.transfer_probability();
  acc.epsilon += weight * moved * a * b_conj;
}

} // namespace detail

inline TwoAtomDensityMatrix joint_density_fock(const ModelParams& p, double t, PhotonIndex n0) {
  if (n0 < 0)
    throw std::invalid_argument("joint_density_fock: n0 must be >= 0, got " +
                                std::to_string(n0));
  TwoAtomDensityMatrix rho{0.0, 0.0, 0.0, 0.0, {0.0, 0.0}};
  detail::accumulate_fock(passage_amplitudes(p, n0, t), passage_amplitudes(p, n0 + 2, t), 1.0,
                          rho);
  return rho;
}

/// P_n-weighted mixture of Fock results over n = 0..cutoff, summed in
/// ascending n. The trace deficit is kept unless renormalize is set.
inline TwoAtomDensityMatrix joint_density_thermal(const ModelParams& p, double t,
                                                  const ThermalField& field,
                                                  bool renormalize = false) {
  if (field.weights.empty() || static_cast<PhotonIndex>(field.weights.size()) != field.cutoff + 1)
    throw std::invalid_argument("joint_density_thermal: malformed ThermalField");

  std::vector<PassageAmplitudes> amps;
  amps.reserve(field.weights.size() + 2);
  for (PhotonIndex n = 0; n <= field.cutoff + 2; ++n) amps.push_back(passage_amplitudes(p, n, t));

  TwoAtomDensityMatrix rho{0.0, 0.0, 0.0, 0.0, {0.0, 0.0}};
  for (PhotonIndex n = 0; n <= field.cutoff; ++n)
    detail::accumulate_fock(amps[n], amps[n + 2], field.weights[n], rho);
  return renormalize ? rho.renormalized() : rho;
}

} // namespace stark

#endif
