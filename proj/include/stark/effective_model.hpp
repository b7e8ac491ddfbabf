#ifndef STARK_EFFECTIVE_MODEL_HPP
#define STARK_EFFECTIVE_MODEL_HPP

// Effective two-photon Hamiltonian of a Stark-shifted ladder atom, restricted
// to the conserved sector {|e,n>, |g,n+2>}.
//
// H = [D + (be+bg) a^+a] Sz + (be-bg)/2 a^+a + g (S+ a^2 + S- a^+2)
//
// Every quantity is in units of the caller's choice; the CLI works in units
// where the coupling g is 1, so times become Rabi angles gt.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stark {

/// Photon-number sector index. The sector n couples |e,n> with |g,n+2>.
using PhotonIndex = int;

struct ModelParams {
  double g = 1.0;      ///< n-independent two-photon coupling
  double delta = 0.0;  ///< two-photon detuning
  double beta_e = 0.0; ///< Stark shift of the upper level
  double beta_g = 0.0; ///< Stark shift of the lower level

  /// Equal Stark shifts on both levels (the usual single-beta model).
  static ModelParams symmetric(double g, double delta, double beta) {
    return ModelParams{g, delta, beta, beta};
  }

  void validate() const {
    if (!std::isfinite(g) || !std::isfinite(delta) || !std::isfinite(beta_e) ||
        !std::isfinite(beta_g))
      throw std::invalid_argument("ModelParams: all fields must be finite");
    if (g < 0.0)
      throw std::invalid_argument("ModelParams: coupling g must be >= 0");
  }

  /// Same physics with the sign of every diagonal term flipped.
  ModelParams sign_flipped() const { return ModelParams{g, -delta, -beta_e, -beta_g}; }
};

/// Real symmetric 2x2 block in the basis (|e,n>, |g,n+2>).
struct SectorMatrix {
  PhotonIndex n = 0;
  double ee = 0.0;  ///< <e,n|H|e,n>
  double gg = 0.0;  ///< <g,n+2|H|g,n+2>
  double off = 0.0; ///< <e,n|H|g,n+2>

  double operator()(int row, int col) const {
    if (row == 0 && col == 0) return ee;
    if (row == 1 && col == 1) return gg;
    return off;
  }

  /// Frobenius norm.
  double norm() const { return std::sqrt(ee * ee + gg * gg + 2.0 * off * off); }
};

struct EigenSystem {
  double lambda1 = 0.0; ///< upper branch
  double lambda2 = 0.0; ///< lower branch
  double c1 = 1.0;      ///< <e,n|lambda1>
  double c2 = 0.0;      ///< <g,n+2|lambda1>
};

/// Quadratures of one atom's passage amplitudes:
///   <e,n|U(t)|e,n>   = r1 - i s1
///   <g,n+2|U(t)|e,n> = r2 - i s2
struct PassageAmplitudes {
  double r1 = 1.0;
  double s1 = 0.0;
  double r2 = 0.0;
  double s2 = 0.0;

  double stay_probability() const { return r1 * r1 + s1 * s1; }
  double transfer_probability() const { return r2 * r2 + s2 * s2; }
};

inline SectorMatrix sector_matrix(const ModelParams& p, PhotonIndex n) {
  if (n < 0)
    throw std::invalid_argument("sector_matrix: photon index must be >= 0, got " +
                                std::to_string(n));
  p.validate();
  const double dn = n;
  const double bsum = p.beta_e + p.beta_g;
  const double bdiff = p.beta_e - p.beta_g;
  SectorMatrix m;
  m.n = n;
  // Sz = +1/2 on e with a^+a = n, -1/2 on g with a^+a = n+2.
  m.ee = 0.5 * p.delta + 0.5 * bsum * dn + 0.5 * bdiff * dn;
  m.gg = -0.5 * p.delta - 0.5 * bsum * (dn + 2.0) + 0.5 * bdiff * (dn + 2.0);
  m.off = p.g * std::sqrt((dn + 1.0) * (dn + 2.0));
  return m;
}

/// Closed-form eigen-system of a sector block. Reduces to
///   lambda = -beta +- sqrt((D/2 + beta (n+1))^2 + g^2 (n+1)(n+2))
/// for equal Stark shifts. The eigenvector is taken from whichever row of
/// (M - lambda1) avoids cancellation; both give the same unit vector.
inline EigenSystem eigensystem(const SectorMatrix& m) {
  const double mean = 0.5 * (m.ee + m.gg);
  const double half = 0.5 * (m.ee - m.gg);
  const double radius = std::hypot(half, m.off);

  EigenSystem es;
  es.lambda1 = mean + radius;
  es.lambda2 = mean - radius;
  if (radius == 0.0) {
    es.c1 = 1.0;
    es.c2 = 0.0;
    return es;
  }
  double u = 0.0, v = 0.0;
  if (half >= 0.0) {
    u = half + radius;  // lambda1 - gg
    v = m.off;
  } else {
    u = m.off;
    v = radius - half;  // lambda1 - ee
  }
  const double norm = std::hypot(u, v);
  es.c1 = u / norm;
  es.c2 = v / norm;
  return es;
}

inline EigenSystem eigensystem(const ModelParams& p, PhotonIndex n) {
  return eigensystem(sector_matrix(p, n));
}

inline PassageAmplitudes passage_amplitudes(const EigenSystem& es, double t) {
  const double c11 = es.c1 * es.c1;
  const double c22 = es.c2 * es.c2;
  const double c12 = es.c1 * es.c2;
  const double cos1 = std::cos(es.lambda1 * t), sin1 = std::sin(es.lambda1 * t);
  const double cos2 = std::cos(es.lambda2 * t), sin2 = std::sin(es.lambda2 * t);
  return PassageAmplitudes{c11 * cos1 + c22 * cos2, c11 * sin1 + c22 * sin2,
                           c12 * (cos1 - cos2), c12 * (sin1 - sin2)};
}

inline PassageAmplitudes passage_amplitudes(const ModelParams& p, PhotonIndex n, double t) {
  return passage_amplitudes(eigensystem(p, n), t);
}

} // namespace stark

#endif
