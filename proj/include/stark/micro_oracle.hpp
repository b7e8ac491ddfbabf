#ifndef STARK_MICRO_ORACLE_HPP
#define STARK_MICRO_ORACLE_HPP

// Full three-level ladder model (levels e > i > g, one cavity mode) solved
// exactly per excitation sector. Used to check the effective two-photon model
// against the microscopic dynamics it was derived from.
//
// Sector n spans (|e,n>, |i,n+1>, |g,n+2>):
//
//   | w_e + n w        g2 sqrt(n+1)        0               |
//   | g2 sqrt(n+1)     w_i + (n+1) w       g1 sqrt(n+2)    |
//   | 0                g1 sqrt(n+2)        w_g + (n+2) w   |

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "effective_model.hpp"
#include "entanglement.hpp"
#include "two_atom_state.hpp"

namespace stark::micro {

enum Level : int { kE = 0, kI = 1, kG = 2 };
inline constexpr int kLevels = 3;

struct MicroParams {
  double omega_e = 0.0;
  double omega_i = 0.0;
  double omega_g = 0.0;
  double omega = 0.0;  ///< cavity mode
  double g1 = 0.0;     ///< g <-> i coupling
  double g2 = 0.0;     ///< e <-> i coupling

  double detuning_upper() const { return omega_e - omega_i - omega; }
  double detuning_lower() const { return omega_i - omega_g - omega; }
  double two_photon_detuning() const { return omega_e - omega_g - 2.0 * omega; }

  void validate() const {
    for (double v : {omega_e, omega_i, omega_g, omega, g1, g2})
      if (!std::isfinite(v)) throw std::invalid_argument("MicroParams: non-finite field");
    if (!(omega_e > omega_i && omega_i > omega_g))
      throw std::invalid_argument("MicroParams: levels must satisfy omega_e > omega_i > omega_g");
  }

  /// Human-readable notes for couplings that are not small against their
  /// one-photon detuning (ratio below 10). Never fatal.
  std::vector<std::string> adiabaticity_warnings() const {
    std::vector<std::string> out;
    const double coupling = std::max(std::abs(g1), std::abs(g2));
    for (auto [name, d] : {std::pair{"upper", detuning_upper()}, std::pair{"lower", detuning_lower()}})
      if (coupling > 0.0 && std::abs(d) < 10.0 * coupling)
        out.push_back(std::string(name) + " one-photon detuning " + std::to_string(d) +
                      " is less than 10x the coupling " + std::to_string(coupling));
    return out;
  }

  /// Two-photon-resonant ladder (up to delta) whose lower one-photon
  /// detuning is `detuning` and whose upper one is delta - detuning.
  static MicroParams ladder(double omega, double omega_g, double g1, double g2,
                            double detuning, double delta = 0.0) {
    MicroParams p{omega_g + 2.0 * omega + delta, omega_g + omega + detuning, omega_g, omega, g1, g2};
    p.validate();
    return p;
  }
};

struct MicroBlock {
  PhotonIndex n = 0;
  Eigen::Matrix3d entries = Eigen::Matrix3d::Zero();
};

inline MicroBlock micro_block(const MicroParams& p, PhotonIndex n) {
  if (n < 0)
    throw std::invalid_argument("micro_block: photon index must be >= 0, got " + std::to_string(n));
  const double dn = n;
  MicroBlock b;
  b.n = n;
  b.entries(0, 0) = p.omega_e + dn * p.omega;
  b.entries(1, 1) = p.omega_i + (dn + 1.0) * p.omega;
  b.entries(2, 2) = p.omega_g + (dn + 2.0) * p.omega;
  b.entries(0, 1) = b.entries(1, 0) = p.g2 * std::sqrt(dn + 1.0);
  b.entries(1, 2) = b.entries(2, 1) = p.g1 * std::sqrt(dn + 2.0);
  return b;
}

/// Per-sector propagator exp(-i H t), diagonalized once and reused for any t.
/// The sector energy w_g + (n+2) w is removed before diagonalizing; it is a
/// multiple of the conserved excitation number, so dropping it only adds
/// phases that are global or act locally on the atom outside the cavity.
class SectorPropagator {
 public:
  SectorPropagator(const MicroParams& p, PhotonIndex n) : n_(n) {
    Eigen::Matrix3d h = micro_block(p, n).entries;
    shift_ = h(2, 2);
    h -= shift_ * Eigen::Matrix3d::Identity();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("SectorPropagator: diagonalization failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  PhotonIndex sector() const { return n_; }
  double shift() const { return shift_; }
  const Eigen::Vector3d& energies() const { return energies_; }
  const Eigen::Matrix3d& vectors() const { return vectors_; }

  Eigen::Matrix3cd propagator(double t) const {
    Eigen::Vector3cd phases;
    for (int k = 0; k < 3; ++k) phases(k) = std::polar(1.0, -energies_(k) * t);
    return vectors_.cast<std::complex<double>>() * phases.asDiagonal() *
           vectors_.transpose().cast<std::complex<double>>();
  }

  /// exp(-i H t)|e,n>, in sector basis order (e, i, g).
  Eigen::Vector3cd evolve_upper(double t) const { return propagator(t).col(0); }

 private:
  PhotonIndex n_;
  double shift_ = 0.0;
  Eigen::Vector3d energies_;
  Eigen::Matrix3d vectors_;
};

/// Two-atom state on {e,i,g} x {e,i,g}, index 3*a1 + a2.
using AtomPairMatrix = Eigen::Matrix<std::complex<double>, 9, 9>;

struct FullEvolution {
  AtomPairMatrix reduced = AtomPairMatrix::Zero();
  double leakage = 0.0;  ///< population outside {e,g} x {e,g}
  double trace = 1.0;
};

/// Initial cavity field for the full model: a Fock state or a thermal mixture.
struct FieldState {
  std::vector<double> weights;  ///< weight of Fock state n, n = 0..size-1

  static FieldState fock(PhotonIndex n0) {
    if (n0 < 0) throw std::invalid_argument("FieldState: n0 must be >= 0");
    FieldState f;
    f.weights.assign(static_cast<std::size_t>(n0) + 1, 0.0);
    f.weights.back() = 1.0;
    return f;
  }
  static FieldState thermal(const ThermalField& t) { return FieldState{t.weights}; }

  PhotonIndex max_index() const { return static_cast<PhotonIndex>(weights.size()) - 1; }
};

/// Caches sector propagators for one parameter set and field cutoff.
class FullModel {
 public:
  FullModel(const MicroParams& p, PhotonIndex field_cutoff) : params_(p), cutoff_(field_cutoff) {
    p.validate();
    if (field_cutoff < 2)
      throw std::invalid_argument("FullModel: field cutoff must be at least 2");
    for (PhotonIndex n = 0; n + 2 <= cutoff_; ++n) sectors_.emplace_back(p, n);
  }

  const MicroParams& params() const { return params_; }
  PhotonIndex field_cutoff() const { return cutoff_; }
  const SectorPropagator& sector(PhotonIndex n) const { return sectors_.at(static_cast<std::size_t>(n)); }

  /// Evolves |e1 e2>|n0> through both passages and traces the field out.
  /// Throws std::out_of_range if the second atom could push the field past
  /// the cutoff.
  FullEvolution evolve_fock(PhotonIndex n0, double t) const {
    if (n0 < 0) throw std::invalid_argument("evolve_fock: n0 must be >= 0");
    if (n0 + 4 > cutoff_)
      throw std::out_of_range("evolve_fock: field index " + std::to_string(n0 + 4) +
                              " exceeds cutoff " + std::to_string(cutoff_));
    const std::size_t nfield = static_cast<std::size_t>(cutoff_) + 1;
    // amplitude[a1][a2][m]
    std::vector<std::complex<double>> amp(kLevels * kLevels * nfield, 0.0);
    auto at = [&](int a1, int a2, PhotonIndex m) -> std::complex<double>& {
      return amp[(static_cast<std::size_t>(a1) * kLevels + a2) * nfield + m];
    };

    const Eigen::Vector3cd first = sector(n0).evolve_upper(t);
    for (int k = 0; k < kLevels; ++k) {
      // first atom at level k leaves the field at n0 + k; second enters in e
      const PhotonIndex m = n0 + k;
      const Eigen::Vector3cd second = sector(m).evolve_upper(t);
      for (int j = 0; j < kLevels; ++j) at(k, j, m + j) += first(k) * second(j);
    }

    FullEvolution out;
    for (int a = 0; a < kLevels * kLevels; ++a)
      for (int b = 0; b < kLevels * kLevels; ++b) {
        std::complex<double> s = 0.0;
        for (std::size_t m = 0; m < nfield; ++m)
          s += amp[a * nfield + m] * std::conj(amp[b * nfield + m]);
        out.reduced(a, b) = s;
      }
    finish(out);
    return out;
  }

  FullEvolution evolve(const FieldState& field, double t) const {
    FullEvolution out;
    for (PhotonIndex n = 0; n <= field.max_index(); ++n) {
      const double w = field.weights[static_cast<std::size_t>(n)];
      if (w == 0.0) continue;
      out.reduced += w * evolve_fock(n, t).reduced;
    }
    finish(out);
    return out;
  }

 private:
  static void finish(FullEvolution& out) {
    out.trace = out.reduced.trace().real();
    double kept = 0.0;
    for (int a1 : {kE, kG})
      for (int a2 : {kE, kG}) kept += out.reduced(3 * a1 + a2, 3 * a1 + a2).real();
    out.leakage = std::max(0.0, out.trace - kept);
  }

  MicroParams params_;
  PhotonIndex cutoff_;
  std::vector<SectorPropagator> sectors_;
};

inline FullEvolution evolve_two_atoms_full(const MicroParams& p, double t, const FieldState& field,
                                           PhotonIndex field_cutoff) {
  return FullModel(p, field_cutoff).evolve(field, t);
}

struct QubitProjection {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();  ///< order (ee, eg, ge, gg), renormalized
  double discarded = 0.0;
};

/// Keeps the {e,g} x {e,g} block and renormalizes it.
inline QubitProjection project_to_qubits(const AtomPairMatrix& reduced, double leakage_bound) {
  constexpr std::array<int, 4> keep{3 * kE + kE, 3 * kE + kG, 3 * kG + kE, 3 * kG + kG};
  QubitProjection out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out.rho(a, b) = reduced(keep[a], keep[b]);
  const double total = reduced.trace().real();
  const double kept = out.rho.trace().real();
  out.discarded = std::max(0.0, total - kept);
  if (out.discarded > leakage_bound)
    throw std::domain_error("project_to_qubits: leakage " + std::to_string(out.discarded) +
                            " exceeds bound " + std::to_string(leakage_bound));
  if (!(kept > 0.0)) throw std::domain_error("project_to_qubits: empty qubit subspace");
  out.rho /= kept;
  return out;
}

struct EffectiveParams {
  double g_eff = 0.0;   ///< signed two-photon coupling (n-independent prefactor)
  double beta_e = 0.0;
  double beta_g = 0.0;
  double delta = 0.0;   ///< w_e - w_g - 2w

  /// Effective-model parameters reproducing the adiabatic limit of the full
  /// model. The upper-level shift is beta_e (n+1) rather than beta_e n, so
  /// the constant beta_e is moved into the detuning; the sign of g_eff is a
  /// basis phase and is dropped.
  ModelParams model() const { return ModelParams{std::abs(g_eff), delta + beta_e, beta_e, beta_g}; }
};

inline EffectiveParams effective_params(const MicroParams& p) {
  const double du = p.detuning_upper();
  const double dl = p.detuning_lower();
  if (du == 0.0 || dl == 0.0)
    throw std::invalid_argument("effective_params: one-photon detunings must be nonzero");
  EffectiveParams e;
  e.beta_e = p.g2 * p.g2 / du;
  e.beta_g = p.g1 * p.g1 / dl;
  e.g_eff = 0.5 * p.g1 * p.g2 * (1.0 / du - 1.0 / dl);
  e.delta = p.two_photon_detuning();
  return e;
}

struct ComparisonOptions {
  PhotonIndex field_cutoff = 40;
  PhotonIndex n0 = 0;
  double nbar = 0.0;          ///< > 0 selects a thermal field instead of |n0>
  double tail_tol = 1e-10;
  double leakage_bound = 0.1;
};

struct ComparisonReport {
  std::vector<double> gt;
  std::vector<double> eof_effective;
  std::vector<double> eof_full;
  std::vector<double> leakage;
  double max_abs_diff = 0.0;
  double mean_abs_diff = 0.0;
  double peak_leakage = 0.0;
  double time_scale = 1.0;  ///< |g_eff|, or 1 when the effective coupling vanishes
  EffectiveParams effective;
};

/// Runs the effective and full pipelines on the same Rabi-angle grid
/// (gt measured in units of |g_eff|) and compares E_F.
inline ComparisonReport compare_effective_vs_full(const MicroParams& p, const std::vector<double>& gt_grid,
                                                  const ComparisonOptions& opt = {}) {
  ComparisonReport rep;
  rep.effective = effective_params(p);
  const ModelParams model = rep.effective.model();
  rep.time_scale = model.g > 0.0 ? model.g : 1.0;

  const bool thermal = opt.nbar > 0.0;
  const ThermalField tf = thermal ? thermal_weights(opt.nbar, opt.tail_tol) : ThermalField{};
  const FieldState field = thermal ? FieldState::thermal(tf) : FieldState::fock(opt.n0);
  const FullModel full(p, opt.field_cutoff);

  double sum = 0.0;
  for (double gt : gt_grid) {
    const double t = gt / rep.time_scale;
    const TwoAtomDensityMatrix rho_eff =
        thermal ? joint_density_thermal(model, t, tf) : joint_density_fock(model, t, opt.n0);
    const double e_eff = entanglement(rho_eff).eof;

    const FullEvolution fe = full.evolve(field, t);
    const QubitProjection q = project_to_qubits(fe.reduced, opt.leakage_bound);
    const double e_full = eof(std::min(1.0, concurrence_generic(q.rho).concurrence));

    const double diff = std::abs(e_eff - e_full);
    rep.gt.push_back(gt);
    rep.eof_effective.push_back(e_eff);
    rep.eof_full.push_back(e_full);
    rep.leakage.push_back(fe.leakage);
    rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
    rep.peak_leakage = std::max(rep.peak_leakage, fe.leakage);
    sum += diff;
  }
  if (!gt_grid.empty()) rep.mean_abs_diff = sum / static_cast<double>(gt_grid.size());
  return rep;
}

} // namespace stark::micro

#endif
