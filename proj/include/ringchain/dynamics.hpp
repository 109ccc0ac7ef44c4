#ifndef RINGCHAIN_DYNAMICS_HPP
#define RINGCHAIN_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "ringchain/chain_blocks.hpp"
#include "ringchain/core.hpp"
#include "ringchain/hamiltonian.hpp"
#include "ringchain/perturbation.hpp"

namespace ringchain {

/// Ring populations over a time grid. Times are dimensionless (tau = J2 t /
/// hbar); t_ps carries the physical conversion.
struct Trajectory {
  std::vector<double> taus;
  std::vector<double> t_ps;
  // populations[i][r-1] = P_r at taus[i]
  std::vector<std::vector<double>> populations;
};

inline std::vector<double> ring_populations(const AggregateSpec& spec, const Vector& psi) {
  const int block = spec.ring.n_sites();
  std::vector<double> pops(spec.n_rings);
  for (int r = 0; r < spec.n_rings; ++r)
    pops[r] = psi.segment(r * block, block).squaredNorm();
  return pops;
}

/// Exact unitary evolution by spectral decomposition of H / J2.
inline Trajectory evolve_unitary(const AggregateSpec& spec, const QuantumState& initial,
                                 const std::vector<double>& taus) {
  if (initial.dim() != spec.dim())
    throw validation_error("evolve_unitary: initial state dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(build_aggregate_hamiltonian(spec).entries() /
                                           spec.ring.j_inter);
  const Matrix& u = es.eigenvectors();
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const Vector coeffs = u.adjoint() * initial.amplitudes;

  Trajectory traj;
  traj.taus = taus;
  for (double tau : taus) {
    Vector phased(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
      phased(i) = coeffs(i) * std::exp(Complex(0.0, -lambda(i) * tau));
    const Vector psi = u * phased;
    traj.t_ps.push_back(tau * kHbarCmPs / spec.ring.j_inter);
    traj.populations.push_back(ring_populations(spec, psi));
  }
  return traj;
}

/// Populations from the first-order adapted spectrum: each adapted manifold
/// dephases independently with its corrected block energies.
inline Trajectory perturbative_populations(const AggregateSpec& spec,
                                           const QuantumState& initial,
                                           const std::vector<double>& taus) {
  if (initial.dim() != spec.dim())
    throw validation_error("perturbative_populations: initial state dimension mismatch");
  const RingGeometry& geom = spec.ring;
  const int block = geom.n_sites();
  const double j2 = geom.j_inter;

  struct Manifold {
    Vector ring_state;              // adapted ring-space state
    std::vector<double> energies;   // J2 units, index rho-1
  };
  std::vector<Manifold> manifolds;
  const Matrix v = bond_matrix(geom);
  std::vector<int> singlet_ks = {0};
  if (geom.n_dimers % 2 == 0) singlet_ks.push_back(geom.n_dimers / 2);
  for (int sigma : {1, 2}) {
    for (int k = 1; k <= doublet_k_max(geom.n_dimers); ++k) {
      for (int nu : {1, 2}) {
        Manifold m;
        m.ring_state = adapted_ring_state(geom, k, sigma, nu);
        const double e0 = ring_eigenvalue(geom, {k, sigma}) / j2;
        for (int rho = 1; rho <= spec.n_rings; ++rho)
          m.energies.push_back(e0 + first_order_correction(spec, {rho, k, sigma, nu}));
        manifolds.push_back(std::move(m));
      }
    }
    for (int k : singlet_ks) {
      Manifold m;
      m.ring_state = ring_eigenstate(geom, {k, sigma}).amplitudes;
      const double diag = (m.ring_state.adjoint() * v * m.ring_state)(0).real();
      const double e0 = ring_eigenvalue(geom, {k, sigma}) / j2;
      for (int rho = 1; rho <= spec.n_rings; ++rho)
        m.energies.push_back(e0 + diag * xi_rho(spec, rho));
      manifolds.push_back(std::move(m));
    }
  }

  // Project the initial state once: c[m][rho] = <rho, m | psi0>.
  std::vector<ChainMode> modes;
  for (int rho = 1; rho <= spec.n_rings; ++rho) modes.push_back(chain_mode(spec.n_rings, rho));
  std::vector<std::vector<Complex>> coeffs(manifolds.size());
  for (size_t mi = 0; mi < manifolds.size(); ++mi) {
    for (int rho = 1; rho <= spec.n_rings; ++rho) {
      Complex c = 0.0;
      for (int r = 0; r < spec.n_rings; ++r)
        c += modes[rho - 1].amplitudes[r] *
             (manifolds[mi].ring_state.adjoint() *
              initial.amplitudes.segment(r * block, block))(0);
      coeffs[mi].push_back(c);
    }
  }

  Trajectory traj;
  traj.taus = taus;
  for (double tau : taus) {
    std::vector<double> pops(spec.n_rings, 0.0);
    for (size_t mi = 0; mi < manifolds.size(); ++mi) {
      for (int r = 0; r < spec.n_rings; ++r) {
        Complex amp = 0.0;
        for (int rho = 1; rho <= spec.n_rings; ++rho)
          amp += modes[rho - 1].amplitudes[r] *
                 std::exp(Complex(0.0, -manifolds[mi].energies[rho - 1] * tau)) *
                 coeffs[mi][rho - 1];
        pops[r] += std::norm(amp);
      }
    }
    traj.t_ps.push_back(tau * kHbarCmPs / j2);
    traj.populations.push_back(std::move(pops));
  }
  return traj;
}

/// Interference profile f(x) = |sum_rho (-1)^rho w_rho exp(i x cos(2 pi rho /
/// M))|^2 with M = 2 N_R + 2, plus analytic first and second derivatives.
/// Default weights w_rho = (2/(N_R+1)) sin^2(pi rho/(N_R+1)) normalize the
/// peak near 1; `halved_weights` keeps the 1/(N_R+1) prefactor instead.
/// f(0) = 0 for every N_R: the alternating-sign weights cancel pairwise.
struct ProfileValue {
  double f;
  double df;
  double d2f;
};

inline ProfileValue f_profile(int n_rings, double x, bool halved_weights = false) {
  if (n_rings < 1) throw validation_error("f_profile: n_rings must be >= 1");
  const double norm = (halved_weights ? 1.0 : 2.0) / (n_rings + 1);
  Complex s = 0.0, s1 = 0.0, s2 = 0.0;
  for (int rho = 1; rho <= n_rings; ++rho) {
    const double ang = std::numbers::pi * rho / (n_rings + 1);
    const double w = ((rho % 2 == 0) ? 1.0 : -1.0) * norm * std::sin(ang) * std::sin(ang);
    const double c = std::cos(ang);  // cos(2 pi rho / M)
    const Complex term = w * std::exp(Complex(0.0, x * c));
    s += term;
    s1 += Complex(0.0, c) * term;
    s2 += -c * c * term;
  }
  ProfileValue out;
  out.f = std::norm(s);
  out.df = 2.0 * (s1 * std::conj(s)).real();
  out.d2f = 2.0 * (s2 * std::conj(s)).real() + 2.0 * std::norm(s1);
  return out;
}

/// Location of the first prominent maximum of f on x > 0 (the first-arrival
/// peak; f keeps oscillating afterwards and can exceed it again later).
/// Dense scan plus Newton polish on df.
inline double f_profile_peak(int n_rings, bool halved_weights = false) {
  const double x_hi = 2.0 * std::numbers::pi * (n_rings + 1);
  const int n = 8192;
  double f_max = 0.0;
  std::vector<double> f(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    f[i] = f_profile(n_rings, x_hi * i / n, halved_weights).f;
    f_max = std::max(f_max, f[i]);
  }
  double best_x = x_hi;
  for (int i = 1; i < n; ++i) {
    if (f[i] >= f[i - 1] && f[i] > f[i + 1] && f[i] > 0.5 * f_max) {
      best_x = x_hi * i / n;
      break;
    }
  }
  double x = best_x;
  for (int it = 0; it < 60; ++it) {
    const ProfileValue p = f_profile(n_rings, x, halved_weights);
    if (std::abs(p.d2f) < 1e-15) break;
    const double step = p.df / p.d2f;
    x -= step;
    if (std::abs(step) < 1e-13) break;
  }
  return x;
}

/// Initial-condition families with closed-form end-ring populations.
enum class InitialCondition { localized_axis, delocalized_k1, localized_off_axis };

/// First-order closed form for the end-ring population: f(alpha xi tau) with
/// alpha = 2 / N_D for the on-axis localized start; the delocalized |k=1>
/// and off-axis localized starts each transfer half of that.
inline double p_last_first_order(const AggregateSpec& spec, double tau,
                                 InitialCondition init = InitialCondition::localized_axis,
                                 bool halved_weights = false) {
  const double alpha = 2.0 / spec.ring.n_dimers;
  const double f = f_profile(spec.n_rings, alpha * spec.xi() * tau, halved_weights).f;
  return init == InitialCondition::localized_axis ? f : 0.5 * f;
}

/// Second-order form adding the mixing correction (alpha^2 xi^2 / 2 delta^2)
/// f''(alpha xi tau); delta comes from the admixed doublet pair.
/// `literal_prefactor` multiplies the whole expression by alpha.
inline double p_last_second_order(const AggregateSpec& spec, const MixedPair& pair,
                                  double tau, bool halved_weights = false,
                                  bool literal_prefactor = false) {
  if (pair.delta == 0.0)
    throw validation_error("p_last_second_order: degenerate pair (delta = 0); "
                           "use the first-order form");
  const double alpha = 2.0 / spec.ring.n_dimers;
  const double xi = spec.xi();
  const ProfileValue p = f_profile(spec.n_rings, alpha * xi * tau, halved_weights);
  const double val =
      p.f + (alpha * alpha * xi * xi / (2.0 * pair.delta * pair.delta)) * p.d2f;
  return literal_prefactor ? alpha * val : val;
}

/// First-arrival statistics for one population trace.
struct TransferMetrics {
  bool found = false;
  int ring = 0;
  double peak_time = 0.0;
  double peak_value = 0.0;
};

/// First local maximum whose prominence (smaller of the drops to the
/// adjacent lower envelope before a higher sample appears) exceeds the
/// threshold; the location is refined by a quadratic fit through the
/// bracketing samples.
inline TransferMetrics transfer_metrics(const std::vector<double>& taus,
                                        const std::vector<double>& values,
                                        double min_prominence = 0.01) {
  if (taus.size() != values.size())
    throw validation_error("transfer_metrics: grid/value length mismatch");
  const int n = static_cast<int>(values.size());
  TransferMetrics out;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(values[i] >= values[i - 1] && values[i] > values[i + 1])) continue;
    double left_min = values[i];
    for (int j = i - 1; j >= 0 && values[j] < values[i]; --j)
      left_min = std::min(left_min, values[j]);
    double right_min = values[i];
    for (int j = i + 1; j < n && values[j] < values[i]; ++j)
      right_min = std::min(right_min, values[j]);
    const double prominence = values[i] - std::max(left_min, right_min);
    if (prominence <= min_prominence) continue;
    const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    double shift = 0.0;
    if (std::abs(denom) > 1e-300) shift = 0.5 * (y0 - y2) / denom;
    shift = std::clamp(shift, -0.5, 0.5);
    const double h = 0.5 * (taus[i + 1] - taus[i - 1]);
    out.found = true;
    out.peak_time = taus[i] + shift * h;
    out.peak_value = y1 - 0.25 * (y0 - y2) * shift;
    return out;
  }
  return out;
}

inline TransferMetrics transfer_metrics(const Trajectory& traj, int ring,
                                        double min_prominence = 0.01) {
  const int n_rings = traj.populations.empty()
                          ? 0
                          : static_cast<int>(traj.populations.front().size());
  if (ring < 1 || ring > n_rings)
    throw validation_error("transfer_metrics: ring out of range");
  std::vector<double> trace(traj.taus.size());
  for (size_t i = 0; i < trace.size(); ++i) trace[i] = traj.populations[i][ring - 1];
  TransferMetrics m = transfer_metrics(traj.taus, trace, min_prominence);
  m.ring = ring;
  return m;
}

/// Uniform grid over [0, span * tau_est], tau_est being the first-order
/// arrival time x* / (alpha xi).
inline std::vector<double> default_time_grid(const AggregateSpec& spec, int n_samples = 2000,
                                             double span = 3.0) {
  if (spec.xi() == 0.0)
    throw validation_error("default_time_grid: xi must be nonzero");
  if (n_samples < 2) throw validation_error("default_time_grid: need at least 2 samples");
  const double alpha = 2.0 / spec.ring.n_dimers;
  const double tau_max = span * f_profile_peak(spec.n_rings) / (alpha * std::abs(spec.xi()));
  std::vector<double> taus(n_samples);
  for (int i = 0; i < n_samples; ++i) taus[i] = tau_max * i / (n_samples - 1);
  return taus;
}

/// The t_ps column appears only when physical time is requested.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os,
                                 bool with_ps = false) {
  const int n_rings = traj.populations.empty()
                          ? 0
                          : static_cast<int>(traj.populations.front().size());
  os << "tau";
  if (with_ps) os << ",t_ps";
  for (int r = 1; r <= n_rings; ++r) os << ",P_" << r;
  os << '\n';
  for (size_t i = 0; i < traj.taus.size(); ++i) {
    os << traj.taus[i];
    if (with_ps) os << ',' << traj.t_ps[i];
    for (double p : traj.populations[i]) os << ',' << p;
    os << '\n';
  }
}

}  // namespace ringchain

#endif
