#ifndef RINGCHAIN_PERTURBATION_HPP
#define RINGCHAIN_PERTURBATION_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "ringchain/chain_blocks.hpp"
#include "ringchain/core.hpp"
#include "ringchain/hamiltonian.hpp"
#include "ringchain/ring_spectrum.hpp"

namespace ringchain {

/// Degenerate-doublet label (rho, k, sigma, nu): chain mode rho, ring doublet
/// +-k within manifold sigma, and the adapted combination index nu in {1,2}.
struct PerturbedLabel {
  int rho;
  int k;
  int sigma;
  int nu;
};

inline int doublet_k_max(int n_dimers) {
  return (n_dimers % 2 == 0) ? n_dimers / 2 - 1 : (n_dimers - 1) / 2;
}

inline void validate_label(const AggregateSpec& spec, const PerturbedLabel& l) {
  if (l.rho < 1 || l.rho > spec.n_rings)
    throw validation_error("PerturbedLabel: rho out of range");
  if (l.k < 1 || l.k > doublet_k_max(spec.ring.n_dimers))
    throw validation_error("PerturbedLabel: k out of doublet range");
  if (l.sigma != 1 && l.sigma != 2)
    throw validation_error("PerturbedLabel: sigma must be 1 or 2");
  if (l.nu != 1 && l.nu != 2)
    throw validation_error("PerturbedLabel: nu must be 1 or 2");
}

inline double xi_rho(const AggregateSpec& spec, int rho) {
  return spec.xi() * chain_mode(spec.n_rings, rho).xi_factor;
}

/// Single-ring bond matrix Vhat between site (0,1) and the acceptor site.
inline Matrix bond_matrix(const RingGeometry& geom) {
  const int dim = geom.n_sites();
  const AggregateSpec single{geom, 1, 0.0};
  Matrix v = Matrix::Zero(dim, dim);
  const int a = flatten(SiteIndex{1, 0, 1}, single);
  const int b = flatten(acceptor_site(geom, 1), single);
  v(a, b) = 1.0;
  v(b, a) = 1.0;
  return v;
}

/// First-order correction to the rescaled (J2-unit) doublet eigenvalues.
inline double first_order_correction(const AggregateSpec& spec, const PerturbedLabel& l) {
  validate_label(spec, l);
  const int nd = spec.ring.n_dimers;
  const double xr = xi_rho(spec, l.rho);
  const double k_sign = (l.k % 2 == 0) ? 1.0 : -1.0;
  if (nd % 2 == 0) return k_sign * (2.0 / nd) * (l.nu == 2 ? 1.0 : 0.0) * xr;
  const double sk_sign = ((l.sigma + l.k) % 2 == 0) ? 1.0 : -1.0;
  const double nu_sign = (l.nu % 2 == 0) ? 1.0 : -1.0;
  const double c = std::cos(std::numbers::pi * l.k / nd + eta(spec.ring, l.k));
  return (sk_sign / nd) * (c + nu_sign) * xr;
}

/// Adapted ring-space combination of the +-k doublet (dimension 2*N_D).
inline Vector adapted_ring_state(const RingGeometry& geom, int k, int sigma, int nu) {
  const Vector plus = ring_eigenstate(geom, {k, sigma}).amplitudes;
  const Vector minus = ring_eigenstate(geom, {-k, sigma}).amplitudes;
  const double nu_sign = (nu % 2 == 0) ? 1.0 : -1.0;
  Complex phase;
  if (geom.n_dimers % 2 == 0) {
    phase = std::exp(Complex(0.0, -2.0 * eta(geom, k)));
  } else {
    phase = std::exp(Complex(0.0, std::numbers::pi * k / geom.n_dimers - eta(geom, k)));
  }
  Vector v = (nu_sign * phase * plus + minus) / std::sqrt(2.0);
  return v;
}

/// Zeroth-order adapted eigenstate chain_mode(rho) (x) adapted doublet combo,
/// in the full aggregate dimension.
inline QuantumState adapted_eigenstate(const AggregateSpec& spec, const PerturbedLabel& l) {
  validate_label(spec, l);
  const ChainMode mode = chain_mode(spec.n_rings, l.rho);
  const Vector ring = adapted_ring_state(spec.ring, l.k, l.sigma, l.nu);
  const int block = spec.ring.n_sites();
  Vector v(spec.dim());
  for (int r = 0; r < spec.n_rings; ++r)
    v.segment(r * block, block) = mode.amplitudes[r] * ring;
  return QuantumState(std::move(v));
}

/// One row of the approximate spectrum. nu == 0 marks the non-degenerate
/// k = 0 and (even N_D) k = N_D/2 levels, shifted by their 1x1 projections.
struct SpectrumEntry {
  int rho;
  int k;
  int sigma;
  int nu;
  double energy_cm1;
};

inline std::vector<SpectrumEntry> perturbative_spectrum(const AggregateSpec& spec) {
  const RingGeometry& geom = spec.ring;
  const double j2 = geom.j_inter;
  const Matrix v = bond_matrix(geom);
  std::vector<SpectrumEntry> out;
  std::vector<int> singlet_ks = {0};
  if (geom.n_dimers % 2 == 0) singlet_ks.push_back(geom.n_dimers / 2);
  for (int rho = 1; rho <= spec.n_rings; ++rho) {
    const double xr = xi_rho(spec, rho);
    for (int sigma : {1, 2}) {
      for (int k = 1; k <= doublet_k_max(geom.n_dimers); ++k) {
        const double e0 = ring_eigenvalue(geom, {k, sigma}) / j2;
        for (int nu : {1, 2}) {
          const double corr = first_order_correction(spec, {rho, k, sigma, nu});
          out.push_back({rho, k, sigma, nu, (e0 + corr) * j2});
        }
      }
      for (int k : singlet_ks) {
        const Vector state = ring_eigenstate(geom, {k, sigma}).amplitudes;
        const double diag = (state.adjoint() * v * state)(0).real();
        const double e0 = ring_eigenvalue(geom, {k, sigma}) / j2;
        out.push_back({rho, k, sigma, 0, (e0 + diag * xr) * j2});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    return a.energy_cm1 < b.energy_cm1;
  });
  return out;
}

/// Two-manifold second-order mixing data for the doublet pair (k1, k2).
struct MixedPair {
  int k1;
  int k2;
  int sigma;
  int rho;
  double delta;          // (eps_{k1,sigma} - eps_{k2,sigma}) / J2, signed
  double theta_rho;      // mixing angle
  double energy_plus;    // J2 units, relative to the pair midpoint
  double energy_minus;
  Vector state_plus;     // ring-space kappa states (dimension 2*N_D)
  Vector state_minus;
};

inline MixedPair mixed_pair(const AggregateSpec& spec, int k1, int k2, int sigma, int rho) {
  const RingGeometry& geom = spec.ring;
  if (k1 == k2) throw validation_error("mixed_pair: k1 and k2 must differ");
  for (int k : {k1, k2})
    if (k < 1 || k > doublet_k_max(geom.n_dimers))
      throw validation_error("mixed_pair: k out of doublet range");

  // Selection check: only the nu=2 adapted states of same-parity doublets
  // couple through Vhat.
  const Matrix v = bond_matrix(geom);
  const Vector s1 = adapted_ring_state(geom, k1, sigma, 2);
  const Vector s2 = adapted_ring_state(geom, k2, sigma, 2);
  const Complex coupling = (s1.adjoint() * v * s2)(0);
  if (std::abs(coupling) < 1e-12)
    throw selection_rule_error(
        "mixed_pair: vanishing matrix element <k1=" + std::to_string(k1) +
        ",sigma,nu=2|Vhat|k2=" + std::to_string(k2) + ",sigma,nu=2>");

  const double alpha = 2.0 / geom.n_dimers;
  const double xr = xi_rho(spec, rho);
  const double j2 = geom.j_inter;
  const double delta =
      (ring_eigenvalue(geom, {k1, sigma}) - ring_eigenvalue(geom, {k2, sigma})) / j2;

  MixedPair pair;
  pair.k1 = k1;
  pair.k2 = k2;
  pair.sigma = sigma;
  pair.rho = rho;
  pair.delta = delta;
  // Principal branch: theta -> 0 as xi -> 0 for either sign of delta.
  pair.theta_rho = delta == 0.0 ? std::numbers::pi / 4.0
                                : 0.5 * std::atan(2.0 * alpha * xr / delta);
  // Shared diagonal correction carries the doublet parity sign (-1)^k.
  const double mean = ((k1 % 2 == 0) ? 1.0 : -1.0) * alpha * xr;
  const double split = 0.5 * std::sqrt(delta * delta + 4.0 * alpha * alpha * xr * xr);
  pair.energy_plus = mean + split;
  pair.energy_minus = mean - split;

  const Complex rel_phase =
      std::exp(Complex(0.0, eta(geom, k1) - eta(geom, k2)));
  const double ct = std::cos(pair.theta_rho);
  const double st = std::sin(pair.theta_rho);
  pair.state_plus = rel_phase * ct * s1 + st * s2;
  pair.state_minus = -rel_phase * st * s1 + ct * s2;
  return pair;
}

struct SpectrumComparisonRow {
  SpectrumEntry label;
  double e_perturbative_cm1;
  double e_exact_cm1;
  double rel_error;
};

/// Pairs sorted perturbative energies with the sorted exact block spectrum
/// within each rho, sidestepping eigenvector assignment near degeneracies.
inline std::vector<SpectrumComparisonRow> perturbative_vs_exact(const AggregateSpec& spec) {
  std::vector<SpectrumEntry> pert = perturbative_spectrum(spec);
  std::vector<SpectrumComparisonRow> rows;
  for (int rho = 1; rho <= spec.n_rings; ++rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(build_block(spec, rho).entries(),
                                             Eigen::EigenvaluesOnly);
    std::vector<SpectrumEntry> block;
    for (const SpectrumEntry& e : pert)
      if (e.rho == rho) block.push_back(e);
    std::sort(block.begin(), block.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
      return a.energy_cm1 < b.energy_cm1;
    });
    for (size_t i = 0; i < block.size(); ++i) {
      const double exact = es.eigenvalues()(static_cast<Eigen::Index>(i));
      const double err = std::abs(block[i].energy_cm1 - exact) /
                         std::max(std::abs(exact), 1e-12);
      rows.push_back({block[i], block[i].energy_cm1, exact, err});
    }
  }
  return rows;
}

inline void write_spectrum_comparison_csv(const std::vector<SpectrumComparisonRow>& rows,
                                          std::ostream& os) {
  os << "rho,k,sigma,nu,e_perturbative_cm1,e_exact_cm1,rel_error\n";
  for (const SpectrumComparisonRow& r : rows)
    os << r.label.rho << ',' << r.label.k << ',' << r.label.sigma << ',' << r.label.nu
       << ',' << r.e_perturbative_cm1 << ',' << r.e_exact_cm1 << ',' << r.rel_error << '\n';
}

}  // namespace ringchain

#endif
