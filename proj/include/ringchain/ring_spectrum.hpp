#ifndef RINGCHAIN_RING_SPECTRUM_HPP
#define RINGCHAIN_RING_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "ringchain/core.hpp"

namespace ringchain {

/// Quasi-momentum k and manifold index sigma (1 = low, 2 = high) of a ring
/// eigenstate. k runs over {-floor((N_D-1)/2), ..., floor(N_D/2)} so that the
/// +-k degenerate pairing is explicit.
struct RingQuantumNumbers {
  int k;
  int sigma;
};

inline std::vector<int> k_window(int n_dimers) {
  std::vector<int> ks;
  for (int k = -(n_dimers - 1) / 2; k <= n_dimers / 2; ++k) ks.push_back(k);
  return ks;
}

inline void validate_quantum_numbers(const RingGeometry& geom, const RingQuantumNumbers& q) {
  if (q.sigma != 1 && q.sigma != 2)
    throw validation_error("RingQuantumNumbers: sigma must be 1 or 2");
  if (q.k < -(geom.n_dimers - 1) / 2 || q.k > geom.n_dimers / 2)
    throw validation_error("RingQuantumNumbers: k out of window");
}

inline double ring_eigenvalue(const RingGeometry& geom, const RingQuantumNumbers& q) {
  validate_quantum_numbers(geom, q);
  const double c = std::cos(2.0 * std::numbers::pi * q.k / geom.n_dimers);
  const double gap = std::sqrt(geom.j_intra * geom.j_intra + geom.j_inter * geom.j_inter +
                               2.0 * geom.j_intra * geom.j_inter * c);
  return geom.site_energy + (q.sigma == 2 ? gap : -gap);
}

/// Dimerization phase eta_k(beta) = -atan[sin(2pi k/N_D) / (beta + cos(2pi k/N_D))].
inline double eta(const RingGeometry& geom, int k) {
  const double arg = 2.0 * std::numbers::pi * k / geom.n_dimers;
  const double den = geom.beta() + std::cos(arg);
  if (std::abs(den) < 1e-14 && std::abs(std::sin(arg)) < 1e-14)
    throw validation_error("eta: singular phase, beta + cos(2pi k/N_D) = 0");
  if (den <= 0.0 && geom.beta() <= 1.0 && std::abs(den) < 1e-14)
    throw validation_error("eta: singular phase at beta <= 1");
  return -std::atan2(std::sin(arg), den);
}

/// Ring eigenstate |k,sigma> = (1/sqrt2)[(-1)^sigma e^{i eta_k}|k,1> + |k,2>]
/// with |k,s> the Bloch sum over dimers; flat layout (dimer, pigment).
inline QuantumState ring_eigenstate(const RingGeometry& geom, const RingQuantumNumbers& q) {
  validate_quantum_numbers(geom, q);
  const int nd = geom.n_dimers;
  Vector v(2 * nd);
  const double sign = (q.sigma == 2) ? 1.0 : -1.0;
  const Complex phase = sign * std::exp(Complex(0.0, eta(geom, q.k)));
  const double norm = 1.0 / std::sqrt(2.0 * nd);
  for (int n = 0; n < nd; ++n) {
    const Complex bloch =
        std::exp(Complex(0.0, 2.0 * std::numbers::pi * q.k * n / nd)) * norm;
    v(2 * n) = bloch * phase;
    v(2 * n + 1) = bloch;
  }
  return QuantumState(std::move(v));
}

inline std::vector<std::pair<RingQuantumNumbers, double>> full_analytic_spectrum(
    const RingGeometry& geom) {
  std::vector<std::pair<RingQuantumNumbers, double>> out;
  for (int sigma : {1, 2})
    for (int k : k_window(geom.n_dimers)) {
      RingQuantumNumbers q{k, sigma};
      out.emplace_back(q, ring_eigenvalue(geom, q));
    }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

inline void write_spectrum_csv(const std::vector<std::pair<RingQuantumNumbers, double>>& spec,
                               std::ostream& os) {
  os << "k,sigma,energy_cm1\n";
  for (const auto& [q, e] : spec) os << q.k << ',' << q.sigma << ',' << e << '\n';
}

}  // namespace ringchain

#endif
