#ifndef RINGCHAIN_HAMILTONIAN_HPP
#define RINGCHAIN_HAMILTONIAN_HPP

#include <optional>
#include <ostream>
#include <vector>

#include "ringchain/core.hpp"

namespace ringchain {

/// Single inter-ring bond: site (r,0,1) couples to the nearest pigment of
/// ring r+1, which is (r+1, N_D/2, 1) for even N_D and (r+1, (N_D-1)/2, 2)
/// for odd N_D.
struct CouplingBond {
  SiteIndex donor;
  SiteIndex acceptor;
  double strength;
};

// Acceptor site within a single ring's index space.
inline SiteIndex acceptor_site(const RingGeometry& geom, int ring) {
  const int nd = geom.n_dimers;
  if (nd % 2 == 0) return SiteIndex{ring, nd / 2, 1};
  return SiteIndex{ring, (nd - 1) / 2, 2};
}

inline CouplingBond inter_ring_bond(const RingGeometry& geom, int r, double w,
                                    int n_rings) {
  if (r < 1 || r >= n_rings)
    throw validation_error("inter_ring_bond: ring index " + std::to_string(r) +
                           " out of range 1.." + std::to_string(n_rings - 1));
  return CouplingBond{SiteIndex{r, 0, 1}, acceptor_site(geom, r + 1), w};
}

/// Ring Hamiltonian: diagonal E, J1 on (n,1)-(n,2), J2 on (n,2)-(n+1,1).
/// The optional site-energy vector (length 2*N_D, flat order) overrides the
/// uniform diagonal; no disorder sampling is provided.
inline HermitianOperator build_ring_hamiltonian(
    const RingGeometry& geom,
    const std::optional<std::vector<double>>& site_energies = std::nullopt) {
  const int nd = geom.n_dimers;
  const int dim = 2 * nd;
  if (site_energies && static_cast<int>(site_energies->size()) != dim)
    throw validation_error("build_ring_hamiltonian: site-energy override must have 2*N_D entries");
  Matrix h = Matrix::Zero(dim, dim);
  for (int n = 0; n < nd; ++n) {
    const int s1 = 2 * n;
    const int s2 = 2 * n + 1;
    h(s1, s1) = site_energies ? (*site_energies)[s1] : geom.site_energy;
    h(s2, s2) = site_energies ? (*site_energies)[s2] : geom.site_energy;
    h(s1, s2) += geom.j_intra;
    h(s2, s1) += geom.j_intra;
    const int next1 = 2 * ((n + 1) % nd);
    h(next1, s2) += geom.j_inter;
    h(s2, next1) += geom.j_inter;
  }
  return HermitianOperator(std::move(h));
}

inline HermitianOperator build_aggregate_hamiltonian(const AggregateSpec& spec) {
  const int block = spec.ring.n_sites();
  const int dim = spec.dim();
  const Matrix ring = build_ring_hamiltonian(spec.ring).entries();
  Matrix h = Matrix::Zero(dim, dim);
  for (int r = 0; r < spec.n_rings; ++r)
    h.block(r * block, r * block, block, block) = ring;
  for (int r = 1; r < spec.n_rings; ++r) {
    const CouplingBond bond = inter_ring_bond(spec.ring, r, spec.w_coupling, spec.n_rings);
    const int i = flatten(bond.donor, spec);
    const int j = flatten(bond.acceptor, spec);
    h(i, j) += bond.strength;
    h(j, i) += bond.strength;
  }
  return HermitianOperator(std::move(h));
}

/// Plain-text matrix dump for debugging: row-major, "re,im" pairs separated
/// by spaces, one row per line.
inline void dump_matrix(const Matrix& m, std::ostream& os) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ' ';
      os << m(i, j).real() << ',' << m(i, j).imag();
    }
    os << '\n';
  }
}

}  // namespace ringchain

#endif
