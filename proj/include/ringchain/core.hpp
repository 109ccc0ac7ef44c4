#ifndef RINGCHAIN_CORE_HPP
#define RINGCHAIN_CORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ringchain {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// hbar / (h c * 1 cm^-1), in cm^-1 * ps. Single conversion constant between
// dimensionless time tau and picoseconds: t[ps] = tau * kHbarCmPs / J2[cm^-1].
inline constexpr double kHbarCmPs = 5.3088374598;

struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct unit_mode_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct selection_rule_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct integrator_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class UnitMode { dimensionless, picoseconds };

struct UnitConvention {
  UnitMode mode = UnitMode::dimensionless;
};

/// One dimerized ring unit cell: N_D dimers, uniform site energy E,
/// intra-dimer coupling J1 and inter-dimer coupling J2 (all cm^-1).
struct RingGeometry {
  int n_dimers;
  double site_energy;
  double j_intra;
  double j_inter;

  RingGeometry(int nd, double e, double j1, double j2)
      : n_dimers(nd), site_energy(e), j_intra(j1), j_inter(j2) {
    if (nd < 2) throw validation_error("RingGeometry: n_dimers must be >= 2");
    if (j2 == 0.0) throw validation_error("RingGeometry: j_inter must be nonzero");
    if (j1 / j2 <= 0.0)
      throw validation_error("RingGeometry: dimerization ratio j_intra/j_inter must be > 0");
  }

  double beta() const { return j_intra / j_inter; }
  int n_sites() const { return 2 * n_dimers; }
};

/// Open chain of identical rings with nearest-pigment coupling W (cm^-1).
struct AggregateSpec {
  RingGeometry ring;
  int n_rings;
  double w_coupling;
  UnitConvention units;

  AggregateSpec(RingGeometry g, int nr, double w, UnitConvention u = {})
      : ring(g), n_rings(nr), w_coupling(w), units(u) {
    if (nr < 1) throw validation_error("AggregateSpec: n_rings must be >= 1");
  }

  double xi() const { return w_coupling / ring.j_inter; }
  // Mirror-extended chain period.
  int mirror_period() const { return 2 * n_rings + 2; }
  int dim() const { return 2 * ring.n_dimers * n_rings; }
};

/// Site label |r,n,s>: ring r in 1..N_R, dimer n in 0..N_D-1, pigment s in {1,2}.
struct SiteIndex {
  int ring;
  int dimer;
  int pigment;

  bool operator==(const SiteIndex&) const = default;
};

// Flat layout is ring-major, dimer next, pigment minor, so each ring occupies
// a contiguous block of 2*N_D entries.
inline int flatten(const SiteIndex& idx, const AggregateSpec& spec) {
  const int nd = spec.ring.n_dimers;
  if (idx.ring < 1 || idx.ring > spec.n_rings)
    throw validation_error("SiteIndex: ring " + std::to_string(idx.ring) +
                           " out of range 1.." + std::to_string(spec.n_rings));
  if (idx.dimer < 0 || idx.dimer >= nd)
    throw validation_error("SiteIndex: dimer " + std::to_string(idx.dimer) +
                           " out of range 0.." + std::to_string(nd - 1));
  if (idx.pigment < 1 || idx.pigment > 2)
    throw validation_error("SiteIndex: pigment " + std::to_string(idx.pigment) +
                           " must be 1 or 2");
  return ((idx.ring - 1) * nd + idx.dimer) * 2 + (idx.pigment - 1);
}

inline SiteIndex unflatten(int flat, const AggregateSpec& spec) {
  if (flat < 0 || flat >= spec.dim())
    throw validation_error("unflatten: flat index " + std::to_string(flat) +
                           " out of range 0.." + std::to_string(spec.dim() - 1));
  const int nd = spec.ring.n_dimers;
  const int pigment = flat % 2 + 1;
  const int cell = flat / 2;
  return SiteIndex{cell / nd + 1, cell % nd, pigment};
}

inline double time_to_physical(double tau, const AggregateSpec& spec) {
  if (spec.units.mode != UnitMode::picoseconds)
    throw unit_mode_error("time_to_physical requires picoseconds unit mode");
  return tau * kHbarCmPs / spec.ring.j_inter;
}

/// Dense complex matrix with hermiticity enforced at construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw validation_error("HermitianOperator: matrix must be square");
    const double scale = 1.0 + m_.cwiseAbs().maxCoeff();
    const double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-12 * scale)
      throw validation_error("HermitianOperator: hermiticity violated, max deviation " +
                             std::to_string(dev));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& entries() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

struct QuantumState {
  Vector amplitudes;

  explicit QuantumState(Vector v) : amplitudes(std::move(v)) {
    const double n2 = amplitudes.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-10)
      throw validation_error("QuantumState: norm^2 deviates from 1 by " +
                             std::to_string(std::abs(n2 - 1.0)));
  }

  int dim() const { return static_cast<int>(amplitudes.size()); }
};

struct DensityMatrix {
  Matrix entries;

  explicit DensityMatrix(Matrix m) : entries(std::move(m)) {
    if (entries.rows() != entries.cols())
      throw validation_error("DensityMatrix: matrix must be square");
    const double scale = 1.0 + entries.cwiseAbs().maxCoeff();
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw validation_error("DensityMatrix: not hermitian");
    if (std::abs(entries.trace().real() - 1.0) > 1e-10 ||
        std::abs(entries.trace().imag()) > 1e-10)
      throw validation_error("DensityMatrix: trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw validation_error("DensityMatrix: negative eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()));
  }

  int dim() const { return static_cast<int>(entries.rows()); }
};

// Pure-state projector, bypassing the (redundant) positivity check.
inline DensityMatrix pure_density(const QuantumState& psi) {
  return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint());
}

}  // namespace ringchain

#endif
