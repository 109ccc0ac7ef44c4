#ifndef RINGCHAIN_DEPHASING_HPP
#define RINGCHAIN_DEPHASING_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringchain/core.hpp"
#include "ringchain/dynamics.hpp"
#include "ringchain/hamiltonian.hpp"

namespace ringchain {

/// Site-basis pure dephasing. gamma is the dimensionless rate Gamma / J2;
/// coherences decay as exp(-Gamma t) while site populations are untouched
/// by the dissipator.
struct DephasingConfig {
  double gamma = 0.0;           // Gamma / J2
  double integrator_step = 0.0; // dimensionless tau step; 0 selects the default
  double tolerance = 1e-8;      // trace-drift bound

  void validate() const {
    if (gamma < 0.0) throw validation_error("DephasingConfig: gamma must be >= 0");
    if (integrator_step < 0.0)
      throw validation_error("DephasingConfig: integrator_step must be >= 0");
    if (tolerance <= 0.0) throw validation_error("DephasingConfig: tolerance must be > 0");
  }
};

/// Right-hand side of d rho / d tau = -i [h, rho] - gamma (rho - diag rho),
/// with h = H / J2: off-diagonal entries damp at the rate gamma, diagonal
/// entries feel only the Liouvillian.
inline Matrix dephasing_generator(const Matrix& h, double gamma, const Matrix& rho) {
  Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
  out -= gamma * rho;
  out.diagonal() += gamma * rho.diagonal();
  return out;
}

/// Default RK4 step. The stability-limited base step is 0.1 / lambda with
/// lambda = sigma_max / J2 + 2 gamma. For a pure-state start the smallest
/// eigenvalue of rho drifts negative at a measured rate ~ 0.025 lambda^5 dt^4
/// per unit tau, so when the final sample time is known the step is shrunk
/// until the accumulated drift stays within half the 1e-8 positivity bound.
inline double default_dephasing_step(const AggregateSpec& spec, double gamma,
                                     double t_final = 0.0) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(build_aggregate_hamiltonian(spec).entries(),
                                           Eigen::EigenvaluesOnly);
  const double sigma_max =
      std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
  const double lambda = sigma_max / spec.ring.j_inter + 2.0 * gamma;
  const double base = 0.1 / lambda;
  if (t_final <= 0.0) return base;
  const double drift_coeff = 0.05;  // 2x safety over the measured 0.025
  const double budget = 5e-9;       // half the positivity tolerance
  const double accuracy =
      std::pow(budget / (drift_coeff * std::pow(lambda, 5) * t_final), 0.25);
  return std::min(base, accuracy);
}

/// Fixed-step RK4 integration of the dephasing master equation, sampled at
/// the (non-decreasing, zero-based) dimensionless times in `taus`. Every
/// output sample is checked for trace, hermiticity, and positivity.
inline Trajectory evolve_dephasing(const AggregateSpec& spec, const DensityMatrix& initial,
                                   const std::vector<double>& taus,
                                   const DephasingConfig& config) {
  config.validate();
  if (initial.entries.rows() != spec.dim())
    throw validation_error("evolve_dephasing: initial state dimension mismatch");
  for (size_t i = 1; i < taus.size(); ++i)
    if (taus[i] < taus[i - 1])
      throw integrator_error("evolve_dephasing: sample times must be non-decreasing");
  if (!taus.empty() && taus.front() != 0.0)
    throw integrator_error("evolve_dephasing: time grid must start at tau = 0");

  const double j2 = spec.ring.j_inter;
  const Matrix h = build_aggregate_hamiltonian(spec).entries() / j2;
  const double g = config.gamma;
  const double dt = config.integrator_step > 0.0
                        ? config.integrator_step
                        : default_dephasing_step(spec, g, taus.empty() ? 0.0 : taus.back());

  Matrix rho = initial.entries;
  double tau = 0.0;

  Trajectory traj;
  traj.taus = taus;
  const int block = spec.ring.n_sites();
  for (double target : taus) {
    while (tau < target - 1e-12) {
      const int n_sub = std::max(1, static_cast<int>(std::ceil((target - tau) / dt - 1e-9)));
      const double step = (target - tau) / n_sub;
      for (int s = 0; s < n_sub; ++s) {
        const Matrix k1 = dephasing_generator(h, g, rho);
        const Matrix k2 = dephasing_generator(h, g, rho + 0.5 * step * k1);
        const Matrix k3 = dephasing_generator(h, g, rho + 0.5 * step * k2);
        const Matrix k4 = dephasing_generator(h, g, rho + step * k3);
        rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      tau = target;
    }
    const double trace = rho.trace().real();
    if (std::abs(trace - 1.0) > config.tolerance)
      throw integrator_error("evolve_dephasing: trace drifted to " + std::to_string(trace) +
                             "; reduce integrator_step");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw integrator_error("evolve_dephasing: hermiticity lost; reduce integrator_step");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw integrator_error("evolve_dephasing: negative population " +
                             std::to_string(es.eigenvalues().minCoeff()) +
                             "; reduce integrator_step");
    std::vector<double> pops(spec.n_rings, 0.0);
    for (int ring = 0; ring < spec.n_rings; ++ring)
      for (int i = 0; i < block; ++i)
        pops[ring] += rho(ring * block + i, ring * block + i).real();
    traj.populations.push_back(std::move(pops));
    traj.t_ps.push_back(target * kHbarCmPs / j2);
  }
  return traj;
}

/// Step-halving self-check: maximum population difference at the final
/// sample between step dt and dt/2.
inline double dephasing_step_error(const AggregateSpec& spec, const DensityMatrix& initial,
                                   const std::vector<double>& taus,
                                   const DephasingConfig& config) {
  DephasingConfig half = config;
  half.integrator_step =
      (config.integrator_step > 0.0
           ? config.integrator_step
           : default_dephasing_step(spec, config.gamma, taus.empty() ? 0.0 : taus.back())) /
      2.0;
  const Trajectory a = evolve_dephasing(spec, initial, taus, config);
  const Trajectory b = evolve_dephasing(spec, initial, taus, half);
  double err = 0.0;
  if (!a.populations.empty()) {
    for (int r = 0; r < spec.n_rings; ++r)
      err = std::max(err, std::abs(a.populations.back()[r] - b.populations.back()[r]));
  }
  return err;
}

}  // namespace ringchain

#endif
