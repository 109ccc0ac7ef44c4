#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ringchain/chain_blocks.hpp"

using namespace ringchain;

namespace {
const RingGeometry kStd(8, 0.0, 320.0, 255.0);
AggregateSpec spec_xi(double xi, int n_rings = 4) {
  return AggregateSpec(kStd, n_rings, xi * 255.0);
}
}  // namespace

TEST_CASE("chain modes: box profile, unit norm, attenuation factor") {
  const ChainMode m1 = chain_mode(4, 1);
  CHECK(m1.xi_factor == doctest::Approx(std::cos(std::numbers::pi / 5.0)));
  double norm2 = 0.0;
  for (double a : m1.amplitudes) norm2 += a * a;
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m1.amplitudes[0] ==
        doctest::Approx(std::sqrt(0.4) * std::sin(std::numbers::pi / 5.0)));
  // rho and N_R+1-rho carry opposite attenuation.
  for (int rho = 1; rho <= 4; ++rho)
    CHECK(chain_mode(4, rho).xi_factor ==
          doctest::Approx(-chain_mode(4, 5 - rho).xi_factor).scale(1.0));
  CHECK_THROWS_AS(chain_mode(4, 0), validation_error);
  CHECK_THROWS_AS(chain_mode(4, 5), validation_error);
}

TEST_CASE("block = ring hamiltonian plus attenuated bond") {
  const AggregateSpec spec = spec_xi(0.5);
  const Matrix block = build_block(spec, 2).entries();
  const Matrix ring = build_ring_hamiltonian(kStd).entries();
  const Matrix diff = block - ring;
  const double expected = 0.5 * 255.0 * std::cos(2.0 * std::numbers::pi / 5.0);
  CHECK(diff(0, 8).real() == doctest::Approx(expected));
  CHECK(diff(8, 0).real() == doctest::Approx(expected));
  double off_bond = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (!((i == 0 && j == 8) || (i == 8 && j == 0))) off_bond += std::abs(diff(i, j));
  CHECK(off_bond == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("decomposition is exact at xi = 0 for any geometry") {
  for (int n_rings : {1, 3, 6})
    for (int nd : {2, 8, 9}) {
      const AggregateSpec spec(RingGeometry(nd, 0.0, 320.0, 255.0), n_rings, 0.0);
      const DecompositionReport report = verify_decomposition(spec);
      CHECK(report.ok);
      CHECK(report.max_deviation <= 1e-8);
    }
}

TEST_CASE("decomposition is exact for a single ring at any xi") {
  const AggregateSpec spec(kStd, 1, 255.0);
  CHECK(verify_decomposition(spec).ok);
}

TEST_CASE("single-bond aggregate: block union deviates at O(xi^2)") {
  // The directional inter-ring bond leaves a cross-mode residual, so the
  // block union is an approximation whose error shrinks ~ xi^2. Frozen
  // reference values for N_R=4, N_D=8, standard couplings.
  const double dev_1 = verify_decomposition(spec_xi(1.0)).max_deviation;
  const double dev_quarter = verify_decomposition(spec_xi(0.25)).max_deviation;
  const double dev_16th = verify_decomposition(spec_xi(0.0625)).max_deviation;
  CHECK(dev_1 == doctest::Approx(37.6).epsilon(0.02));
  CHECK(dev_quarter == doctest::Approx(2.11).epsilon(0.02));
  CHECK(dev_16th == doctest::Approx(0.123).epsilon(0.02));
  CHECK(dev_quarter / dev_16th > 10.0);
  CHECK(dev_1 / dev_quarter > 10.0);
}

TEST_CASE("decomposition record format") {
  const AggregateSpec spec = spec_xi(0.0);
  std::ostringstream os;
  write_decomposition_record(spec, verify_decomposition(spec), os);
  CHECK(os.str().substr(0, 6) == "4,8,0,");
}
