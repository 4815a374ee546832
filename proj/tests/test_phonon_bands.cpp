#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rydphon/errors.hpp"
#include "rydphon/phonon_bands.hpp"
#include "rydphon/potential.hpp"

using namespace rydphon;

namespace {

ChainSpec chain(double d, Topology t = Topology::Trivial) {
  ChainSpec s;
  s.d = d;
  s.topology = t;
  return s;
}

double ortho_error(const Mat6c& x) { return (x.adjoint() * x - Mat6c::Identity()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("frequencies match the finite-difference reference") {
  // Reference: Bloch matrix from high-precision finite differences of the pair energy, cutoff 32.
  struct Row {
    double d, q_over_pi_a;
    std::array<double, 6> w;
  };
  const Row rows[] = {
      {2.0, 0.0, {0.91352292727141, 1, 1, 1, 1.03534056064089, 1.04572739508979}},
      {2.0, 0.5, {0.891137658061869, 0.968993037674806, 0.991620017966247, 1.02889115981133, 1.0447005599051, 1.06470635796282}},
      {2.0, 1.0, {0.876753123039689, 0.946843059423968, 0.985542780238168, 1.05160230068579, 1.06086594932278, 1.0640458867648}},
      {1.5, 0.0, {0.36945726894649, 1, 1, 1, 1.11774006645063, 1.2704953641291}},
      {1.5, 0.5, {0.442491022167441, 0.939318385350354, 0.972838755961257, 1.05121198325064, 1.14657758682739, 1.24730935408948}},
      {1.5, 1.0, {0.536172644931155, 0.856954841415609, 0.95293781719425, 1.16155902301634, 1.16513429111644, 1.16760418416382}},
  };
  for (const Row& r : rows) {
    const ChainSpec s = chain(r.d);
    const double q = r.q_over_pi_a * std::numbers::pi / s.period();
    const BlochModes m = diagonalize_bloch(dynamical_matrix(q, s, bulk_trap_centers(s)), s.mass);
    for (int j = 0; j < 6; ++j) CHECK(m.omega[j] == doctest::Approx(r.w[j]).epsilon(1e-10));
  }
}

TEST_CASE("dynamical matrix structure") {
  const ChainSpec s = chain(1.8);
  const BulkEquilibrium b = bulk_trap_centers(s);
  for (double q : {0.1, 0.5, -0.7, std::numbers::pi / s.period()}) {
    const Mat6c d = dynamical_matrix(q, s, b);
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((dynamical_matrix(-q, s, b) - d.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
  }
  ChainSpec free = s;
  free.v_dd = 0.0;
  free.nu = Vec3(1.0, 1.5, 2.0);
  const Mat6c d0 = dynamical_matrix(0.0, free, bulk_trap_centers(free));
  Eigen::Matrix<double, 6, 1> diag;
  diag << 1.0, 2.25, 4.0, 1.0, 2.25, 4.0;
  CHECK((d0 - Mat6c(diag.cast<cplx>().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("harmonic matrix is the Hessian") {
  const ChainSpec s = chain(2.0);
  const Configuration relaxed = relax_finite(s).config;
  CHECK(harmonic_matrix(relaxed, s) == hessian(relaxed, s));
  const Configuration traps = trap_centers(s);
  CHECK_THROWS_AS(harmonic_matrix(traps, s), Error);
  CHECK(harmonic_matrix(traps, s, true) == hessian(traps, s));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(harmonic_matrix(relaxed, s));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  ChainSpec free = s;
  free.v_dd = 0.0;
  CHECK(harmonic_matrix(trap_centers(free), free, true).isIdentity(0.0));
}

TEST_CASE("q grid") {
  const ChainSpec s = chain(2.0);
  const auto q = q_grid(s, 256);
  REQUIRE(q.size() == 256);
  CHECK(q.back() == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-15));
  CHECK(q.front() > -std::numbers::pi / 4.0);
  CHECK(q[127] == 0.0);
  for (int k = 0; k < 127; ++k) CHECK(q[k] == -q[254 - k]);
  CHECK_THROWS_AS(q_grid(s, 1), Error);
}

TEST_CASE("band structure invariants") {
  for (double d : {1.5, 2.0, 2.5}) {
    for (Topology t : {Topology::Trivial, Topology::Topological}) {
      const ChainSpec s = chain(d, t);
      const BandStructure b = band_structure(s);
      REQUIRE(b.n_q() == 256);
      for (int k = 0; k < b.n_q(); ++k) {
        CHECK(ortho_error(b.xi[k]) < 1e-10);
        for (int j = 0; j + 1 < 6; ++j) CHECK(b.omega(k, j) <= b.omega(k, j + 1));
        CHECK(b.omega.row(k).minCoeff() >= 0.0);
        const double tr = dynamical_matrix(b.q[k], s, b.bulk).trace().real() / s.mass;
        CHECK(std::abs(b.omega.row(k).squaredNorm() - tr) < 1e-10 * tr);
      }
      for (int k = 0; k < 127; ++k)
        CHECK((b.omega.row(k) - b.omega.row(254 - k)).cwiseAbs().maxCoeff() < 1e-10);
      // Each tracked row is a permutation of the sorted indices.
      for (const auto& row : b.tracked) {
        std::array<int, 6> sorted = row;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == std::array<int, 6>{0, 1, 2, 3, 4, 5});
      }
    }
  }
}

TEST_CASE("gauge fixing") {
  Vec6c v;
  v << cplx(0.1, 0.2), 0.0, cplx(0.0, -0.3), 0.0, 0.0, cplx(0.2, 0.2);
  fix_gauge(v);
  CHECK(v[2].imag() == 0.0);
  CHECK(v[2].real() > 0.0);
  CHECK(std::abs(v[2]) == doctest::Approx(0.3));
  Vec6c y;
  y << 0.0, cplx(0.0, -0.6), 0.0, 0.0, cplx(0.8, 0.0), 0.0;
  fix_gauge(y);
  CHECK(y[4] == cplx(0.8, 0.0));
  CHECK(std::abs(y[1]) == doctest::Approx(0.6));

  const ChainSpec s = chain(2.0);
  const BandStructure b = band_structure(s, 32);
  for (int k = 0; k < b.n_q(); ++k) {
    for (int j = 0; j < 6; ++j) {
      const Vec6c x = b.xi[k].col(j);
      const int p = std::abs(x[5]) > std::abs(x[2]) ? 5 : 2;
      if (std::abs(x[p]) > 1e-12) {
        CHECK(x[p].imag() == 0.0);
        CHECK(x[p].real() > 0.0);
      }
    }
  }
}

TEST_CASE("degenerate subspaces are canonicalised") {
  ChainSpec s = chain(2.0);
  s.v_dd = 0.0;
  const BlochModes m = diagonalize_bloch(dynamical_matrix(0.3, s, bulk_trap_centers(s)), s.mass);
  CHECK(m.xi.isIdentity(1e-14));
  CHECK((m.omega.array() == 1.0).all());
}

TEST_CASE("free chain: flat bands, no crossings") {
  ChainSpec s = chain(2.0);
  s.v_dd = 0.0;
  s.nu = Vec3::Constant(1.7);
  const BandStructure b = band_structure(s, 64);
  CHECK((b.omega.array() - 1.7).abs().maxCoeff() < 1e-14);
  const BandDiagnostics d = band_diagnostics(b);
  CHECK(d.crossings.empty());
  for (double w : d.bandwidth) CHECK(w < 1e-14);
  for (int c : d.concavity) CHECK(c == 0);
}

TEST_CASE("imaginary frequencies are errors") {
  ChainSpec s = chain(2.0);
  s.nu = Vec3::Constant(0.05);
  CHECK_THROWS_AS(band_structure(s, 16), ImaginaryFrequency);
  CHECK_THROWS_AS(finite_spectrum(s, Equilibrium::TrapCenters, std::vector<BandInterval>{}), ImaginaryFrequency);
}

TEST_CASE("crossings at d = 1.5 and d = 2.5") {
  const BandDiagnostics a = band_diagnostics(band_structure(chain(1.5)));
  CHECK(a.has_crossing(5, 6));
  const BandDiagnostics b = band_diagnostics(band_structure(chain(2.5)));
  CHECK(b.has_crossing(6, 5));
  CHECK(b.has_crossing(6, 4));
  for (const Crossing& c : b.crossings) {
    CHECK(c.band < c.other);
    CHECK(std::abs(c.q) < std::numbers::pi / 5.0);
  }
}

TEST_CASE("band 1 flattens between d = 1.5 and d = 1.65") {
  const double w15 = band_diagnostics(band_structure(chain(1.5))).bandwidth[0];
  const double w165 = band_diagnostics(band_structure(chain(1.65))).bandwidth[0];
  CHECK(w165 < w15);
}

TEST_CASE("inverse participation ratio") {
  const int n = 10;
  Eigen::MatrixXd modes = Eigen::MatrixXd::Zero(3 * n, 2);
  for (int a = 0; a < n; ++a) modes(3 * a + 2, 0) = 1.0 / std::sqrt(n);
  modes(3 * 4 + 1, 1) = 1.0;
  const Eigen::VectorXd ipr = inverse_participation(modes);
  CHECK(ipr[0] == doctest::Approx(1.0 / n));
  CHECK(ipr[1] == doctest::Approx(1.0));
  Eigen::VectorXd f(2);
  f << 0.5, 0.5;
  const std::vector<BandInterval> bands{{0.9, 1.0}};
  const EdgeFlags flags = detect_edge_modes(modes, f, bands);
  CHECK(!flags.edge[0]);
  CHECK(flags.edge[1]);
  CHECK(flags.adjacent_band[1] == 1);
  f << 0.95, 0.95;
  CHECK(detect_edge_modes(modes, f, bands).count() == 0);
}

TEST_CASE("finite spectrum basics") {
  ChainSpec s = chain(2.0);
  s.v_dd = 0.0;
  const FiniteSpectrum f = finite_spectrum(s);
  CHECK(f.frequencies.size() == 42);
  CHECK((f.frequencies.array() - 1.0).abs().maxCoeff() < 1e-14);

  const ChainSpec t = chain(2.0, Topology::Topological);
  const FiniteSpectrum g = finite_spectrum(t);
  const Eigen::MatrixXd gram = g.modes.transpose() * g.modes;
  CHECK((gram - Eigen::MatrixXd::Identity(42, 42)).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i + 1 < 42; ++i) CHECK(g.frequencies[i] <= g.frequencies[i + 1]);
}

TEST_CASE("relaxation changes the finite spectrum") {
  const ChainSpec s = chain(2.0);
  const std::vector<BandInterval> none;
  const FiniteSpectrum a = finite_spectrum(s, Equilibrium::TrapCenters, none);
  const FiniteSpectrum b = finite_spectrum(s, Equilibrium::Relaxed, none);
  CHECK((a.frequencies - b.frequencies).cwiseAbs().maxCoeff() > 1e-4);
}

TEST_CASE("bulk-boundary consistency on a 64-cell chain") {
  ChainSpec s = chain(2.0);
  s.n_cells = 64;
  const BandStructure b = band_structure(s);
  const auto env = band_envelopes(b);
  const FiniteSpectrum f = finite_spectrum(s, Equilibrium::TrapCenters, env);
  for (int i = 0; i < f.frequencies.size(); ++i) {
    if (f.edges.edge[i]) continue;
    double dist = 1e9;
    for (const auto& iv : env)
      dist = std::min(dist, f.frequencies[i] < iv.lo ? iv.lo - f.frequencies[i]
                                                     : (f.frequencies[i] > iv.hi ? f.frequencies[i] - iv.hi : 0.0));
    CHECK(dist <= 1e-2);
  }
  // Bulk frequencies sampled across the zone each have a finite-chain partner.
  for (int k = 0; k < b.n_q(); k += 16) {
    for (int j = 0; j < 6; ++j) {
      const double w = b.omega(k, j);
      CHECK((f.frequencies.array() - w).abs().minCoeff() < 1e-3);
    }
  }
}
