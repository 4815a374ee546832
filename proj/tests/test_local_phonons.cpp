#include "doctest.h"

#include <cmath>

#include "rydphon/errors.hpp"
#include "rydphon/local_phonons.hpp"
#include "rydphon/phonon_bands.hpp"
#include "rydphon/potential.hpp"

using namespace rydphon;

namespace {

ChainSpec chain(double d, int cells = 7, Topology t = Topology::Trivial) {
  ChainSpec s;
  s.d = d;
  s.n_cells = cells;
  s.topology = t;
  return s;
}

Eigen::MatrixXd trap_hessian(const ChainSpec& s) { return hessian(trap_centers(s), s); }

}  // namespace

TEST_CASE("local frequencies") {
  ChainSpec free = chain(2.0);
  free.v_dd = 0.0;
  free.nu = Vec3(0.5, 1.0, 2.0);
  const Eigen::VectorXd w = local_frequencies(trap_hessian(free), free.mass);
  for (int n = 0; n < free.n_atoms(); ++n)
    for (int i = 0; i < 3; ++i) CHECK(w[3 * n + i] == doctest::Approx(free.nu[i]));

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(1, 1) = 0.0;
  CHECK_THROWS_AS(local_frequencies(bad, 1.0), NonPositiveDiagonal);
}

TEST_CASE("interior atoms share local frequencies, edge atoms differ") {
  const ChainSpec s = chain(2.0, 16);
  const Eigen::VectorXd w = local_frequencies(trap_hessian(s), s.mass);
  auto omega = [&](int cell, Base b, int i) { return w[3 * AtomIndex{cell, b}.flat() + i]; };
  for (int i = 0; i < 3; ++i) {
    // Deep interior: lattice sums are converged to the dipolar tail.
    CHECK(omega(7, Base::A, i) == doctest::Approx(omega(8, Base::A, i)).epsilon(1e-4));
    CHECK(omega(7, Base::B, i) == doctest::Approx(omega(8, Base::B, i)).epsilon(1e-4));
  }
  CHECK(std::abs(omega(0, Base::A, 2) - omega(8, Base::A, 2)) > 1e-3);
}

TEST_CASE("Omega^2 is linear in the interaction strength") {
  ChainSpec s = chain(2.0);
  ChainSpec doubled = s;
  doubled.v_dd = 2.0 * s.v_dd;
  ChainSpec free = s;
  free.v_dd = 0.0;
  const Eigen::ArrayXd w0 = local_frequencies(trap_hessian(free), 1.0).array().square();
  const Eigen::ArrayXd w1 = local_frequencies(trap_hessian(s), 1.0).array().square();
  const Eigen::ArrayXd w2 = local_frequencies(trap_hessian(doubled), 1.0).array().square();
  CHECK(((w2 - w0) - 2.0 * (w1 - w0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("coupling matrix structure") {
  const ChainSpec s = chain(1.8, 5, Topology::Topological);
  const Eigen::MatrixXd d = trap_hessian(s);
  const Eigen::VectorXd w = local_frequencies(d, s.mass);
  const CouplingMatrices c = coupling_matrices(d, w, s.mass);
  CHECK(c.g == c.g.transpose());
  CHECK(c.g.diagonal().isZero(0.0));
  CHECK(c.h.diagonal() == w);
  const Eigen::MatrixXd off = c.h - Eigen::MatrixXd(w.asDiagonal());
  CHECK(off == c.g);
  // One off-diagonal entry by hand.
  const int k = 3 * 2 + 2, l = 3 * 3 + 0;
  CHECK(c.g(k, l) == doctest::Approx(d(k, l) / (2.0 * s.mass * std::sqrt(w[k] * w[l]))));

  ChainSpec free = s;
  free.v_dd = 0.0;
  const Eigen::MatrixXd d0 = trap_hessian(free);
  const CouplingMatrices c0 = coupling_matrices(d0, local_frequencies(d0, 1.0), 1.0);
  CHECK(c0.g.isZero(0.0));
  CHECK(c0.h.isIdentity(0.0));
}

TEST_CASE("Bogoliubov spectrum equals the normal modes") {
  for (int cells : {2, 3, 4, 8}) {
    for (Topology t : {Topology::Trivial, Topology::Topological}) {
      for (double d : {1.5, 2.0, 2.5}) {
        const ChainSpec s = chain(d, cells, t);
        const Eigen::MatrixXd h = trap_hessian(s);
        const CouplingMatrices c = coupling_matrices(h, local_frequencies(h, s.mass), s.mass);
        const Eigen::VectorXd bog = bogoliubov_frequencies(c.h, c.g);
        CHECK((bog - normal_mode_frequencies(h, s.mass)).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
}

TEST_CASE("Bogoliubov edge cases") {
  Eigen::MatrixXd h = Eigen::Vector3d(3.0, 1.0, 2.0).asDiagonal();
  const Eigen::VectorXd w = bogoliubov_frequencies(h, Eigen::MatrixXd::Zero(3, 3));
  CHECK(w == Eigen::Vector3d(1.0, 2.0, 3.0));

  // Rescaling D by s^2 rescales every frequency by s.
  const ChainSpec s = chain(2.0, 3);
  const Eigen::MatrixXd d = trap_hessian(s);
  const double scale = 1.7;
  auto freqs = [&](const Eigen::MatrixXd& dd) {
    const CouplingMatrices c = coupling_matrices(dd, local_frequencies(dd, 1.0), 1.0);
    return bogoliubov_frequencies(c.h, c.g);
  };
  CHECK((freqs(scale * scale * d) - scale * freqs(d)).cwiseAbs().maxCoeff() < 1e-10);

  // g larger than h: no real spectrum.
  Eigen::MatrixXd hh = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd gg(2, 2);
  gg << 0.0, 2.0, 2.0, 0.0;
  CHECK_THROWS_AS(bogoliubov_frequencies(hh, gg), DynamicalInstability);
}

TEST_CASE("J aggregation") {
  ChainSpec free = chain(2.0);
  free.v_dd = 0.0;
  for (const JValue& j : local_phonon_model(free).J) CHECK(j.value == 0.0);

  const ChainSpec s = chain(2.0, 7);
  const LocalPhononModel m = local_phonon_model(s);
  // Interior cells 1..5: ten atoms; pairs at s = 1 alternate intracell / intercell.
  for (const JValue& j : m.J) {
    CHECK(j.pairs > 0);
    if (j.separation % 2 == 1) CHECK((j.bond_class == "intracell" || j.bond_class == "intercell"));
    if (j.separation % 2 == 0) CHECK((j.bond_class == "leg0" || j.bond_class == "leg1"));
  }
  CHECK(std::isfinite(find_J(m.J, 1, "intracell")));
  CHECK(std::isnan(find_J(m.J, 2, "intracell")));
  for (const JValue& j : m.J) {
    if (j.separation == 1 && j.bond_class == "intracell") CHECK(j.pairs == 5);
    if (j.separation == 1 && j.bond_class == "intercell") CHECK(j.pairs == 4);
  }

  // Hand average for s = 1 intracell: atoms A_n, B_n for n = 1..5.
  double sum = 0.0;
  for (int n = 1; n <= 5; ++n)
    sum += m.g.block<3, 3>(3 * AtomIndex{n, Base::A}.flat(), 3 * AtomIndex{n, Base::B}.flat()).sum();
  CHECK(find_J(m.J, 1, "intracell") == doctest::Approx(sum / 5.0));
}

TEST_CASE("topological J uses chain order") {
  const ChainSpec s = chain(2.0, 7, Topology::Topological);
  const LocalPhononModel m = local_phonon_model(s);
  double sum = 0.0;
  for (int n = 1; n <= 5; ++n)
    sum += m.g.block<3, 3>(3 * AtomIndex{n, Base::B}.flat(), 3 * AtomIndex{n, Base::A}.flat()).sum();
  CHECK(find_J(m.J, 1, "intracell") == doctest::Approx(sum / 5.0));
}

TEST_CASE("J decays at least like s^-3") {
  const ChainSpec s = chain(2.0, 32);
  const LocalPhononModel m = local_phonon_model(s);
  for (const char* cls : {"leg0", "leg1"}) {
    const double j4 = std::abs(find_J(m.J, 4, cls));
    const double j8 = std::abs(find_J(m.J, 8, cls));
    CHECK(j8 <= j4 / 8.0 * 1.0001);
  }
}

TEST_CASE("couplings strengthen as d decreases") {
  double prev = 0.0;
  for (double d = 2.5; d >= 1.799; d -= 0.1) {
    const double g = local_phonon_model(chain(d)).g.cwiseAbs().maxCoeff();
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("edges couple differently in the two topologies") {
  auto edge_to_bulk = [](Topology t) {
    const ChainSpec s = chain(2.0, 7, t);
    const LocalPhononModel m = local_phonon_model(s);
    const auto order = chain_order(s);
    // Coupling of the first atom along the chain to its chain neighbour.
    return std::abs(m.g.block<3, 3>(3 * order[0], 3 * order[1]).sum());
  };
  CHECK(edge_to_bulk(Topology::Trivial) != doctest::Approx(edge_to_bulk(Topology::Topological)));
}
