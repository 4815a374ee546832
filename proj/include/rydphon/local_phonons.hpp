#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rydphon/equilibrium.hpp"
#include "rydphon/geometry.hpp"

namespace rydphon {

// Local-oscillator form of the harmonic Hamiltonian. All 3N x 3N matrices use
// the flat coordinate index 3 * atom + direction, with atoms flat-indexed as in AtomIndex.

/// Omega_{n,i} = sqrt(D_{nn}^{ii} / M), indexed 3n + i.
Eigen::VectorXd local_frequencies(const Eigen::MatrixXd& d, double mass);

struct CouplingMatrices {
  Eigen::MatrixXd g;
  Eigen::MatrixXd h;
};

/// g = (1 - delta delta) D / (2 M sqrt(Omega Omega)),  h = delta Omega + g.
CouplingMatrices coupling_matrices(const Eigen::MatrixXd& d, const Eigen::VectorXd& omega_local, double mass);

/// J(s) for one bond class. Odd s: "intracell" or "intercell"; even s: "leg0" (A atoms) or "leg1" (B atoms).
struct JValue {
  int separation = 0;
  std::string bond_class;
  double value = 0.0;
  int pairs = 0;  // interior pairs averaged
};

/// Sum_{ij} g_{nm}^{ij} averaged over pairs whose chain ranks differ by s, grouped by bond class.
/// Pairs touching the first or last cell are excluded.
std::vector<JValue> aggregate_J(const Eigen::MatrixXd& g, const ChainSpec& spec);

/// Looks up J(s) for a bond class; NaN when the chain has no interior pair of that kind.
double find_J(const std::vector<JValue>& j, int separation, const std::string& bond_class);

/// Nonnegative eigenfrequencies of [[h, g], [-g, -h]], ascending.
Eigen::VectorXd bogoliubov_frequencies(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g);

struct LocalPhononModel {
  Eigen::VectorXd omega_local;
  Eigen::MatrixXd g;
  Eigen::MatrixXd h;
  std::vector<JValue> J;

  double omega(int n, int i) const { return omega_local[3 * n + i]; }
  double g_at(int n, int m, int i, int j) const { return g(3 * n + i, 3 * m + j); }
  double h_at(int n, int m, int i, int j) const { return h(3 * n + i, 3 * m + j); }
};

LocalPhononModel local_phonon_model(const ChainSpec& spec, Equilibrium equilibrium = Equilibrium::TrapCenters);

}  // namespace rydphon
