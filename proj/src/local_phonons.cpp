#include "rydphon/local_phonons.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rydphon/errors.hpp"
#include "rydphon/phonon_bands.hpp"

namespace rydphon {

Eigen::VectorXd local_frequencies(const Eigen::MatrixXd& d, double mass) {
  if (d.rows() != d.cols()) throw Error("local_frequencies: matrix is not square");
  if (!(mass > 0.0)) throw Error("local_frequencies: mass must be positive");
  Eigen::VectorXd w(d.rows());
  for (int k = 0; k < d.rows(); ++k) {
    if (!(d(k, k) > 0.0)) {
      throw NonPositiveDiagonal("local_frequencies: D(" + std::to_string(k) + "," + std::to_string(k) +
                                ") = " + std::to_string(d(k, k)));
    }
    w[k] = std::sqrt(d(k, k) / mass);
  }
  return w;
}

CouplingMatrices coupling_matrices(const Eigen::MatrixXd& d, const Eigen::VectorXd& omega_local, double mass) {
  const Eigen::Index n = d.rows();
  if (d.cols() != n || omega_local.size() != n) throw Error("coupling_matrices: size mismatch");
  CouplingMatrices c;
  c.g.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k; l < n; ++l) {
      // Evaluated once per unordered pair so g stays exactly symmetric.
      const double v = k == l ? 0.0 : 0.5 * (d(k, l) + d(l, k)) / (2.0 * mass * std::sqrt(omega_local[k] * omega_local[l]));
      c.g(k, l) = v;
      c.g(l, k) = v;
    }
  }
  c.h = c.g;
  c.h.diagonal() = omega_local;
  return c;
}

std::vector<JValue> aggregate_J(const Eigen::MatrixXd& g, const ChainSpec& spec) {
  const int n_atoms = spec.n_atoms();
  if (g.rows() != 3 * n_atoms || g.cols() != 3 * n_atoms) throw Error("aggregate_J: g does not match the spec");
  const std::vector<int> order = chain_order(spec);

  struct Acc {
    double sum = 0.0;
    int count = 0;
  };
  std::map<std::pair<int, std::string>, Acc> acc;
  for (int r1 = 0; r1 < n_atoms; ++r1) {
    const AtomIndex a1 = AtomIndex::from_flat(order[r1]);
    if (a1.cell == 0 || a1.cell == spec.n_cells - 1) continue;
    for (int r2 = r1 + 1; r2 < n_atoms; ++r2) {
      const AtomIndex a2 = AtomIndex::from_flat(order[r2]);
      if (a2.cell == 0 || a2.cell == spec.n_cells - 1) continue;
      const int s = r2 - r1;
      std::string cls;
      if (s % 2 == 1) {
        cls = r1 % 2 == 0 ? "intracell" : "intercell";
      } else {
        cls = a1.base == Base::A ? "leg0" : "leg1";
      }
      const double v = g.block<3, 3>(3 * order[r1], 3 * order[r2]).sum();
      Acc& slot = acc[{s, cls}];
      slot.sum += v;
      ++slot.count;
    }
  }
  std::vector<JValue> out;
  out.reserve(acc.size());
  for (const auto& [key, a] : acc) out.push_back({key.first, key.second, a.sum / a.count, a.count});
  return out;
}

double find_J(const std::vector<JValue>& j, int separation, const std::string& bond_class) {
  for (const auto& v : j)
    if (v.separation == separation && v.bond_class == bond_class) return v.value;
  return std::numeric_limits<double>::quiet_NaN();
}

Eigen::VectorXd bogoliubov_frequencies(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n || g.rows() != n || g.cols() != n) throw Error("bogoliubov_frequencies: size mismatch");
  Eigen::MatrixXd big(2 * n, 2 * n);
  big << h, g, -g, -h;
  Eigen::EigenSolver<Eigen::MatrixXd> es(big, false);
  if (es.info() != Eigen::Success) throw Error("bogoliubov_frequencies: eigensolver failed");
  const Eigen::VectorXcd ev = es.eigenvalues();
  const double scale = std::max(1.0, big.cwiseAbs().maxCoeff());
  std::vector<double> re(2 * n);
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    if (std::abs(ev[k].imag()) > 1e-7 * scale) {
      throw DynamicalInstability("bogoliubov_frequencies: complex eigenvalue " + std::to_string(ev[k].real()) +
                                 (ev[k].imag() < 0 ? " - " : " + ") + std::to_string(std::abs(ev[k].imag())) + "i");
    }
    re[k] = ev[k].real();
  }
  std::sort(re.begin(), re.end());
  Eigen::VectorXd w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    w[k] = re[n + k];
    if (w[k] < 0.0) {
      if (w[k] < -1e-7 * scale) throw DynamicalInstability("bogoliubov_frequencies: negative branch eigenvalue");
      w[k] = 0.0;
    }
  }
  return w;
}

LocalPhononModel local_phonon_model(const ChainSpec& spec, Equilibrium equilibrium) {
  spec.validate();
  const Configuration config = equilibrium == Equilibrium::Relaxed ? relax_finite(spec).config : trap_centers(spec);
  const Eigen::MatrixXd d = harmonic_matrix(config, spec, equilibrium == Equilibrium::TrapCenters);
  LocalPhononModel m;
  m.omega_local = local_frequencies(d, spec.mass);
  auto c = coupling_matrices(d, m.omega_local, spec.mass);
  m.g = std::move(c.g);
  m.h = std::move(c.h);
  m.J = aggregate_J(m.g, spec);
  return m;
}

}  // namespace rydphon
