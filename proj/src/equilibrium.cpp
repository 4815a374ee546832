#include "rydphon/equilibrium.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "rydphon/potential.hpp"

namespace rydphon {
namespace {

struct NewtonResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> energies;
};

// Newton iteration with backtracking on the energy; indefinite Hessians are
// shifted to be positive definite before solving.
NewtonResult newton_minimize(Eigen::VectorXd x, const std::function<double(const Eigen::VectorXd&)>& energy,
                             const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                             const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& hess, double tol,
                             int max_iter) {
  NewtonResult r;
  double e = energy(x);
  r.energies.push_back(e);
  for (;;) {
    const Eigen::VectorXd g = grad(x);
    r.residual = g.lpNorm<Eigen::Infinity>();
    if (r.residual < tol) {
      r.converged = true;
      break;
    }
    if (r.iterations >= max_iter) break;

    Eigen::MatrixXd h = hess(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double lmin = es.eigenvalues().minCoeff();
    const bool pd = lmin > 0.0;
    if (!pd) h += (1e-3 - lmin) * Eigen::MatrixXd::Identity(h.rows(), h.cols());
    const Eigen::VectorXd p = -h.llt().solve(g);

    const double slope = g.dot(p);
    double alpha = 1.0;
    Eigen::VectorXd xn = x + p;
    double en = energy(xn);
    // Below this scale energy differences are rounding noise; trust the quadratic model.
    const double noise = 1e-14 * std::max(1.0, std::abs(e));
    while (en > e + 1e-4 * alpha * slope && !(pd && std::abs(slope) < noise && en <= e + noise)) {
      alpha *= 0.5;
      if (alpha < 1e-12) break;
      xn = x + alpha * p;
      en = energy(xn);
    }
    if (alpha < 1e-12) break;
    x = xn;
    e = std::min(en, e);
    r.energies.push_back(en);
    ++r.iterations;
  }
  r.x = std::move(x);
  return r;
}

std::array<Vec3, 2> unpack(const Eigen::VectorXd& v) { return {v.segment<3>(0), v.segment<3>(3)}; }

// r = R_{0,alpha} - R_{n,beta}
template <typename F>
void for_each_partner(const ChainSpec& spec, const std::array<Vec3, 2>& disp, int cutoff, F&& visit) {
  const auto rho = basis_offsets(spec);
  const double a = spec.period();
  for (int alpha = 0; alpha < 2; ++alpha) {
    const Vec3 r0 = rho[alpha] + disp[alpha];
    for (int n = -cutoff; n <= cutoff; ++n) {
      for (int beta = 0; beta < 2; ++beta) {
        if (n == 0 && beta == alpha) continue;
        const Vec3 rn = Vec3{0.0, 0.0, n * a} + rho[beta] + disp[beta];
        visit(alpha, n, beta, Vec3(r0 - rn));
      }
    }
  }
}

}  // namespace

FiniteRelaxation relax_finite(const ChainSpec& spec, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error("relax_finite: tol must be positive");
  const Configuration start = trap_centers(spec);
  auto as_config = [](const Eigen::VectorXd& x) { return Configuration::from_flat(x); };
  auto nr = newton_minimize(
      start.flattened(), [&](const Eigen::VectorXd& x) { return total_energy(as_config(x), spec).total; },
      [&](const Eigen::VectorXd& x) { return gradient(as_config(x), spec); },
      [&](const Eigen::VectorXd& x) { return hessian(as_config(x), spec); }, tol, max_iter);

  Configuration c = as_config(nr.x);
  c.residual_inf_norm = nr.residual;
  if (!nr.converged) {
    throw MaxIterExceeded("relax_finite: no convergence after " + std::to_string(nr.iterations) +
                              " iterations, residual " + std::to_string(nr.residual),
                          c, nr.residual);
  }
  c.relaxed = true;
  FiniteRelaxation out;
  out.iterations = nr.iterations;
  out.energies = std::move(nr.energies);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian(c, spec), Eigen::EigenvaluesOnly);
  out.min_hessian_eigenvalue = es.eigenvalues().minCoeff();
  out.unstable = out.min_hessian_eigenvalue < 0.0;
  out.config = std::move(c);
  return out;
}

double bulk_energy_per_cell(const ChainSpec& spec, const std::array<Vec3, 2>& disp, int cutoff_cells) {
  const Vec3 m = dipole_unit(spec);
  const Vec3 k = spec.mass * spec.nu.cwiseProduct(spec.nu);
  double e = 0.5 * (k.dot(disp[0].cwiseProduct(disp[0])) + k.dot(disp[1].cwiseProduct(disp[1])));
  double pairs = 0.0;
  for_each_partner(spec, disp, cutoff_cells,
                   [&](int, int, int, const Vec3& r) { pairs += pair_energy(r, m, spec.v_dd); });
  return e + 0.5 * pairs;
}

Vec6 bulk_gradient(const ChainSpec& spec, const std::array<Vec3, 2>& disp, int cutoff_cells) {
  const Vec3 m = dipole_unit(spec);
  const Vec3 k = spec.mass * spec.nu.cwiseProduct(spec.nu);
  Vec6 g;
  g << k.cwiseProduct(disp[0]), k.cwiseProduct(disp[1]);
  for_each_partner(spec, disp, cutoff_cells, [&](int alpha, int, int, const Vec3& r) {
    g.segment<3>(3 * alpha) += pair_gradient(r, m, spec.v_dd);
  });
  return g;
}

Mat6 bulk_hessian(const ChainSpec& spec, const std::array<Vec3, 2>& disp, int cutoff_cells) {
  const Vec3 m = dipole_unit(spec);
  Mat6 h = Mat6::Zero();
  for (int c = 0; c < 3; ++c) {
    h(c, c) = spec.mass * spec.nu[c] * spec.nu[c];
    h(3 + c, 3 + c) = h(c, c);
  }
  for_each_partner(spec, disp, cutoff_cells, [&](int alpha, int, int beta, const Vec3& r) {
    if (beta == alpha) return;  // same-base partners move rigidly with the reference atom
    const Mat3 b = pair_hessian(r, m, spec.v_dd);
    h.block<3, 3>(3 * alpha, 3 * alpha) += b;
    h.block<3, 3>(3 * alpha, 3 * beta) -= b;
  });
  return 0.5 * (h + h.transpose());
}

BulkEquilibrium bulk_trap_centers(const ChainSpec& spec, int cutoff_cells) {
  BulkEquilibrium b;
  b.cutoff_cells = cutoff_cells;
  b.residual = bulk_gradient(spec, b.displacement, cutoff_cells).lpNorm<Eigen::Infinity>();
  return b;
}

BulkEquilibrium relax_bulk(const ChainSpec& spec, double tol, int cutoff_cells, int max_iter,
                           double cutoff_tol) {
  if (!(tol > 0.0)) throw Error("relax_bulk: tol must be positive");
  if (cutoff_cells < 1) throw Error("relax_bulk: cutoff_cells must be >= 1");

  auto solve = [&](int cutoff, const Eigen::VectorXd& x0) {
    return newton_minimize(
        x0, [&](const Eigen::VectorXd& x) { return bulk_energy_per_cell(spec, unpack(x), cutoff); },
        [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(bulk_gradient(spec, unpack(x), cutoff)); },
        [&](const Eigen::VectorXd& x) { return Eigen::MatrixXd(bulk_hessian(spec, unpack(x), cutoff)); }, tol,
        max_iter);
  };

  auto nr = solve(cutoff_cells, Eigen::VectorXd::Zero(6));
  if (!nr.converged) {
    Configuration last;
    last.positions = {nr.x.segment<3>(0), nr.x.segment<3>(3)};
    throw MaxIterExceeded("relax_bulk: no convergence, residual " + std::to_string(nr.residual), last,
                          nr.residual);
  }
  auto doubled = solve(2 * cutoff_cells, nr.x);
  const double shift = (doubled.x - nr.x).lpNorm<Eigen::Infinity>();
  if (!doubled.converged || shift > cutoff_tol) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", shift);
    throw NonConvergedCutoff("relax_bulk: doubling cutoff_cells=" + std::to_string(cutoff_cells) +
                             " moves the displacements by " + buf);
  }

  BulkEquilibrium b;
  b.displacement = unpack(nr.x);
  b.cutoff_cells = cutoff_cells;
  b.residual = nr.residual;
  b.iterations = nr.iterations;
  b.relaxed = true;
  Eigen::SelfAdjointEigenSolver<Mat6> es(bulk_hessian(spec, b.displacement, cutoff_cells), Eigen::EigenvaluesOnly);
  b.min_hessian_eigenvalue = es.eigenvalues().minCoeff();
  return b;
}

}  // namespace rydphon
