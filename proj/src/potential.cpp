#include "rydphon/potential.hpp"

#include <cmath>
#include <string>

#include "rydphon/errors.hpp"

namespace rydphon {
namespace {

double checked_norm(const Vec3& r) {
  const double n = r.norm();
  if (!(n >= kMinSeparation)) {
    throw CoincidentAtoms("atoms closer than " + std::to_string(kMinSeparation) + " (separation " +
                          std::to_string(n) + ")");
  }
  return n;
}

void check_size(const Configuration& config, const ChainSpec& spec) {
  if (config.n_atoms() != spec.n_atoms()) {
    throw Error("configuration has " + std::to_string(config.n_atoms()) + " atoms, spec expects " +
                std::to_string(spec.n_atoms()));
  }
}

}  // namespace

double pair_energy(const Vec3& r, const Vec3& m_hat, double v_dd) {
  const double n = checked_norm(r);
  const double c = m_hat.dot(r) / n;
  return v_dd / (n * n * n) * (1.0 - 3.0 * c * c);
}

// f = v (r^-3 - 3 c^2 r^-5) with c = m.r (unnormalised)
Vec3 pair_gradient(const Vec3& r, const Vec3& m_hat, double v_dd) {
  const double n = checked_norm(r);
  const double c = m_hat.dot(r);
  const double r2 = n * n;
  const double r5 = r2 * r2 * n;
  const double r7 = r5 * r2;
  return v_dd * ((-3.0 / r5 + 15.0 * c * c / r7) * r - (6.0 * c / r5) * m_hat);
}

Mat3 pair_hessian(const Vec3& r, const Vec3& m_hat, double v_dd) {
  const double n = checked_norm(r);
  const double c = m_hat.dot(r);
  const double r2 = n * n;
  const double r5 = r2 * r2 * n;
  const double r7 = r5 * r2;
  const double r9 = r7 * r2;
  const Mat3 rr = r * r.transpose();
  const Mat3 mm = m_hat * m_hat.transpose();
  const Mat3 mr = m_hat * r.transpose();
  Mat3 h = (-3.0 / r5 + 15.0 * c * c / r7) * Mat3::Identity() + (15.0 / r7 - 105.0 * c * c / r9) * rr -
           (6.0 / r5) * mm + (30.0 * c / r7) * (mr + mr.transpose());
  return v_dd * h;
}

EnergyReport total_energy(const Configuration& config, const ChainSpec& spec) {
  check_size(config, spec);
  const auto centers = trap_centers(spec);
  const Vec3 m = dipole_unit(spec);
  EnergyReport e;
  const Vec3 k = spec.mass * spec.nu.cwiseProduct(spec.nu);
  for (int i = 0; i < config.n_atoms(); ++i) {
    const Vec3 u = config.positions[i] - centers.positions[i];
    e.trap_part += 0.5 * k.dot(u.cwiseProduct(u));
  }
  for (int i = 0; i < config.n_atoms(); ++i) {
    for (int j = i + 1; j < config.n_atoms(); ++j) {
      e.dipole_part += pair_energy(config.positions[i] - config.positions[j], m, spec.v_dd);
    }
  }
  e.total = e.trap_part + e.dipole_part;
  return e;
}

Eigen::VectorXd dipole_gradient(const Configuration& config, const ChainSpec& spec) {
  check_size(config, spec);
  const Vec3 m = dipole_unit(spec);
  const int n = config.n_atoms();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(3 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec3 f = pair_gradient(config.positions[i] - config.positions[j], m, spec.v_dd);
      g.segment<3>(3 * i) += f;
      g.segment<3>(3 * j) -= f;
    }
  }
  return g;
}

Eigen::VectorXd gradient(const Configuration& config, const ChainSpec& spec) {
  Eigen::VectorXd g = dipole_gradient(config, spec);
  const auto centers = trap_centers(spec);
  const Vec3 k = spec.mass * spec.nu.cwiseProduct(spec.nu);
  for (int i = 0; i < config.n_atoms(); ++i) {
    g.segment<3>(3 * i) += k.cwiseProduct(config.positions[i] - centers.positions[i]);
  }
  return g;
}

Eigen::MatrixXd dipole_hessian(const Configuration& config, const ChainSpec& spec) {
  check_size(config, spec);
  const Vec3 m = dipole_unit(spec);
  const int n = config.n_atoms();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Mat3 b = pair_hessian(config.positions[i] - config.positions[j], m, spec.v_dd);
      h.block<3, 3>(3 * i, 3 * i) += b;
      h.block<3, 3>(3 * j, 3 * j) += b;
      h.block<3, 3>(3 * i, 3 * j) -= b;
      h.block<3, 3>(3 * j, 3 * i) -= b;
    }
  }
  return h;
}

Eigen::MatrixXd hessian(const Configuration& config, const ChainSpec& spec) {
  Eigen::MatrixXd h = dipole_hessian(config, spec);
  const Vec3 k = spec.mass * spec.nu.cwiseProduct(spec.nu);
  for (int i = 0; i < config.n_atoms(); ++i) {
    for (int c = 0; c < 3; ++c) h(3 * i + c, 3 * i + c) += k[c];
  }
  return h;
}

Eigen::VectorXd fd_gradient(const Configuration& config, const ChainSpec& spec, double step) {
  const Eigen::VectorXd x0 = config.flattened();
  Eigen::VectorXd g(x0.size());
  for (Eigen::Index k = 0; k < x0.size(); ++k) {
    Eigen::VectorXd xp = x0, xm = x0;
    xp[k] += step;
    xm[k] -= step;
    const double ep = total_energy(Configuration::from_flat(xp), spec).total;
    const double em = total_energy(Configuration::from_flat(xm), spec).total;
    g[k] = (ep - em) / (2.0 * step);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const Configuration& config, const ChainSpec& spec, double step) {
  const Eigen::VectorXd x0 = config.flattened();
  Eigen::MatrixXd h(x0.size(), x0.size());
  for (Eigen::Index k = 0; k < x0.size(); ++k) {
    Eigen::VectorXd xp = x0, xm = x0;
    xp[k] += step;
    xm[k] -= step;
    h.col(k) = (gradient(Configuration::from_flat(xp), spec) - gradient(Configuration::from_flat(xm), spec)) /
               (2.0 * step);
  }
  return h;
}

}  // namespace rydphon
