#pragma once

#include <Eigen/Dense>

#include "rydphon/geometry.hpp"

namespace rydphon {

/// Pairs closer than this raise CoincidentAtoms.
inline constexpr double kMinSeparation = 1e-9;

struct EnergyReport {
  double total = 0.0;
  double trap_part = 0.0;
  double dipole_part = 0.0;
};

/// v_dd / |r|^3 * (1 - 3 (m.r^)^2).
double pair_energy(const Vec3& r, const Vec3& m_hat, double v_dd);
/// Gradient of pair_energy with respect to r.
Vec3 pair_gradient(const Vec3& r, const Vec3& m_hat, double v_dd);
/// Second derivatives of pair_energy with respect to r.
Mat3 pair_hessian(const Vec3& r, const Vec3& m_hat, double v_dd);

// Whole-chain potential: harmonic traps centred on trap_centers(spec) plus the
// dipolar pair sum, each unordered pair counted once. Coordinates are ordered
// (flat atom index, x/y/z).

EnergyReport total_energy(const Configuration& config, const ChainSpec& spec);
Eigen::VectorXd gradient(const Configuration& config, const ChainSpec& spec);
/// Dipolar forces only (no trap term); sums to zero over atoms.
Eigen::VectorXd dipole_gradient(const Configuration& config, const ChainSpec& spec);
Eigen::MatrixXd hessian(const Configuration& config, const ChainSpec& spec);
/// Dipolar part of the Hessian only.
Eigen::MatrixXd dipole_hessian(const Configuration& config, const ChainSpec& spec);

/// Central differences of total_energy.
Eigen::VectorXd fd_gradient(const Configuration& config, const ChainSpec& spec, double step);
/// Central differences of the analytic gradient (column k = d grad / d x_k).
Eigen::MatrixXd fd_hessian(const Configuration& config, const ChainSpec& spec, double step);

}  // namespace rydphon
