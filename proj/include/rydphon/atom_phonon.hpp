#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rydphon/phonon_bands.hpp"

namespace rydphon {

/// Overlap form factor of neighbouring Gaussian Wannier functions,
/// 8 pi^2 sin(qd/2) / (4 pi^2 q d - q^3 d^3), with both removable singularities filled in.
double rho0(double q, double d);

/// Where the z offsets in the structure factor exp(-i q rho_z) come from.
enum class RhoZSource { TrapCenters, Relaxed };

std::array<double, 2> rho_z(const ChainSpec& spec, RhoZSource source, const BulkEquilibrium& bulk);

using Vec6cBands = Eigen::Matrix<cplx, kBands, 1>;

/// Dimensionless vertex per sorted band:
/// q rho0(q) / sqrt(omega_j) * sum_alpha |xi_{alpha,z}| exp(-i q rho_alpha^z).
/// The global factor i is dropped. Throws ZeroFrequency if any omega_j <= 0.
Vec6cBands coupling(double q, const Eigen::Matrix<double, kBands, 1>& omega, const Mat6c& xi, double d,
                    const std::array<double, 2>& rho_z);

struct CouplingGrid {
  std::vector<double> q;
  Eigen::MatrixXcd m_complex;  // n_q x 6, sorted band order
  Eigen::MatrixXd m_abs;
  Eigen::VectorXd rho0;
  std::array<double, 2> rho_z{0.0, 0.0};
  RhoZSource rho_z_source = RhoZSource::TrapCenters;

  int n_q() const { return static_cast<int>(q.size()); }
};

CouplingGrid coupling_grid(const BandStructure& bands, RhoZSource source = RhoZSource::TrapCenters);

/// max_q |M| per tracked band label.
BandArray max_abs_tracked(const CouplingGrid& grid, const BandStructure& bands);

inline constexpr double kDefaultCoupledFraction = 0.05;

/// 1-based labels whose max_q |M| reaches `fraction` of the largest one.
std::vector<int> coupled_bands(const BandArray& max_abs, double fraction = kDefaultCoupledFraction);

/// Physical vertex g_cp sqrt(hbar / 2M) * M, in units with hbar = 1 by default.
Eigen::MatrixXcd physical_coupling(const CouplingGrid& grid, double g_cp, double mass, double hbar = 1.0);

std::string to_string(RhoZSource s);

}  // namespace rydphon
