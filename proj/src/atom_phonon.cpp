#include "rydphon/atom_phonon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rydphon/errors.hpp"

namespace rydphon {

double rho0(double q, double d) {
  constexpr double pi = std::numbers::pi;
  constexpr double kSeriesWindow = 1e-4;
  const double x = std::abs(q * d);
  if (x < kSeriesWindow) return 1.0 + x * x * (1.0 / (4.0 * pi * pi) - 1.0 / 24.0);
  const double eps = x - 2.0 * pi;
  if (std::abs(eps) < kSeriesWindow) {
    const double sinc_half = 0.5 * (1.0 - eps * eps / 24.0);  // sin(eps/2)/eps
    return 8.0 * pi * pi * sinc_half / ((2.0 * pi + eps) * (4.0 * pi + eps));
  }
  return 8.0 * pi * pi * std::sin(0.5 * x) / (x * (4.0 * pi * pi - x * x));
}

std::array<double, 2> rho_z(const ChainSpec& spec, RhoZSource source, const BulkEquilibrium& bulk) {
  const auto rho = basis_offsets(spec);
  std::array<double, 2> z{rho[0].z(), rho[1].z()};
  if (source == RhoZSource::Relaxed) {
    z[0] += bulk.displacement[0].z();
    z[1] += bulk.displacement[1].z();
  }
  return z;
}

Vec6cBands coupling(double q, const Eigen::Matrix<double, kBands, 1>& omega, const Mat6c& xi, double d,
                    const std::array<double, 2>& rz) {
  const double pre = q * rho0(q, d);
  const cplx phase_a = std::exp(cplx(0.0, -q * rz[0]));
  const cplx phase_b = std::exp(cplx(0.0, -q * rz[1]));
  Vec6cBands m;
  for (int j = 0; j < kBands; ++j) {
    if (!(omega[j] > 0.0)) {
      throw ZeroFrequency("coupling: band " + std::to_string(j + 1) + " has omega = " + std::to_string(omega[j]) +
                          " at q = " + std::to_string(q));
    }
    const cplx s = std::abs(xi(2, j)) * phase_a + std::abs(xi(5, j)) * phase_b;
    m[j] = pre / std::sqrt(omega[j]) * s;
  }
  return m;
}

CouplingGrid coupling_grid(const BandStructure& bands, RhoZSource source) {
  CouplingGrid g;
  const int nq = bands.n_q();
  g.q = bands.q;
  g.rho_z_source = source;
  g.rho_z = rho_z(bands.spec, source, bands.bulk);
  g.m_complex.resize(nq, kBands);
  g.m_abs.resize(nq, kBands);
  g.rho0.resize(nq);
  for (int k = 0; k < nq; ++k) {
    const Eigen::Matrix<double, kBands, 1> w = bands.omega.row(k).transpose();
    const Vec6cBands m = coupling(g.q[k], w, bands.xi[k], bands.spec.d, g.rho_z);
    g.m_complex.row(k) = m.transpose();
    g.m_abs.row(k) = m.cwiseAbs().transpose();
    g.rho0[k] = rho0(g.q[k], bands.spec.d);
  }
  return g;
}

BandArray max_abs_tracked(const CouplingGrid& grid, const BandStructure& bands) {
  if (grid.n_q() != bands.n_q()) throw Error("max_abs_tracked: coupling and band grids differ");
  BandArray out{};
  for (int k = 0; k < grid.n_q(); ++k)
    for (int l = 0; l < kBands; ++l) out[l] = std::max(out[l], grid.m_abs(k, bands.tracked[k][l]));
  return out;
}

std::vector<int> coupled_bands(const BandArray& max_abs, double fraction) {
  const double top = *std::max_element(max_abs.begin(), max_abs.end());
  std::vector<int> out;
  if (!(top > 0.0)) return out;
  for (int l = 0; l < kBands; ++l)
    if (max_abs[l] >= fraction * top) out.push_back(l + 1);
  return out;
}

Eigen::MatrixXcd physical_coupling(const CouplingGrid& grid, double g_cp, double mass, double hbar) {
  if (!(mass > 0.0) || !(hbar > 0.0)) throw Error("physical_coupling: mass and hbar must be positive");
  return grid.m_complex * (g_cp * std::sqrt(hbar / (2.0 * mass)));
}

std::string to_string(RhoZSource s) { return s == RhoZSource::Relaxed ? "relaxed" : "trap_centers"; }

}  // namespace rydphon
