#include "rydphon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rydphon/errors.hpp"

namespace rydphon {

void ChainSpec::validate() const {
  if (n_cells < 2) throw ConfigError("n_cells", "must be >= 2");
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("d", "must be a positive finite number");
  if (!std::isfinite(delta)) throw ConfigError("delta", "must be finite");
  if (a && (!(*a > 0.0) || !std::isfinite(*a))) throw ConfigError("a", "must be a positive finite number");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw ConfigError("theta", "must lie in [0, pi]");
  if (!std::isfinite(phi)) throw ConfigError("phi", "must be finite");
  for (int i = 0; i < 3; ++i) {
    if (!(nu[i] > 0.0) || !std::isfinite(nu[i])) throw ConfigError("nu", "components must be positive");
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("mass", "must be positive");
  if (!(v_dd >= 0.0) || !std::isfinite(v_dd)) throw ConfigError("v_dd", "must be >= 0");
}

Eigen::VectorXd Configuration::flattened() const {
  Eigen::VectorXd x(3 * positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) x.segment<3>(3 * k) = positions[k];
  return x;
}

Configuration Configuration::from_flat(const Eigen::VectorXd& x) {
  Configuration c;
  c.positions.resize(x.size() / 3);
  for (std::size_t k = 0; k < c.positions.size(); ++k) c.positions[k] = x.segment<3>(3 * k);
  return c;
}

Vec3 dipole_unit(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

std::array<Vec3, 2> basis_offsets(const ChainSpec& spec) {
  const double hx = 0.5 * spec.delta;
  const double hz = 0.5 * spec.d;
  // trivial: rho_{A,B} = -/+ delta/2 x -/+ d/2 z ; topological flips the z sign
  const double sz = spec.topology == Topology::Trivial ? 1.0 : -1.0;
  return {Vec3{-hx, 0.0, -sz * hz}, Vec3{hx, 0.0, sz * hz}};
}

Configuration trap_centers(const ChainSpec& spec) {
  const auto rho = basis_offsets(spec);
  const double a = spec.period();
  Configuration c;
  c.positions.reserve(spec.n_atoms());
  for (int n = 0; n < spec.n_cells; ++n) {
    for (int alpha = 0; alpha < kBasesPerCell; ++alpha) {
      c.positions.push_back(Vec3{0.0, 0.0, n * a} + rho[alpha]);
    }
  }
  return c;
}

std::vector<int> chain_order(const ChainSpec& spec) {
  const auto centers = trap_centers(spec);
  std::vector<int> order(centers.positions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return centers.positions[i].z() < centers.positions[j].z();
  });
  return order;
}

}  // namespace rydphon
