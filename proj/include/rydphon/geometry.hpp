#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace rydphon {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Topology { Trivial, Topological };
enum class Base { A = 0, B = 1 };

inline constexpr int kBasesPerCell = 2;

/// Dipole tilt that zeroes the angular factor for bonds along z.
inline double magic_angle() { return std::acos(1.0 / std::sqrt(3.0)); }

/// Zig-zag tweezer chain. Lengths in units of l, where l^5 = 3 V_dd / (M nu^2).
struct ChainSpec {
  int n_cells = 7;
  double d = 2.0;
  double delta = 1.0;
  /// Cell period along z. Unset means 2d (and keeps following d in sweeps).
  std::optional<double> a;
  double theta = magic_angle();
  double phi = 0.0;
  Topology topology = Topology::Trivial;
  Vec3 nu = Vec3::Ones();
  double mass = 1.0;
  double v_dd = 1.0 / 3.0;

  double period() const { return a.value_or(2.0 * d); }
  int n_atoms() const { return kBasesPerCell * n_cells; }
  int n_dof() const { return 3 * n_atoms(); }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  bool operator==(const ChainSpec&) const = default;
};

/// (cell, base) label of an atom; flat index k = 2 * cell + base.
struct AtomIndex {
  int cell = 0;
  Base base = Base::A;

  int flat() const { return kBasesPerCell * cell + static_cast<int>(base); }
  static AtomIndex from_flat(int k) {
    return {k / kBasesPerCell, k % kBasesPerCell == 0 ? Base::A : Base::B};
  }
  bool operator==(const AtomIndex&) const = default;
};

/// Atom positions, flat-indexed as in AtomIndex.
struct Configuration {
  std::vector<Vec3> positions;
  double residual_inf_norm = 0.0;
  bool relaxed = false;

  int n_atoms() const { return static_cast<int>(positions.size()); }
  Eigen::VectorXd flattened() const;
  static Configuration from_flat(const Eigen::VectorXd& x);
};

/// Unit dipole axis m = (sin t cos p, sin t sin p, cos t).
Vec3 dipole_unit(double theta, double phi);
inline Vec3 dipole_unit(const ChainSpec& spec) { return dipole_unit(spec.theta, spec.phi); }

/// In-cell offsets rho_A, rho_B for the spec's topology.
std::array<Vec3, 2> basis_offsets(const ChainSpec& spec);

/// Unrelaxed configuration R_{n,alpha} = n a z + rho_alpha.
Configuration trap_centers(const ChainSpec& spec);

/// Flat indices sorted by position along the chain (z). For the trivial
/// topology this is the identity; for the topological one B precedes A in each cell.
std::vector<int> chain_order(const ChainSpec& spec);

}  // namespace rydphon
