#pragma once

#include <array>
#include <vector>

#include "rydphon/errors.hpp"
#include "rydphon/geometry.hpp"

namespace rydphon {

/// Where the harmonic expansion is taken.
enum class Equilibrium { TrapCenters, Relaxed };

inline constexpr double kDefaultRelaxTol = 1e-10;
inline constexpr int kDefaultMaxIter = 200;
inline constexpr int kDefaultCutoffCells = 32;

class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(const std::string& what, Configuration last, double residual)
      : Error(what), last_(std::move(last)), residual_(residual) {}
  const Configuration& last_iterate() const noexcept { return last_; }
  double residual() const noexcept { return residual_; }

 private:
  Configuration last_;
  double residual_;
};

struct FiniteRelaxation {
  Configuration config;
  int iterations = 0;
  /// Smallest eigenvalue of the Hessian at the returned configuration.
  double min_hessian_eigenvalue = 0.0;
  /// Set when the stationary point is not a minimum; not an error.
  bool unstable = false;
  /// Energy after each accepted step, starting with the initial guess.
  std::vector<double> energies;
};

/// Newton relaxation of the finite chain from the trap centres.
FiniteRelaxation relax_finite(const ChainSpec& spec, double tol = kDefaultRelaxTol,
                              int max_iter = kDefaultMaxIter);

/// Translationally repeated displacement u_{n,alpha} = delta_alpha of the infinite chain.
struct BulkEquilibrium {
  std::array<Vec3, 2> displacement{Vec3::Zero(), Vec3::Zero()};
  int cutoff_cells = kDefaultCutoffCells;
  double residual = 0.0;
  int iterations = 0;
  bool relaxed = false;
  double min_hessian_eigenvalue = 0.0;
};

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Energy per cell (traps + half of every pair involving the reference cell) and its derivatives.
double bulk_energy_per_cell(const ChainSpec& spec, const std::array<Vec3, 2>& disp, int cutoff_cells);
Vec6 bulk_gradient(const ChainSpec& spec, const std::array<Vec3, 2>& disp, int cutoff_cells);
Mat6 bulk_hessian(const ChainSpec& spec, const std::array<Vec3, 2>& disp, int cutoff_cells);

/// Truncated lattice sums converge as cutoff^-4 in the displacements.
inline constexpr double kDefaultCutoffTol = 1e-6;

/// Solves the 6-dimensional stationarity problem with sums over |n| <= cutoff_cells.
/// Throws NonConvergedCutoff when re-solving at 2*cutoff_cells moves the
/// displacements by more than cutoff_tol.
BulkEquilibrium relax_bulk(const ChainSpec& spec, double tol = kDefaultRelaxTol,
                           int cutoff_cells = kDefaultCutoffCells, int max_iter = kDefaultMaxIter,
                           double cutoff_tol = kDefaultCutoffTol);

/// Zero displacement bulk reference, used in trap-centre mode.
BulkEquilibrium bulk_trap_centers(const ChainSpec& spec, int cutoff_cells = kDefaultCutoffCells);

}  // namespace rydphon
