#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rydphon/equilibrium.hpp"
#include "rydphon/geometry.hpp"

namespace rydphon {

inline constexpr int kBands = 3 * kBasesPerCell;
inline constexpr int kDefaultQPoints = 256;
/// Squared frequencies in [-kClampWindow, 0) are clamped to zero; below is an error.
inline constexpr double kClampWindow = 1e-12;
inline constexpr double kDegeneracyTol = 1e-10;

using cplx = std::complex<double>;
using Mat6c = Eigen::Matrix<cplx, kBands, kBands>;
using Vec6c = Eigen::Matrix<cplx, kBands, 1>;
using BandArray = std::array<double, kBands>;
using BandLabels = std::array<int, kBands>;

/// The second-derivative matrix at `config`. Refuses unrelaxed configurations
/// unless `allow_unrelaxed` is set (trap-centre expansion).
Eigen::MatrixXd harmonic_matrix(const Configuration& config, const ChainSpec& spec, bool allow_unrelaxed = false);

/// Bloch sum D(q) = sum_n D(0 alpha; n beta) exp(i q n a) over |n| <= bulk.cutoff_cells,
/// at the translationally repeated displacement of `bulk`. Components are ordered (alpha, x/y/z).
Mat6c dynamical_matrix(double q, const ChainSpec& spec, const BulkEquilibrium& bulk);

/// Uniform grid over (-pi/a, pi/a]; q = 0 is exactly representable for even q_points.
std::vector<double> q_grid(const ChainSpec& spec, int q_points);

/// Frequencies (ascending) and gauge-fixed polarisation vectors of one Hermitian 6x6 matrix divided by mass.
struct BlochModes {
  Eigen::Matrix<double, kBands, 1> omega;
  Mat6c xi;  // column j is band j
};
BlochModes diagonalize_bloch(const Mat6c& dyn, double mass);

/// Polarisation gauge: the larger-modulus z component is made real and nonnegative
/// (largest component overall when the mode has no z weight).
void fix_gauge(Vec6c& v);

struct BandStructure {
  std::vector<double> q;
  Eigen::MatrixXd omega;    // n_q x 6, ascending in each row
  std::vector<Mat6c> xi;    // per q, columns follow omega's order
  /// tracked[k][label] = sorted index at q[k] of the band followed by eigenvector overlap.
  /// Labels are the sorted order at the smallest positive q.
  std::vector<BandLabels> tracked;
  ChainSpec spec;
  BulkEquilibrium bulk;
  Equilibrium equilibrium = Equilibrium::TrapCenters;

  int n_q() const { return static_cast<int>(q.size()); }
  int cutoff_cells() const { return bulk.cutoff_cells; }
  double tracked_omega(int k, int label) const { return omega(k, tracked[k][label]); }
  Vec6c tracked_xi(int k, int label) const { return xi[k].col(tracked[k][label]); }
};

BandStructure band_structure(const ChainSpec& spec, const BulkEquilibrium& bulk, int q_points = kDefaultQPoints,
                             Equilibrium equilibrium = Equilibrium::TrapCenters);
/// Convenience entry: resolves the bulk reference (trap centres or relax_bulk) first.
BandStructure band_structure(const ChainSpec& spec, int q_points = kDefaultQPoints,
                             int cutoff_cells = kDefaultCutoffCells, Equilibrium equilibrium = Equilibrium::TrapCenters);

/// Overlap-continuity labels for a sequence of Bloch eigenvector sets on a symmetric grid.
std::vector<BandLabels> track_bands(const std::vector<double>& q, const std::vector<Mat6c>& xi);

struct Crossing {
  int band = 0;   // tracked labels, 1-based, band < other
  int other = 0;
  double q = 0.0;
};

struct BandDiagnostics {
  std::vector<Crossing> crossings;
  /// Sign of the second difference at q = 0, per sorted band: +1 convex, -1 concave, 0 flat.
  std::array<int, kBands> concavity{};
  BandArray curvature{};
  BandArray bandwidth{};

  bool has_crossing(int j, int k) const;
};

BandDiagnostics band_diagnostics(const BandStructure& bands);

struct BandInterval {
  double lo = 0.0;
  double hi = 0.0;
};
/// [min, max] of each sorted band over the grid.
std::vector<BandInterval> band_envelopes(const BandStructure& bands);

struct EdgeCriteria {
  /// A mode is localised when IPR >= ipr_factor / N_atoms.
  double ipr_factor = 4.0;
  /// Frequencies within gap_tol of a bulk band count as inside it.
  double gap_tol = 1e-6;
};

struct EdgeFlags {
  Eigen::VectorXd ipr;
  std::vector<bool> edge;
  /// 1-based sorted bulk band nearest to each mode.
  std::vector<int> adjacent_band;
  int count() const;
};

/// Per-atom inverse participation ratio sum_n (sum_i v_{n,i}^2)^2 of each column.
Eigen::VectorXd inverse_participation(const Eigen::MatrixXd& modes);

EdgeFlags detect_edge_modes(const Eigen::MatrixXd& modes, const Eigen::VectorXd& frequencies,
                            const std::vector<BandInterval>& band_gaps, const EdgeCriteria& criteria = {});

struct FiniteSpectrum {
  Eigen::VectorXd frequencies;  // ascending
  Eigen::MatrixXd modes;        // orthonormal columns
  EdgeFlags edges;
  Configuration config;
};

FiniteSpectrum finite_spectrum(const ChainSpec& spec, Equilibrium equilibrium,
                               const std::vector<BandInterval>& bulk_bands, const EdgeCriteria& criteria = {});
/// Computes the bulk envelopes with the default grid first.
FiniteSpectrum finite_spectrum(const ChainSpec& spec, Equilibrium equilibrium = Equilibrium::TrapCenters,
                               const EdgeCriteria& criteria = {});

/// sqrt of the eigenvalues of a symmetric matrix divided by mass, ascending, with the clamp rule.
Eigen::VectorXd normal_mode_frequencies(const Eigen::MatrixXd& d, double mass);

}  // namespace rydphon
