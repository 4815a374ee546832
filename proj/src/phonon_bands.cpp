#include "rydphon/phonon_bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "rydphon/errors.hpp"
#include "rydphon/potential.hpp"

namespace rydphon {
namespace {

double checked_sqrt(double lambda, const char* where) {
  if (lambda < -kClampWindow) {
    throw ImaginaryFrequency(std::string(where) + ": squared frequency " + std::to_string(lambda) +
                             " is negative (unstable lattice)");
  }
  return lambda < 0.0 ? 0.0 : std::sqrt(lambda);
}

// Deterministic basis of a degenerate eigenspace: project e_0, e_1, ... in order
// and Gram-Schmidt until the subspace is spanned.
void canonicalize_subspace(Mat6c& vecs, int first, int count) {
  const Eigen::Matrix<cplx, kBands, Eigen::Dynamic> basis = vecs.middleCols(first, count);
  int filled = 0;
  for (int k = 0; k < kBands && filled < count; ++k) {
    Vec6c w = basis * basis.row(k).adjoint();  // P e_k with P = V V^+
    for (int j = 0; j < filled; ++j) {
      const Vec6c u = vecs.col(first + j);
      w -= u * u.dot(w);
    }
    const double n = w.norm();
    if (n < 1e-6) continue;
    vecs.col(first + filled) = w / n;
    ++filled;
  }
}

std::array<int, kBands> best_permutation(const Eigen::Matrix<double, kBands, kBands>& overlap) {
  std::array<int, kBands> perm;
  std::iota(perm.begin(), perm.end(), 0);
  std::array<int, kBands> best = perm;
  double best_score = -1.0;
  do {
    double s = 0.0;
    for (int l = 0; l < kBands; ++l) s += overlap(l, perm[l]);
    if (s > best_score + 1e-13) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// overlap(l, s) = |<prev column prev_idx[l] | cur column s>|^2
Eigen::Matrix<double, kBands, kBands> overlaps(const Mat6c& prev, const BandLabels& prev_idx, const Mat6c& cur) {
  Eigen::Matrix<double, kBands, kBands> o;
  for (int l = 0; l < kBands; ++l)
    for (int s = 0; s < kBands; ++s) o(l, s) = std::norm(prev.col(prev_idx[l]).dot(cur.col(s)));
  return o;
}

}  // namespace

Eigen::MatrixXd harmonic_matrix(const Configuration& config, const ChainSpec& spec, bool allow_unrelaxed) {
  if (!config.relaxed && !allow_unrelaxed) {
    throw Error("harmonic_matrix: configuration is not relaxed (pass allow_unrelaxed for a trap-centre expansion)");
  }
  return hessian(config, spec);
}

Mat6c dynamical_matrix(double q, const ChainSpec& spec, const BulkEquilibrium& bulk) {
  const Vec3 m = dipole_unit(spec);
  const auto rho = basis_offsets(spec);
  const double a = spec.period();
  const int cutoff = bulk.cutoff_cells;
  Mat6c dyn = Mat6c::Zero();
  for (int alpha = 0; alpha < 2; ++alpha) {
    for (int c = 0; c < 3; ++c) dyn(3 * alpha + c, 3 * alpha + c) = spec.mass * spec.nu[c] * spec.nu[c];
    const Vec3 r0 = rho[alpha] + bulk.displacement[alpha];
    for (int n = -cutoff; n <= cutoff; ++n) {
      const cplx phase = std::exp(cplx(0.0, q * n * a));
      for (int beta = 0; beta < 2; ++beta) {
        if (n == 0 && beta == alpha) continue;
        const Vec3 rn = Vec3{0.0, 0.0, n * a} + rho[beta] + bulk.displacement[beta];
        const Mat3 b = pair_hessian(r0 - rn, m, spec.v_dd);
        dyn.block<3, 3>(3 * alpha, 3 * alpha) += b.cast<cplx>();
        dyn.block<3, 3>(3 * alpha, 3 * beta) -= phase * b.cast<cplx>();
      }
    }
  }
  return 0.5 * (dyn + dyn.adjoint());
}

std::vector<double> q_grid(const ChainSpec& spec, int q_points) {
  if (q_points < 2) throw Error("q_grid: q_points must be >= 2");
  const double unit = std::numbers::pi / (q_points * spec.period());
  std::vector<double> q(q_points);
  for (int k = 0; k < q_points; ++k) q[k] = (2 * (k + 1) - q_points) * unit;
  return q;
}

void fix_gauge(Vec6c& v) {
  int pivot = std::abs(v[5]) > std::abs(v[2]) ? 5 : 2;
  if (std::abs(v[pivot]) < 1e-12) {
    pivot = 0;
    for (int i = 1; i < kBands; ++i)
      if (std::abs(v[i]) > std::abs(v[pivot]) + 1e-14) pivot = i;
  }
  const double mag = std::abs(v[pivot]);
  if (mag == 0.0) return;
  v *= std::conj(v[pivot]) / mag;
  v[pivot] = cplx(std::abs(v[pivot]), 0.0);
}

BlochModes diagonalize_bloch(const Mat6c& dyn, double mass) {
  Eigen::SelfAdjointEigenSolver<Mat6c> es(dyn / mass);
  if (es.info() != Eigen::Success) throw Error("diagonalize_bloch: eigensolver failed");
  BlochModes out;
  out.xi = es.eigenvectors();
  const auto& lam = es.eigenvalues();
  for (int j = 0; j < kBands;) {
    int k = j + 1;
    while (k < kBands && lam[k] - lam[j] < kDegeneracyTol) ++k;
    if (k - j > 1) canonicalize_subspace(out.xi, j, k - j);
    j = k;
  }
  for (int j = 0; j < kBands; ++j) {
    out.omega[j] = checked_sqrt(lam[j], "band_structure");
    Vec6c v = out.xi.col(j);
    fix_gauge(v);
    out.xi.col(j) = v;
  }
  return out;
}

std::vector<BandLabels> track_bands(const std::vector<double>& q, const std::vector<Mat6c>& xi) {
  const int nq = static_cast<int>(q.size());
  std::vector<BandLabels> t(nq);
  if (nq == 0) return t;
  BandLabels identity;
  std::iota(identity.begin(), identity.end(), 0);

  int anchor = -1;
  for (int k = 0; k < nq; ++k) {
    if (q[k] > 0.0) {
      anchor = k;
      break;
    }
  }
  if (anchor < 0) {
    for (auto& row : t) row = identity;
    return t;
  }
  t[anchor] = identity;
  for (int k = anchor + 1; k < nq; ++k) t[k] = best_permutation(overlaps(xi[k - 1], t[k - 1], xi[k]));

  // Left half: xi(-q) = conj(xi(q)) up to gauge, so match against the mirrored point.
  for (int k = anchor - 1; k >= 0; --k) {
    const double target = -q[k];
    int mirror = -1;
    double best = 1e-9 * std::max(1.0, std::abs(target));
    for (int p = anchor; p < nq; ++p) {
      if (std::abs(q[p] - target) < best) {
        best = std::abs(q[p] - target);
        mirror = p;
      }
    }
    if (mirror < 0) {
      t[k] = best_permutation(overlaps(xi[k + 1], t[k + 1], xi[k]));
    } else {
      const Mat6c mirrored = xi[mirror].conjugate();
      t[k] = best_permutation(overlaps(mirrored, t[mirror], xi[k]));
    }
  }
  return t;
}

BandStructure band_structure(const ChainSpec& spec, const BulkEquilibrium& bulk, int q_points,
                             Equilibrium equilibrium) {
  spec.validate();
  BandStructure bs;
  bs.q = q_grid(spec, q_points);
  bs.spec = spec;
  bs.bulk = bulk;
  bs.equilibrium = equilibrium;
  bs.omega.resize(q_points, kBands);
  bs.xi.resize(q_points);
  for (int k = 0; k < q_points; ++k) {
    const BlochModes modes = diagonalize_bloch(dynamical_matrix(bs.q[k], spec, bulk), spec.mass);
    bs.omega.row(k) = modes.omega.transpose();
    bs.xi[k] = modes.xi;
  }
  bs.tracked = track_bands(bs.q, bs.xi);
  return bs;
}

BandStructure band_structure(const ChainSpec& spec, int q_points, int cutoff_cells, Equilibrium equilibrium) {
  const BulkEquilibrium bulk = equilibrium == Equilibrium::Relaxed ? relax_bulk(spec, kDefaultRelaxTol, cutoff_cells)
                                                                   : bulk_trap_centers(spec, cutoff_cells);
  return band_structure(spec, bulk, q_points, equilibrium);
}

bool BandDiagnostics::has_crossing(int j, int k) const {
  if (j > k) std::swap(j, k);
  return std::any_of(crossings.begin(), crossings.end(),
                     [&](const Crossing& c) { return c.band == j && c.other == k; });
}

BandDiagnostics band_diagnostics(const BandStructure& bands) {
  BandDiagnostics out;
  const int nq = bands.n_q();
  if (nq == 0) return out;

  for (int j = 0; j < kBands; ++j)
    out.bandwidth[j] = bands.omega.col(j).maxCoeff() - bands.omega.col(j).minCoeff();

  const double scale = std::max(1.0, bands.omega.cwiseAbs().maxCoeff());
  for (int l = 0; l < kBands; ++l) {
    for (int l2 = l + 1; l2 < kBands; ++l2) {
      int last_sign = 0;
      double last_q = 0.0, last_diff = 0.0;
      for (int k = 0; k < nq; ++k) {
        const double diff = bands.tracked_omega(k, l) - bands.tracked_omega(k, l2);
        const int sign = std::abs(diff) <= 1e-9 * scale ? 0 : (diff > 0.0 ? 1 : -1);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) {
          const double w = last_diff / (last_diff - diff);
          out.crossings.push_back({l + 1, l2 + 1, last_q + w * (bands.q[k] - last_q)});
        }
        last_sign = sign;
        last_q = bands.q[k];
        last_diff = diff;
      }
    }
  }
  std::sort(out.crossings.begin(), out.crossings.end(), [](const Crossing& x, const Crossing& y) {
    if (x.band != y.band) return x.band < y.band;
    if (x.other != y.other) return x.other < y.other;
    return x.q < y.q;
  });

  if (nq >= 3) {
    int k0 = 0;
    for (int k = 1; k < nq; ++k)
      if (std::abs(bands.q[k]) < std::abs(bands.q[k0]) - 1e-15) k0 = k;
    const int km = (k0 + nq - 1) % nq, kp = (k0 + 1) % nq;
    const double dq = 2.0 * std::numbers::pi / (nq * bands.spec.period());
    for (int j = 0; j < kBands; ++j) {
      const double second = bands.omega(km, j) - 2.0 * bands.omega(k0, j) + bands.omega(kp, j);
      out.curvature[j] = second / (dq * dq);
      out.concavity[j] = std::abs(second) <= 1e-13 * scale ? 0 : (second > 0.0 ? 1 : -1);
    }
  }
  return out;
}

std::vector<BandInterval> band_envelopes(const BandStructure& bands) {
  std::vector<BandInterval> env(kBands);
  for (int j = 0; j < kBands; ++j) env[j] = {bands.omega.col(j).minCoeff(), bands.omega.col(j).maxCoeff()};
  return env;
}

int EdgeFlags::count() const { return static_cast<int>(std::count(edge.begin(), edge.end(), true)); }

Eigen::VectorXd inverse_participation(const Eigen::MatrixXd& modes) {
  const int n_atoms = static_cast<int>(modes.rows()) / 3;
  Eigen::VectorXd ipr = Eigen::VectorXd::Zero(modes.cols());
  for (int c = 0; c < modes.cols(); ++c) {
    const double norm2 = modes.col(c).squaredNorm();
    for (int n = 0; n < n_atoms; ++n) {
      const double w = modes.col(c).segment<3>(3 * n).squaredNorm() / norm2;
      ipr[c] += w * w;
    }
  }
  return ipr;
}

EdgeFlags detect_edge_modes(const Eigen::MatrixXd& modes, const Eigen::VectorXd& frequencies,
                            const std::vector<BandInterval>& band_gaps, const EdgeCriteria& criteria) {
  if (modes.cols() != frequencies.size() || modes.rows() % 3 != 0)
    throw Error("detect_edge_modes: modes and frequencies have inconsistent sizes");
  const int n_modes = static_cast<int>(frequencies.size());
  const double n_atoms = static_cast<double>(modes.rows() / 3);
  EdgeFlags f;
  f.ipr = inverse_participation(modes);
  f.edge.assign(n_modes, false);
  f.adjacent_band.assign(n_modes, 0);
  for (int c = 0; c < n_modes; ++c) {
    const double w = frequencies[c];
    bool in_band = false;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < band_gaps.size(); ++b) {
      const auto& iv = band_gaps[b];
      const double dist = w < iv.lo ? iv.lo - w : (w > iv.hi ? w - iv.hi : 0.0);
      if (dist <= criteria.gap_tol) in_band = true;
      if (dist < nearest) {
        nearest = dist;
        f.adjacent_band[c] = static_cast<int>(b) + 1;
      }
    }
    f.edge[c] = !in_band && f.ipr[c] >= criteria.ipr_factor / n_atoms;
  }
  return f;
}

Eigen::VectorXd normal_mode_frequencies(const Eigen::MatrixXd& d, double mass) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d / mass, Eigen::EigenvaluesOnly);
  Eigen::VectorXd w(es.eigenvalues().size());
  for (int i = 0; i < w.size(); ++i) w[i] = checked_sqrt(es.eigenvalues()[i], "finite_spectrum");
  return w;
}

FiniteSpectrum finite_spectrum(const ChainSpec& spec, Equilibrium equilibrium,
                               const std::vector<BandInterval>& bulk_bands, const EdgeCriteria& criteria) {
  spec.validate();
  FiniteSpectrum fs;
  if (equilibrium == Equilibrium::Relaxed) {
    fs.config = relax_finite(spec).config;
  } else {
    fs.config = trap_centers(spec);
  }
  const Eigen::MatrixXd d = harmonic_matrix(fs.config, spec, equilibrium == Equilibrium::TrapCenters);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d / spec.mass);
  if (es.info() != Eigen::Success) throw Error("finite_spectrum: eigensolver failed");
  fs.frequencies.resize(d.rows());
  for (int i = 0; i < d.rows(); ++i) fs.frequencies[i] = checked_sqrt(es.eigenvalues()[i], "finite_spectrum");
  fs.modes = es.eigenvectors();
  fs.edges = detect_edge_modes(fs.modes, fs.frequencies, bulk_bands, criteria);
  return fs;
}

FiniteSpectrum finite_spectrum(const ChainSpec& spec, Equilibrium equilibrium, const EdgeCriteria& criteria) {
  const BandStructure bands = band_structure(spec, kDefaultQPoints, kDefaultCutoffCells, equilibrium);
  return finite_spectrum(spec, equilibrium, band_envelopes(bands), criteria);
}

}  // namespace rydphon
