#include "rydphon/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rydphon/config.hpp"
#include "rydphon/csv_export.hpp"
#include "rydphon/errors.hpp"
#include "rydphon/model_export.hpp"
#include "rydphon/pipeline.hpp"
#include "rydphon/potential.hpp"

namespace rydphon {
namespace {

struct Args {
  std::string config;
  bool relax = false;
  bool no_relax = false;
  int q_points = kDefaultQPoints;
  int cutoff_cells = kDefaultCutoffCells;
  std::string out = "-";
  std::string out_g = "-";
  std::string out_j = "-";
  std::string rho_z = "trap_centers";
  double ipr_factor = 4.0;
  std::string param = "d";
  double from = 1.5;
  double to = 2.5;
  int steps = 21;
  double t = 1.0;
  double U = 0.0;
  double gcp = 1.0;
};

// Writes to `fallback` for "-" and to a file otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& get() { return *os_; }
  bool is_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

RunOptions options_from(const Args& a) {
  RunOptions o;
  if (a.relax && a.no_relax) throw ConfigError("--relax", "conflicts with --no-relax");
  o.equilibrium = a.relax ? Equilibrium::Relaxed : Equilibrium::TrapCenters;
  if (a.q_points < 2) throw ConfigError("--q-points", "must be >= 2");
  o.q_points = a.q_points;
  if (a.cutoff_cells < 1) throw ConfigError("--cutoff-cells", "must be >= 1");
  o.cutoff_cells = a.cutoff_cells;
  if (a.rho_z == "trap_centers") {
    o.rho_z_source = RhoZSource::TrapCenters;
  } else if (a.rho_z == "relaxed") {
    o.rho_z_source = RhoZSource::Relaxed;
  } else {
    throw ConfigError("--rho-z", "expected trap_centers or relaxed");
  }
  if (!(a.ipr_factor > 0.0)) throw ConfigError("--ipr-factor", "must be positive");
  o.edge.ipr_factor = a.ipr_factor;
  return o;
}

int cmd_bands(const Args& a, std::ostream& out, std::ostream& err) {
  const ChainSpec spec = load_chain_spec(a.config);
  const RunOptions opts = options_from(a);
  const BandStructure bands = compute_bands(spec, opts);
  Sink sink(a.out, out);
  write_bands_csv(sink.get(), bands, csv_header("bands", spec, opts));
  std::ostream& report = sink.is_file() ? out : err;
  const BandDiagnostics diag = band_diagnostics(bands);
  report << "bands: " << bands.n_q() << " q points, " << diag.crossings.size() << " crossings\n";
  for (const Crossing& c : diag.crossings)
    report << "crossing " << c.band << " " << c.other << " q=" << format_double(c.q) << "\n";
  for (int j = 0; j < kBands; ++j) {
    report << "band " << j + 1 << " bandwidth=" << format_double(diag.bandwidth[j])
           << " concavity=" << diag.concavity[j] << "\n";
  }
  return kExitOk;
}

int cmd_spectrum(const Args& a, std::ostream& out, std::ostream& err) {
  const ChainSpec spec = load_chain_spec(a.config);
  const RunOptions opts = options_from(a);
  const FiniteSpectrum s = compute_spectrum(spec, opts);
  Sink sink(a.out, out);
  write_spectrum_csv(sink.get(), s, csv_header("spectrum", spec, opts));
  std::ostream& report = sink.is_file() ? out : err;
  report << "spectrum: " << s.frequencies.size() << " modes, " << s.edges.count() << " edge modes\n";
  for (int i = 0; i < s.frequencies.size(); ++i) {
    if (!s.edges.edge[i]) continue;
    report << "edge mode " << i << " omega=" << format_double(s.frequencies[i])
           << " ipr=" << format_double(s.edges.ipr[i]) << " adjacent_band=" << s.edges.adjacent_band[i] << "\n";
  }
  return kExitOk;
}

int cmd_local(const Args& a, std::ostream& out, std::ostream&) {
  const ChainSpec spec = load_chain_spec(a.config);
  const RunOptions opts = options_from(a);
  const LocalPhononModel m = local_phonon_model(spec, opts.equilibrium);
  {
    Sink g(a.out_g, out);
    write_g_csv(g.get(), m.g, csv_header("local_g", spec, opts));
  }
  Sink j(a.out_j, out);
  write_j_csv(j.get(), m.J, csv_header("local_J", spec, opts));
  return kExitOk;
}

int cmd_coupling(const Args& a, std::ostream& out, std::ostream& err) {
  const ChainSpec spec = load_chain_spec(a.config);
  const RunOptions opts = options_from(a);
  const BandStructure bands = compute_bands(spec, opts);
  const CouplingGrid grid = coupling_grid(bands, opts.rho_z_source);
  Sink sink(a.out, out);
  write_coupling_csv(sink.get(), grid, bands, csv_header("coupling", spec, opts));
  std::ostream& report = sink.is_file() ? out : err;
  const BandArray mx = max_abs_tracked(grid, bands);
  const std::vector<int> coupled = coupled_bands(mx, opts.coupled_fraction);
  report << "coupling: " << coupled.size() << " coupled bands:";
  for (int l : coupled) report << " " << l;
  report << "\n";
  for (int l = 0; l < kBands; ++l) report << "band " << l + 1 << " max_abs_m=" << format_double(mx[l]) << "\n";
  return kExitOk;
}

int cmd_sweep(const Args& a, std::ostream& out, std::ostream& err) {
  const ChainSpec spec = load_chain_spec(a.config);
  const RunOptions opts = options_from(a);
  const auto& names = sweep_parameters();
  if (std::find(names.begin(), names.end(), a.param) == names.end())
    throw ConfigError("--param", "cannot sweep '" + a.param + "'");
  const std::vector<double> values = sweep_values(a.from, a.to, a.steps);
  const std::vector<SweepPoint> points = run_sweep(spec, a.param, values, opts, sweep_threads());
  Sink sink(a.out, out);
  write_sweep_csv(sink.get(), a.param, points, csv_header("sweep", spec, opts) + " param=" + a.param);
  std::ostream& report = sink.is_file() ? out : err;
  int failed = 0;
  for (const SweepPoint& p : points) {
    if (p.status == "ok") continue;
    ++failed;
    report << a.param << "=" << format_double(p.value) << ": " << p.status << ": " << p.message << "\n";
  }
  report << "sweep: " << points.size() << " points, " << failed << " failed\n";
  return kExitOk;
}

int cmd_export(const Args& a, std::ostream& out, std::ostream& err) {
  const ChainSpec spec = load_chain_spec(a.config);
  const RunOptions opts = options_from(a);
  const ExtendedHHModel m = assemble(spec, a.t, a.U, a.gcp, opts);
  const std::string text = serialize(m);
  Sink sink(a.out, out);
  sink.get() << text;
  if (sink.is_file()) out << "model: " << m.bands.n_q() << " q points, hash " << std::hex << fnv1a64(text) << std::dec << "\n";
  else err << "model: " << m.bands.n_q() << " q points\n";
  return kExitOk;
}

// ---- self-check ----------------------------------------------------------

struct CheckResult {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

CheckResult bound(double err, double tol) { return {err < tol, "max error " + sci(err) + " (tol " + sci(tol) + ")"}; }

std::vector<Configuration> perturbed(const ChainSpec& spec, int count) {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::vector<Configuration> out;
  for (int c = 0; c < count; ++c) {
    Configuration cfg = trap_centers(spec);
    for (auto& p : cfg.positions)
      for (int i = 0; i < 3; ++i) p[i] += u(rng);
    out.push_back(std::move(cfg));
  }
  return out;
}

int cmd_check(const Args& a, std::ostream& out, std::ostream&) {
  const ChainSpec spec = load_chain_spec(a.config);
  const RunOptions opts = options_from(a);

  // Shared, lazily computed inputs; failures surface as FAIL lines.
  std::unique_ptr<BandStructure> bands;
  auto get_bands = [&]() -> const BandStructure& {
    if (!bands) bands = std::make_unique<BandStructure>(compute_bands(spec, opts));
    return *bands;
  };
  const Configuration eq =
      opts.equilibrium == Equilibrium::Relaxed ? relax_finite(spec).config : trap_centers(spec);

  std::vector<std::pair<std::string, std::function<CheckResult()>>> checks;
  checks.emplace_back("gradient_fd", [&] {
    double e = 0.0;
    for (const auto& c : perturbed(spec, 5))
      e = std::max(e, (gradient(c, spec) - fd_gradient(c, spec, 1e-5)).lpNorm<Eigen::Infinity>());
    return bound(e, 1e-6);
  });
  checks.emplace_back("hessian_fd", [&] {
    double e = 0.0;
    for (const auto& c : perturbed(spec, 5))
      e = std::max(e, (hessian(c, spec) - fd_hessian(c, spec, 1e-4)).lpNorm<Eigen::Infinity>());
    return bound(e, 1e-5);
  });
  checks.emplace_back("newton_third_law", [&] {
    const Eigen::VectorXd g = dipole_gradient(eq, spec);
    Vec3 total = Vec3::Zero();
    for (int n = 0; n < spec.n_atoms(); ++n) total += g.segment<3>(3 * n);
    return bound(total.lpNorm<Eigen::Infinity>(), 1e-10 * std::max(1.0, g.lpNorm<Eigen::Infinity>()));
  });
  checks.emplace_back("band_orthonormality", [&] {
    const BandStructure& b = get_bands();
    double e = 0.0;
    for (const Mat6c& x : b.xi) e = std::max(e, (x.adjoint() * x - Mat6c::Identity()).cwiseAbs().maxCoeff());
    return bound(e, 1e-10);
  });
  checks.emplace_back("spectral_symmetry", [&] {
    const BandStructure& b = get_bands();
    double e = 0.0;
    for (int k = 0; k < b.n_q(); ++k) {
      const Eigen::Matrix<double, kBands, 1> w = diagonalize_bloch(dynamical_matrix(-b.q[k], spec, b.bulk), spec.mass).omega;
      e = std::max(e, (w - b.omega.row(k).transpose()).cwiseAbs().maxCoeff());
    }
    return bound(e, 1e-10);
  });
  checks.emplace_back("sum_rule", [&] {
    const BandStructure& b = get_bands();
    double e = 0.0;
    for (int k = 0; k < b.n_q(); ++k) {
      const double tr = dynamical_matrix(b.q[k], spec, b.bulk).trace().real() / spec.mass;
      e = std::max(e, std::abs(b.omega.row(k).squaredNorm() - tr) / std::abs(tr));
    }
    return bound(e, 1e-10);
  });
  checks.emplace_back("finite_mode_orthonormality", [&] {
    const FiniteSpectrum s = finite_spectrum(spec, opts.equilibrium, band_envelopes(get_bands()), opts.edge);
    const Eigen::MatrixXd gram = s.modes.transpose() * s.modes;
    return bound((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-10);
  });
  checks.emplace_back("bogoliubov_equivalence", [&] {
    const Eigen::MatrixXd d = harmonic_matrix(eq, spec, opts.equilibrium == Equilibrium::TrapCenters);
    const Eigen::VectorXd om = local_frequencies(d, spec.mass);
    const CouplingMatrices c = coupling_matrices(d, om, spec.mass);
    return bound((bogoliubov_frequencies(c.h, c.g) - normal_mode_frequencies(d, spec.mass)).cwiseAbs().maxCoeff(), 1e-8);
  });
  checks.emplace_back("local_matrix_structure", [&] {
    const Eigen::MatrixXd d = harmonic_matrix(eq, spec, opts.equilibrium == Equilibrium::TrapCenters);
    const Eigen::VectorXd om = local_frequencies(d, spec.mass);
    const CouplingMatrices c = coupling_matrices(d, om, spec.mass);
    const bool ok = c.g == c.g.transpose() && c.g.diagonal().isZero(0.0) && c.h.diagonal() == om;
    return CheckResult{ok, ok ? "g symmetric, zero diagonal, h diagonal = Omega" : "structure violated"};
  });
  checks.emplace_back("rho0_limits", [&] {
    const double e0 = std::abs(rho0(0.0, spec.d) - 1.0);
    const double e2 = std::abs(rho0(2.0 * std::numbers::pi / spec.d, spec.d) - 0.5);
    const bool ok = e0 < 1e-10 && e2 < 1e-8;
    return CheckResult{ok, "|rho0(0)-1|=" + sci(e0) + " |rho0(2pi/d)-1/2|=" + sci(e2)};
  });
  checks.emplace_back("coupling_zero_at_q0", [&] {
    const BandStructure& b = get_bands();
    const CouplingGrid g = coupling_grid(b, opts.rho_z_source);
    double e = 0.0;
    bool has_zero = false;
    for (int k = 0; k < g.n_q(); ++k) {
      if (g.q[k] != 0.0) continue;
      has_zero = true;
      e = std::max(e, g.m_abs.row(k).maxCoeff());
    }
    if (!has_zero) {
      const Eigen::Matrix<double, kBands, 1> w = diagonalize_bloch(dynamical_matrix(0.0, spec, b.bulk), spec.mass).omega;
      e = coupling(0.0, w, diagonalize_bloch(dynamical_matrix(0.0, spec, b.bulk), spec.mass).xi, spec.d,
                   g.rho_z).cwiseAbs().maxCoeff();
    }
    return CheckResult{e == 0.0, "max |M(q=0)| = " + sci(e)};
  });
  checks.emplace_back("modulus_invariance", [&] {
    const BandStructure& b = get_bands();
    const auto rz = rho_z(spec, opts.rho_z_source, b.bulk);
    double e = 0.0;
    for (int k = 0; k < b.n_q(); ++k) {
      Mat6c flipped = b.xi[k];
      flipped.row(2) *= -1.0;
      const Eigen::Matrix<double, kBands, 1> w = b.omega.row(k).transpose();
      e = std::max(e, (coupling(b.q[k], w, flipped, spec.d, rz) - coupling(b.q[k], w, b.xi[k], spec.d, rz))
                          .cwiseAbs()
                          .maxCoeff());
    }
    return CheckResult{e == 0.0, "max change " + sci(e)};
  });
  checks.emplace_back("model_round_trip", [&] {
    RunOptions small = opts;
    small.q_points = std::min(opts.q_points, 32);
    const ExtendedHHModel m = assemble(spec, 1.0, 2.0, 0.5, small);
    const std::string s1 = serialize(m);
    const ExtendedHHModel back = from_json(nlohmann::json::parse(s1));
    const bool ok = back == m && serialize(back) == s1 && serialize(assemble(spec, 1.0, 2.0, 0.5, small)) == s1;
    return CheckResult{ok, ok ? "identical" : "round trip differs"};
  });

  int failed = 0;
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, error_kind(e) + ": " + e.what()};
    }
    if (!r.pass) ++failed;
    out << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << "\n";
  }
  out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " checks failed") << "\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int sweep_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("RYDPHON_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phonon bands, local phonons and atom-phonon couplings of dipolar tweezer chains", "rydphon"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Args a;

  auto common = [&](CLI::App* sub) {
    sub->add_option("config", a.config, "Chain configuration (JSON)")->required();
    sub->add_flag("--relax", a.relax, "Expand around the relaxed equilibrium instead of the trap centres");
    sub->add_option("--cutoff-cells", a.cutoff_cells, "Lattice-sum cutoff in cells");
  };

  auto* bands = app.add_subcommand("bands", "Bulk phonon bands as CSV");
  common(bands);
  bands->add_option("--q-points", a.q_points, "Number of q points");
  bands->add_option("--out", a.out, "Output file (- for stdout)");

  auto* spectrum = app.add_subcommand("spectrum", "Finite-chain spectrum with edge flags");
  common(spectrum);
  spectrum->add_flag("--no-relax", a.no_relax, "Expand around the trap centres (default)");
  spectrum->add_option("--out", a.out, "Output file (- for stdout)");
  spectrum->add_option("--q-points", a.q_points, "q points for the bulk band envelopes");
  spectrum->add_option("--ipr-factor", a.ipr_factor, "Edge modes need IPR >= factor / N");

  auto* local = app.add_subcommand("local", "Local-phonon couplings g and J");
  common(local);
  local->add_option("--out-g", a.out_g, "g matrix CSV (- for stdout)");
  local->add_option("--out-j", a.out_j, "J CSV (- for stdout)");

  auto* coupling_cmd = app.add_subcommand("coupling", "Dimensionless atom-phonon vertex");
  common(coupling_cmd);
  coupling_cmd->add_option("--q-points", a.q_points, "Number of q points");
  coupling_cmd->add_option("--rho-z", a.rho_z, "Phase offsets: trap_centers or relaxed");
  coupling_cmd->add_option("--out", a.out, "Output file (- for stdout)");

  auto* sweep = app.add_subcommand("sweep", "Band, J and coupling diagnostics over a parameter range");
  common(sweep);
  sweep->add_option("--param", a.param, "Parameter to scan: d, delta, a, theta, phi, v_dd, mass");
  sweep->add_option("--from", a.from, "First value");
  sweep->add_option("--to", a.to, "Last value");
  sweep->add_option("--steps", a.steps, "Number of points");
  sweep->add_option("--q-points", a.q_points, "Number of q points");
  sweep->add_option("--out", a.out, "Output file (- for stdout)");

  auto* export_cmd = app.add_subcommand("export", "Extended Hubbard-Holstein model file");
  common(export_cmd);
  export_cmd->add_option("--t", a.t, "Hopping amplitude");
  export_cmd->add_option("--U", a.U, "On-site repulsion");
  export_cmd->add_option("--gcp", a.gcp, "Pseudopotential magnitude g_cp (>= 0)");
  export_cmd->add_option("--q-points", a.q_points, "Number of q points");
  export_cmd->add_option("--rho-z", a.rho_z, "Phase offsets: trap_centers or relaxed");
  export_cmd->add_option("--out", a.out, "Output file (- for stdout)");

  auto* check = app.add_subcommand("check", "Run the built-in oracles and print PASS/FAIL per property");
  common(check);
  check->add_option("--q-points", a.q_points, "Number of q points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*bands) return cmd_bands(a, out, err);
    if (*spectrum) return cmd_spectrum(a, out, err);
    if (*local) return cmd_local(a, out, err);
    if (*coupling_cmd) return cmd_coupling(a, out, err);
    if (*sweep) return cmd_sweep(a, out, err);
    if (*export_cmd) return cmd_export(a, out, err);
    if (*check) return cmd_check(a, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << error_kind(e) << ": " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitComputation;
}

}  // namespace rydphon
