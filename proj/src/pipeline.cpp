#include "rydphon/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "rydphon/errors.hpp"

namespace rydphon {

std::string to_string(Equilibrium e) { return e == Equilibrium::Relaxed ? "relaxed" : "trap_centers"; }

BulkEquilibrium resolve_bulk(const ChainSpec& spec, const RunOptions& opts) {
  return opts.equilibrium == Equilibrium::Relaxed ? relax_bulk(spec, kDefaultRelaxTol, opts.cutoff_cells)
                                                  : bulk_trap_centers(spec, opts.cutoff_cells);
}

BandStructure compute_bands(const ChainSpec& spec, const RunOptions& opts) {
  return band_structure(spec, resolve_bulk(spec, opts), opts.q_points, opts.equilibrium);
}

FiniteSpectrum compute_spectrum(const ChainSpec& spec, const RunOptions& opts) {
  const BandStructure bands = compute_bands(spec, opts);
  return finite_spectrum(spec, opts.equilibrium, band_envelopes(bands), opts.edge);
}

std::vector<std::pair<std::string, std::string>> conventions(const RunOptions& opts) {
  return {
      {"gauge", "largest_z_real_nonnegative"},
      {"pair_sum", "unordered_once"},
      {"modulus", "abs_xi_z"},
      {"cutoff_cells", std::to_string(opts.cutoff_cells)},
      {"equilibrium", to_string(opts.equilibrium)},
      {"global_phase", "i_dropped"},
      {"rho_z_source", to_string(opts.rho_z_source)},
  };
}

ChainSpec with_parameter(const ChainSpec& spec, const std::string& name, double value) {
  ChainSpec s = spec;
  if (name == "d") {
    s.d = value;
  } else if (name == "delta") {
    s.delta = value;
  } else if (name == "a") {
    s.a = value;
  } else if (name == "theta") {
    s.theta = value;
  } else if (name == "phi") {
    s.phi = value;
  } else if (name == "v_dd") {
    s.v_dd = value;
  } else if (name == "mass") {
    s.mass = value;
  } else {
    throw ConfigError("param", "cannot sweep '" + name + "'");
  }
  s.validate();
  return s;
}

std::vector<double> sweep_values(double from, double to, int steps) {
  if (steps < 1) throw ConfigError("steps", "must be >= 1");
  if (steps == 1) return {from};
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) v[i] = from + i * (to - from) / (steps - 1);
  return v;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ImaginaryFrequency*>(&e)) return "ImaginaryFrequency";
  if (dynamic_cast<const DynamicalInstability*>(&e)) return "DynamicalInstability";
  if (dynamic_cast<const NonPositiveDiagonal*>(&e)) return "NonPositiveDiagonal";
  if (dynamic_cast<const NonConvergedCutoff*>(&e)) return "NonConvergedCutoff";
  if (dynamic_cast<const MaxIterExceeded*>(&e)) return "MaxIterExceeded";
  if (dynamic_cast<const CoincidentAtoms*>(&e)) return "CoincidentAtoms";
  if (dynamic_cast<const ZeroFrequency*>(&e)) return "ZeroFrequency";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
  return "Error";
}

SweepPoint evaluate_point(const ChainSpec& spec, double value, const RunOptions& opts) {
  SweepPoint p;
  p.value = value;
  p.spec = spec;
  try {
    const BandStructure bands = compute_bands(spec, opts);
    p.diagnostics = band_diagnostics(bands);
    const CouplingGrid grid = coupling_grid(bands, opts.rho_z_source);
    p.max_m = max_abs_tracked(grid, bands);
    p.coupled = coupled_bands(p.max_m, opts.coupled_fraction);
    p.J = local_phonon_model(spec, opts.equilibrium).J;
  } catch (const Error& e) {
    p.status = error_kind(e);
    p.message = e.what();
  }
  return p;
}

std::vector<SweepPoint> run_sweep(const ChainSpec& base, const std::string& param, const std::vector<double>& values,
                                  const RunOptions& opts, int threads) {
  std::vector<ChainSpec> specs;
  specs.reserve(values.size());
  for (double v : values) specs.push_back(with_parameter(base, param, v));

  std::vector<SweepPoint> out(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) out[i] = evaluate_point(specs[i], values[i], opts);
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(values.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace rydphon
