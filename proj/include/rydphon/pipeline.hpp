#pragma once

#include <exception>
#include <string>
#include <vector>

#include "rydphon/atom_phonon.hpp"
#include "rydphon/local_phonons.hpp"
#include "rydphon/phonon_bands.hpp"

namespace rydphon {

inline constexpr const char* kToolName = "rydphon";
inline constexpr const char* kToolVersion = "1.0.0";

/// Knobs shared by every command.
struct RunOptions {
  Equilibrium equilibrium = Equilibrium::TrapCenters;
  int q_points = kDefaultQPoints;
  int cutoff_cells = kDefaultCutoffCells;
  RhoZSource rho_z_source = RhoZSource::TrapCenters;
  EdgeCriteria edge;
  double coupled_fraction = kDefaultCoupledFraction;
};

std::string to_string(Equilibrium e);

BulkEquilibrium resolve_bulk(const ChainSpec& spec, const RunOptions& opts);
BandStructure compute_bands(const ChainSpec& spec, const RunOptions& opts);
/// Finite chain spectrum with edge flags against the bulk envelopes of the same spec.
FiniteSpectrum compute_spectrum(const ChainSpec& spec, const RunOptions& opts);

/// Names of the conventions every output records, as key=value pairs.
std::vector<std::pair<std::string, std::string>> conventions(const RunOptions& opts);

struct SweepPoint {
  double value = 0.0;
  ChainSpec spec;
  std::string status = "ok";  // otherwise the error kind
  std::string message;
  BandDiagnostics diagnostics;
  std::vector<JValue> J;
  BandArray max_m{};  // tracked labels
  std::vector<int> coupled;
};

/// Parameters a sweep may scan.
inline const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> p{"d", "delta", "a", "theta", "phi", "v_dd", "mass"};
  return p;
}

/// Copy of `spec` with one parameter replaced. Throws ConfigError for unknown names.
ChainSpec with_parameter(const ChainSpec& spec, const std::string& name, double value);

/// from + i (to - from) / (steps - 1), i = 0..steps-1.
std::vector<double> sweep_values(double from, double to, int steps);

/// Bands, diagnostics, J and coupling maxima at one parameter point. Library errors
/// are captured in `status` instead of propagating.
SweepPoint evaluate_point(const ChainSpec& spec, double value, const RunOptions& opts);

/// Evaluates every point on up to `threads` workers; results keep the order of `values`.
std::vector<SweepPoint> run_sweep(const ChainSpec& base, const std::string& param, const std::vector<double>& values,
                                  const RunOptions& opts, int threads);

/// Short class name of a library error ("ImaginaryFrequency", ...), "Error" otherwise.
std::string error_kind(const std::exception& e);

}  // namespace rydphon
