#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "rydphon/atom_phonon.hpp"
#include "rydphon/phonon_bands.hpp"
#include "rydphon/pipeline.hpp"

namespace rydphon {

inline constexpr int kSchemaVersion = 1;

struct Provenance {
  ChainSpec spec;
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::map<std::string, std::string> conventions;

  bool operator==(const Provenance&) const = default;
};

/// Hubbard parameters plus phonon bands and the atom-phonon vertex on one q grid.
struct ExtendedHHModel {
  double t = 0.0;
  double U = 0.0;
  double g_cp = 0.0;
  BandStructure bands;
  CouplingGrid couplings;
  Provenance provenance;
};

/// Runs bulk reference -> bands -> couplings. t and U must be finite, g_cp >= 0.
ExtendedHHModel assemble(const ChainSpec& spec, double t, double U, double g_cp, const RunOptions& opts = {});

nlohmann::json to_json(const ExtendedHHModel& model);
/// Validates first; throws SchemaError on any violation.
ExtendedHHModel from_json(const nlohmann::json& doc);

/// Throws SchemaError for a wrong schema_version, a missing section or a missing convention.
void validate_model(const nlohmann::json& doc);

std::string serialize(const ExtendedHHModel& model);
void serialize(const ExtendedHHModel& model, const std::filesystem::path& path);
ExtendedHHModel deserialize(const std::filesystem::path& path);

/// Field-for-field equality (exact for every stored number).
bool operator==(const ExtendedHHModel& a, const ExtendedHHModel& b);

}  // namespace rydphon
