#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "rydphon/geometry.hpp"

namespace rydphon {

/// Parses a chain description. Accepted keys: n_cells, d, delta, a, theta,
/// phi, topology, nu, mass, v_dd. Omitted keys keep their defaults; theta may
/// be the string "magic"; nu may be a scalar or a 3-array. Unknown keys and
/// malformed values raise ConfigError carrying the key.
ChainSpec parse_chain_spec(const nlohmann::json& j);
ChainSpec load_chain_spec(const std::filesystem::path& path);

nlohmann::json to_json(const ChainSpec& spec);

std::string to_string(Topology t);

/// FNV-1a 64 of the canonical JSON dump of the spec, as 16 hex digits.
std::string config_hash(const ChainSpec& spec);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace rydphon
