#include "rydphon/config.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>

#include "rydphon/errors.hpp"

namespace rydphon {
namespace {

using nlohmann::json;

double number(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  return j.get<double>();
}

}  // namespace

ChainSpec parse_chain_spec(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  static constexpr std::array<const char*, 10> kKeys = {
      "n_cells", "d", "delta", "a", "theta", "phi", "topology", "nu", "mass", "v_dd"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(kKeys.begin(), kKeys.end(), [&](const char* k) { return key == k; }) ==
        kKeys.end()) {
      throw ConfigError(key, "unknown key");
    }
  }

  ChainSpec s;
  if (j.contains("n_cells")) {
    const auto& v = j["n_cells"];
    if (!v.is_number_integer()) throw ConfigError("n_cells", "expected an integer");
    s.n_cells = v.get<int>();
  }
  if (j.contains("d")) s.d = number(j["d"], "d");
  if (j.contains("delta")) s.delta = number(j["delta"], "delta");
  if (j.contains("a") && !j["a"].is_null()) s.a = number(j["a"], "a");
  if (j.contains("theta")) {
    const auto& v = j["theta"];
    if (v.is_string()) {
      if (v.get<std::string>() != "magic") throw ConfigError("theta", "only \"magic\" is accepted as a string");
      s.theta = magic_angle();
    } else {
      s.theta = number(v, "theta");
    }
  }
  if (j.contains("phi")) s.phi = number(j["phi"], "phi");
  if (j.contains("topology")) {
    const auto& v = j["topology"];
    const std::string t = v.is_string() ? v.get<std::string>() : "";
    if (t == "trivial") {
      s.topology = Topology::Trivial;
    } else if (t == "topological") {
      s.topology = Topology::Topological;
    } else {
      throw ConfigError("topology", "expected \"trivial\" or \"topological\"");
    }
  }
  if (j.contains("nu")) {
    const auto& v = j["nu"];
    if (v.is_number()) {
      s.nu = Vec3::Constant(v.get<double>());
    } else if (v.is_array() && v.size() == 3) {
      for (int i = 0; i < 3; ++i) s.nu[i] = number(v[i], "nu");
    } else {
      throw ConfigError("nu", "expected a number or an array of 3 numbers");
    }
  }
  if (j.contains("mass")) s.mass = number(j["mass"], "mass");
  if (j.contains("v_dd")) s.v_dd = number(j["v_dd"], "v_dd");
  s.validate();
  return s;
}

ChainSpec load_chain_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("JSON parse error: ") + e.what());
  }
  return parse_chain_spec(j);
}

std::string to_string(Topology t) { return t == Topology::Trivial ? "trivial" : "topological"; }

json to_json(const ChainSpec& s) {
  json j;
  j["n_cells"] = s.n_cells;
  j["d"] = s.d;
  j["delta"] = s.delta;
  j["a"] = s.a ? json(*s.a) : json(nullptr);
  j["theta"] = s.theta;
  j["phi"] = s.phi;
  j["topology"] = to_string(s.topology);
  j["nu"] = {s.nu.x(), s.nu.y(), s.nu.z()};
  j["mass"] = s.mass;
  j["v_dd"] = s.v_dd;
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ChainSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(spec).dump())));
  return buf;
}

}  // namespace rydphon
