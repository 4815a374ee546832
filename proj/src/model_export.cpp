#include "rydphon/model_export.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rydphon/config.hpp"
#include "rydphon/errors.hpp"

namespace rydphon {

using nlohmann::json;

namespace {

const char* const kRequiredSections[] = {"tool", "provenance", "hubbard", "bands", "couplings"};
const char* const kRequiredConventions[] = {"gauge", "pair_sum", "modulus", "cutoff_cells"};

// Column-major flattening: the first axis (q) runs fastest.
json flatten(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(m(r, c));
  return a;
}

Eigen::MatrixXd unflatten(const json& a, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows * cols)
    throw SchemaError(std::string("model file: array '") + what + "' has the wrong length");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = a[k++].get<double>();
  return m;
}

json complex_table(const Eigen::MatrixXcd& m, const json& axes) {
  return {{"axes", axes}, {"re", flatten(m.real())}, {"im", flatten(m.imag())}};
}

Eigen::MatrixXcd complex_from(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  Eigen::MatrixXcd m(rows, cols);
  m.real() = unflatten(j.at("re"), rows, cols, what);
  m.imag() = unflatten(j.at("im"), rows, cols, what);
  return m;
}

json axis_list(std::initializer_list<const char*> names) {
  json a = json::array();
  for (const char* n : names) a.push_back(n);
  return a;
}

Equilibrium equilibrium_from(const std::string& s) {
  if (s == "relaxed") return Equilibrium::Relaxed;
  if (s == "trap_centers") return Equilibrium::TrapCenters;
  throw SchemaError("model file: unknown equilibrium '" + s + "'");
}

bool same_bands(const BandStructure& a, const BandStructure& b) {
  if (a.q != b.q || a.tracked != b.tracked || !(a.spec == b.spec) || a.equilibrium != b.equilibrium) return false;
  if (a.omega.rows() != b.omega.rows() || a.omega != b.omega || a.xi.size() != b.xi.size()) return false;
  for (std::size_t k = 0; k < a.xi.size(); ++k)
    if (a.xi[k] != b.xi[k]) return false;
  return a.bulk.cutoff_cells == b.bulk.cutoff_cells && a.bulk.displacement == b.bulk.displacement &&
         a.bulk.relaxed == b.bulk.relaxed;
}

bool same_couplings(const CouplingGrid& a, const CouplingGrid& b) {
  return a.q == b.q && a.m_complex.rows() == b.m_complex.rows() && a.m_complex == b.m_complex &&
         a.m_abs == b.m_abs && a.rho0 == b.rho0 && a.rho_z == b.rho_z && a.rho_z_source == b.rho_z_source;
}

}  // namespace

ExtendedHHModel assemble(const ChainSpec& spec, double t, double U, double g_cp, const RunOptions& opts) {
  if (!std::isfinite(t)) throw ConfigError("t", "must be finite");
  if (!std::isfinite(U)) throw ConfigError("U", "must be finite");
  if (!(g_cp >= 0.0) || !std::isfinite(g_cp)) throw ConfigError("g_cp", "must be finite and >= 0");
  ExtendedHHModel m;
  m.t = t;
  m.U = U;
  m.g_cp = g_cp;
  m.bands = compute_bands(spec, opts);
  m.couplings = coupling_grid(m.bands, opts.rho_z_source);
  m.provenance.spec = spec;
  for (const auto& [k, v] : conventions(opts)) m.provenance.conventions[k] = v;
  return m;
}

json to_json(const ExtendedHHModel& m) {
  const BandStructure& b = m.bands;
  const int nq = b.n_q();

  Eigen::MatrixXcd xi(nq, kBands * kBands);  // (q, component, band)
  Eigen::MatrixXd tracked(nq, kBands);
  for (int k = 0; k < nq; ++k) {
    for (int j = 0; j < kBands; ++j) {
      for (int c = 0; c < kBands; ++c) xi(k, c + kBands * j) = b.xi[k](c, j);
      tracked(k, j) = b.tracked[k][j];
    }
  }

  json bulk_disp = json::array();
  for (const auto& v : b.bulk.displacement) bulk_disp.push_back({v.x(), v.y(), v.z()});

  json conv = json::object();
  for (const auto& [k, v] : m.provenance.conventions) conv[k] = v;

  const Eigen::MatrixXcd phys = physical_coupling(m.couplings, m.g_cp, b.spec.mass);

  return {
      {"schema_version", kSchemaVersion},
      {"layout", "column_major"},
      {"tool", {{"name", m.provenance.tool}, {"version", m.provenance.version}}},
      {"provenance",
       {{"spec", to_json(m.provenance.spec)}, {"config_hash", config_hash(m.provenance.spec)}, {"conventions", conv}}},
      {"hubbard", {{"t", m.t}, {"U", m.U}, {"g_cp", m.g_cp}}},
      {"bands",
       {{"n_q", nq},
        {"n_bands", kBands},
        {"q", b.q},
        {"spec", to_json(b.spec)},
        {"equilibrium", to_string(b.equilibrium)},
        {"bulk", {{"cutoff_cells", b.bulk.cutoff_cells}, {"relaxed", b.bulk.relaxed}, {"displacement", bulk_disp}}},
        {"omega", {{"axes", axis_list({"q", "band"})}, {"values", flatten(b.omega)}}},
        {"xi", complex_table(xi, axis_list({"q", "component", "band"}))},
        {"tracked", {{"axes", axis_list({"q", "label"})}, {"values", flatten(tracked)}}}}},
      {"couplings",
       {{"rho_z", {m.couplings.rho_z[0], m.couplings.rho_z[1]}},
        {"rho_z_source", to_string(m.couplings.rho_z_source)},
        {"rho0", {{"axes", axis_list({"q"})}, {"values", flatten(m.couplings.rho0)}}},
        {"dimensionless", complex_table(m.couplings.m_complex, axis_list({"q", "band"}))},
        {"abs", {{"axes", axis_list({"q", "band"})}, {"values", flatten(m.couplings.m_abs)}}},
        {"physical", complex_table(phys, axis_list({"q", "band"}))},
        {"physical_units", "g_cp*sqrt(hbar/(2M)), hbar=1"}}},
  };
}

void validate_model(const json& doc) {
  if (!doc.is_object()) throw SchemaError("model file: top level is not an object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    throw SchemaError("model file: missing schema_version");
  if (doc["schema_version"].get<int>() != kSchemaVersion) {
    throw SchemaError("model file: schema_version " + doc["schema_version"].dump() + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  for (const char* s : kRequiredSections)
    if (!doc.contains(s)) throw SchemaError(std::string("model file: missing section '") + s + "'");
  const json& prov = doc["provenance"];
  if (!prov.contains("spec") || !prov.contains("conventions"))
    throw SchemaError("model file: provenance needs 'spec' and 'conventions'");
  for (const char* c : kRequiredConventions)
    if (!prov["conventions"].contains(c)) throw SchemaError(std::string("model file: missing convention '") + c + "'");
}

ExtendedHHModel from_json(const json& doc) {
  validate_model(doc);
  try {
    ExtendedHHModel m;
    m.t = doc["hubbard"].at("t").get<double>();
    m.U = doc["hubbard"].at("U").get<double>();
    m.g_cp = doc["hubbard"].at("g_cp").get<double>();
    m.provenance.tool = doc["tool"].at("name").get<std::string>();
    m.provenance.version = doc["tool"].at("version").get<std::string>();
    m.provenance.spec = parse_chain_spec(doc["provenance"]["spec"]);
    for (const auto& [k, v] : doc["provenance"]["conventions"].items()) m.provenance.conventions[k] = v.get<std::string>();

    const json& jb = doc["bands"];
    BandStructure& b = m.bands;
    const int nq = jb.at("n_q").get<int>();
    if (jb.at("n_bands").get<int>() != kBands) throw SchemaError("model file: n_bands must be 6");
    b.q = jb.at("q").get<std::vector<double>>();
    if (static_cast<int>(b.q.size()) != nq) throw SchemaError("model file: q grid length differs from n_q");
    b.spec = parse_chain_spec(jb.at("spec"));
    b.equilibrium = equilibrium_from(jb.at("equilibrium").get<std::string>());
    b.bulk.cutoff_cells = jb.at("bulk").at("cutoff_cells").get<int>();
    b.bulk.relaxed = jb.at("bulk").at("relaxed").get<bool>();
    const json& disp = jb.at("bulk").at("displacement");
    for (int a = 0; a < 2; ++a) b.bulk.displacement[a] =
          Vec3(disp.at(a).at(0).get<double>(), disp.at(a).at(1).get<double>(), disp.at(a).at(2).get<double>());
    b.omega = unflatten(jb.at("omega").at("values"), nq, kBands, "bands.omega");
    const Eigen::MatrixXcd xi = complex_from(jb.at("xi"), nq, kBands * kBands, "bands.xi");
    const Eigen::MatrixXd tracked = unflatten(jb.at("tracked").at("values"), nq, kBands, "bands.tracked");
    b.xi.resize(nq);
    b.tracked.resize(nq);
    for (int k = 0; k < nq; ++k) {
      for (int j = 0; j < kBands; ++j) {
        for (int c = 0; c < kBands; ++c) b.xi[k](c, j) = xi(k, c + kBands * j);
        b.tracked[k][j] = static_cast<int>(tracked(k, j));
      }
    }

    const json& jc = doc["couplings"];
    CouplingGrid& g = m.couplings;
    g.q = b.q;
    g.rho_z = {jc.at("rho_z").at(0).get<double>(), jc.at("rho_z").at(1).get<double>()};
    const std::string src = jc.at("rho_z_source").get<std::string>();
    if (src != "trap_centers" && src != "relaxed") throw SchemaError("model file: unknown rho_z_source '" + src + "'");
    g.rho_z_source = src == "relaxed" ? RhoZSource::Relaxed : RhoZSource::TrapCenters;
    g.rho0 = unflatten(jc.at("rho0").at("values"), nq, 1, "couplings.rho0");
    g.m_complex = complex_from(jc.at("dimensionless"), nq, kBands, "couplings.dimensionless");
    g.m_abs = unflatten(jc.at("abs").at("values"), nq, kBands, "couplings.abs");
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("model file: bad spec: ") + e.what());
  }
}

std::string serialize(const ExtendedHHModel& model) { return to_json(model).dump(1) + "\n"; }

void serialize(const ExtendedHHModel& model, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << serialize(model);
  if (!f) throw Error("write to '" + path.string() + "' failed");
}

ExtendedHHModel deserialize(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  json doc;
  try {
    f >> doc;
  } catch (const json::exception& e) {
    throw SchemaError("model file '" + path.string() + "': " + e.what());
  }
  return from_json(doc);
}

bool operator==(const ExtendedHHModel& a, const ExtendedHHModel& b) {
  return a.t == b.t && a.U == b.U && a.g_cp == b.g_cp && a.provenance == b.provenance && same_bands(a.bands, b.bands) &&
         same_couplings(a.couplings, b.couplings);
}

}  // namespace rydphon
