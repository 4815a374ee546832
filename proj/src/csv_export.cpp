#include "rydphon/csv_export.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "rydphon/config.hpp"

namespace rydphon {
namespace {

// J columns written by sweeps.
const std::pair<int, const char*> kSweepJ[] = {{1, "intracell"}, {1, "intercell"}, {2, "leg0"}, {2, "leg1"}};

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (prec == 17 || std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string csv_header(const std::string& kind, const ChainSpec& spec, const RunOptions& opts) {
  std::string h = std::string("# ") + kToolName + " " + kToolVersion + " " + kind + " config_hash=" + config_hash(spec);
  for (const auto& [k, v] : conventions(opts)) h += " " + k + "=" + v;
  return h;
}

void write_bands_csv(std::ostream& out, const BandStructure& bands, const std::string& header) {
  static const char* comp[] = {"Ax", "Ay", "Az", "Bx", "By", "Bz"};
  out << header << "\n";
  out << "q,j,label,omega";
  for (const char* c : comp) out << ",re_xi_" << c << ",im_xi_" << c;
  out << "\n";
  for (int k = 0; k < bands.n_q(); ++k) {
    BandLabels label_of{};
    for (int l = 0; l < kBands; ++l) label_of[bands.tracked[k][l]] = l;
    for (int j = 0; j < kBands; ++j) {
      out << format_double(bands.q[k]) << "," << j + 1 << "," << label_of[j] + 1 << ","
          << format_double(bands.omega(k, j));
      for (int c = 0; c < kBands; ++c)
        out << "," << format_double(bands.xi[k](c, j).real()) << "," << format_double(bands.xi[k](c, j).imag());
      out << "\n";
    }
  }
}

void write_spectrum_csv(std::ostream& out, const FiniteSpectrum& s, const std::string& header) {
  out << header << "\n" << "mode,omega,ipr,edge_flag,adjacent_band\n";
  for (int i = 0; i < s.frequencies.size(); ++i) {
    out << i << "," << format_double(s.frequencies[i]) << "," << format_double(s.edges.ipr[i]) << ","
        << (s.edges.edge[i] ? 1 : 0) << "," << s.edges.adjacent_band[i] << "\n";
  }
}

void write_g_csv(std::ostream& out, const Eigen::MatrixXd& g, const std::string& header) {
  out << header << "\n" << "n,m,i,j,value\n";
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      out << r / 3 << "," << c / 3 << "," << r % 3 << "," << c % 3 << "," << format_double(g(r, c)) << "\n";
}

void write_j_csv(std::ostream& out, const std::vector<JValue>& j, const std::string& header) {
  out << header << "\n" << "separation,bond_class,value,pairs\n";
  for (const auto& v : j) out << v.separation << "," << v.bond_class << "," << format_double(v.value) << "," << v.pairs << "\n";
}

void write_coupling_csv(std::ostream& out, const CouplingGrid& grid, const BandStructure& bands,
                        const std::string& header) {
  out << header << "\n" << "q,j,re_m,im_m,abs_m,rho0,omega\n";
  for (int k = 0; k < grid.n_q(); ++k) {
    for (int j = 0; j < kBands; ++j) {
      out << format_double(grid.q[k]) << "," << j + 1 << "," << format_double(grid.m_complex(k, j).real()) << ","
          << format_double(grid.m_complex(k, j).imag()) << "," << format_double(grid.m_abs(k, j)) << ","
          << format_double(grid.rho0[k]) << "," << format_double(bands.omega(k, j)) << "\n";
    }
  }
}

void write_sweep_csv(std::ostream& out, const std::string& param, const std::vector<SweepPoint>& points,
                     const std::string& header) {
  out << header << "\n" << param;
  for (int j = 1; j <= kBands; ++j) out << ",bandwidth_" << j;
  for (int j = 1; j <= kBands; ++j) out << ",concavity_" << j;
  out << ",n_crossings";
  for (const auto& [s, cls] : kSweepJ) out << ",J" << s << "_" << cls;
  for (int j = 1; j <= kBands; ++j) out << ",max_abs_m_" << j;
  out << ",n_coupled,status\n";
  for (const SweepPoint& p : points) {
    const bool ok = p.status == "ok";
    const double nan = std::nan("");
    out << format_double(p.value);
    for (int j = 0; j < kBands; ++j) out << "," << format_double(ok ? p.diagnostics.bandwidth[j] : nan);
    for (int j = 0; j < kBands; ++j) out << "," << (ok ? std::to_string(p.diagnostics.concavity[j]) : "nan");
    out << "," << (ok ? std::to_string(p.diagnostics.crossings.size()) : "nan");
    for (const auto& [s, cls] : kSweepJ) out << "," << format_double(ok ? find_J(p.J, s, cls) : nan);
    for (int j = 0; j < kBands; ++j) out << "," << format_double(ok ? p.max_m[j] : nan);
    out << "," << (ok ? std::to_string(p.coupled.size()) : "nan") << "," << p.status << "\n";
  }
}

}  // namespace rydphon
