#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rydphon/atom_phonon.hpp"
#include "rydphon/local_phonons.hpp"
#include "rydphon/phonon_bands.hpp"
#include "rydphon/pipeline.hpp"

namespace rydphon {

/// "# rydphon <version> <kind> config_hash=... key=value ..." comment line.
std::string csv_header(const std::string& kind, const ChainSpec& spec, const RunOptions& opts);

/// Shortest of %.15g / %.16g / %.17g that parses back to the same double.
std::string format_double(double v);

void write_bands_csv(std::ostream& out, const BandStructure& bands, const std::string& header);
void write_spectrum_csv(std::ostream& out, const FiniteSpectrum& spectrum, const std::string& header);
void write_g_csv(std::ostream& out, const Eigen::MatrixXd& g, const std::string& header);
void write_j_csv(std::ostream& out, const std::vector<JValue>& j, const std::string& header);
void write_coupling_csv(std::ostream& out, const CouplingGrid& grid, const BandStructure& bands,
                        const std::string& header);
void write_sweep_csv(std::ostream& out, const std::string& param, const std::vector<SweepPoint>& points,
                     const std::string& header);

}  // namespace rydphon
