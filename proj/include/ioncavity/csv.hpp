#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ioncavity/chain.hpp"
#include "ioncavity/config.hpp"
#include "ioncavity/coupling.hpp"
#include "ioncavity/scan.hpp"

// CSV dialect used throughout: comma separator, one header row, '\n' line
// endings, '.' decimal separator, real numbers at 9 significant digits.
// Files are opened in binary mode so output is byte-identical across
// platforms. Frequencies cross this boundary in ordinary kHz (or Hz where
// the column says so), displacements in nm; everything internal stays SI
// with angular frequencies.
namespace ioncavity::csv {

// 9-significant-digit representation used for all real-valued cells.
std::string format_number(double value);

// Columns: ion_index,z_m,z_half_wavelengths
void write_positions(std::ostream& out, const TrapConfig& config,
                     const ChainSolution& solution);

// Columns: mode_index,eigenvalue,freq_hz,u_0..u_{N-1}
void write_modes(std::ostream& out, const ChainSolution& solution);

// Columns: freq_khz,visibility and optionally a third sigma column.
void write_visibility(std::ostream& out, const VisibilityCurve& curve,
                      bool include_sigma = false);

// Columns: displacement_nm,counts
void write_scan(std::ostream& out, const ScanTrace& trace);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows; // rectangular, columns.size() wide
};

// Parses a header row plus numeric records; '#' lines and blank lines are
// skipped. Ragged or non-numeric rows raise ConfigError.
Table read_table(std::istream& in);
Table read_table_file(const std::string& path);

// Interprets a table with columns freq_khz,visibility[,sigma].
VisibilityCurve to_visibility_curve(const Table& table);

// Interprets a table with columns displacement_nm,counts. bin_time,
// mean_rate and seed are not stored in the CSV and stay zero.
ScanTrace to_scan_trace(const Table& table);

void write_text_file(const std::string& path, const std::string& contents);

} // namespace ioncavity::csv
