#include "ioncavity/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ioncavity/constants.hpp"
#include "ioncavity/errors.hpp"

namespace ioncavity::csv {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) {
        fields.push_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_cell(const std::string& cell, std::size_t line_number) {
    try {
        std::size_t used = 0;
        const double value = std::stod(cell, &used);
        if (used != cell.size()) {
            throw std::invalid_argument(cell);
        }
        return value;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": cannot parse '" + cell + "' as a number");
    }
}

double khz_to_angular(double khz) { return constants::two_pi * khz * 1e3; }
double angular_to_khz(double omega) { return omega / (constants::two_pi * 1e3); }

} // namespace

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

void write_positions(std::ostream& out, const TrapConfig& config,
                     const ChainSolution& solution) {
    const double half_wavelength = 0.5 * config.wavelength;
    out << "ion_index,z_m,z_half_wavelengths\n";
    for (int i = 0; i < solution.num_ions; ++i) {
        const double z = solution.positions[static_cast<std::size_t>(i)];
        out << i << ',' << format_number(z) << ','
            << format_number(z / half_wavelength) << '\n';
    }
}

void write_modes(std::ostream& out, const ChainSolution& solution) {
    out << "mode_index,eigenvalue,freq_hz";
    for (int i = 0; i < solution.num_ions; ++i) {
        out << ",u_" << i;
    }
    out << '\n';
    for (int j = 0; j < solution.num_ions; ++j) {
        out << j << ','
            << format_number(solution.mode_eigenvalues[static_cast<std::size_t>(j)])
            << ','
            << format_number(solution.mode_frequency(j) / constants::two_pi);
        for (int i = 0; i < solution.num_ions; ++i) {
            out << ',' << format_number(solution.mode_component(i, j));
        }
        out << '\n';
    }
}

void write_visibility(std::ostream& out, const VisibilityCurve& curve,
                      bool include_sigma) {
    out << (include_sigma ? "freq_khz,visibility,sigma\n" : "freq_khz,visibility\n");
    for (const VisibilityPoint& point : curve) {
        out << format_number(angular_to_khz(point.com_frequency)) << ','
            << format_number(point.visibility);
        if (include_sigma) {
            out << ',' << format_number(point.uncertainty);
        }
        out << '\n';
    }
}

void write_scan(std::ostream& out, const ScanTrace& trace) {
    out << "displacement_nm,counts\n";
    for (std::size_t i = 0; i < trace.displacements.size(); ++i) {
        out << format_number(trace.displacements[i] * 1e9) << ','
            << trace.counts[i] << '\n';
    }
}

Table read_table(std::istream& in) {
    Table table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        if (table.columns.empty()) {
            table.columns = split_fields(stripped);
            if (table.columns.empty()) {
                throw ConfigError("empty CSV header row");
            }
            continue;
        }
        const std::vector<std::string> cells = split_fields(stripped);
        if (cells.size() != table.columns.size()) {
            throw ConfigError("line " + std::to_string(line_number) + ": expected " +
                              std::to_string(table.columns.size()) + " fields, got " +
                              std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            row[i] = parse_cell(cells[i], line_number);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.columns.empty()) {
        throw ConfigError("CSV input contains no header row");
    }
    return table;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "' for reading");
    }
    return read_table(in);
}

VisibilityCurve to_visibility_curve(const Table& table) {
    const bool has_sigma = table.columns.size() == 3 && table.columns[2] == "sigma";
    if (!(table.columns.size() >= 2 && table.columns[0] == "freq_khz" &&
          table.columns[1] == "visibility" &&
          (table.columns.size() == 2 || has_sigma))) {
        throw ConfigError("expected columns freq_khz,visibility[,sigma]");
    }
    VisibilityCurve curve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        curve[i].com_frequency = khz_to_angular(table.rows[i][0]);
        curve[i].visibility = table.rows[i][1];
        curve[i].uncertainty = has_sigma ? table.rows[i][2] : 0.0;
    }
    return curve;
}

ScanTrace to_scan_trace(const Table& table) {
    if (!(table.columns.size() == 2 && table.columns[0] == "displacement_nm" &&
          table.columns[1] == "counts")) {
        throw ConfigError("expected columns displacement_nm,counts");
    }
    ScanTrace trace;
    trace.displacements.resize(table.rows.size());
    trace.counts.resize(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        trace.displacements[i] = table.rows[i][0] * 1e-9;
        const double counts = table.rows[i][1];
        if (counts < 0.0) {
            throw ConfigError("negative count in scan row " + std::to_string(i));
        }
        trace.counts[i] = static_cast<long long>(counts + 0.5);
    }
    return trace;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    out << contents;
    if (!out) {
        throw ConfigError("failed writing '" + path + "'");
    }
}

} // namespace ioncavity::csv
