#pragma once

#include "pzshell/eigsolve.hpp"

#include <string>
#include <vector>

namespace pzshell::cli {

/// One row of the thickness-sweep comparison table.
struct SweepRow {
    double eps = 0.0;
    int mode = 0;
    double xi_eps = 0.0;
    double xi_limit = 0.0;
    double xi_gap = 0.0;           // |xi_eps - xi_limit|
    double h1_error_disp = 0.0;    // H1(Omega) error against the reconstructed field
    double l2_error_phi = 0.0;     // L2(Omega) error against the reconstructed potential
    double l2_error_dphi3 = 0.0;   // L2 error of the thickness potential gradient
    double overlap = 0.0;          // mass-weighted modal overlap used for matching
    bool flagged = false;          // overlap below threshold; excluded from slope fits
};

struct ConvergenceTable {
    std::vector<SweepRow> rows;
};

/// Fixed-format helpers: CSV with 17 significant digits and stable column
/// order, plus JSON mirrors carrying identical values.
std::string format_double(double v);

std::string sweep_csv(const ConvergenceTable& table);
std::string sweep_json(const ConvergenceTable& table);
ConvergenceTable parse_sweep_csv(const std::string& text);

struct SlopeEntry {
    int mode = 0;
    std::string quantity;
    double slope = 0.0;
    double r_squared = 0.0;
    bool monotone = false;
};

std::string slopes_json(const std::vector<SlopeEntry>& entries);

struct LimitEigRow {
    int mode = 0;
    double xi = 0.0;
    double xi_bulk = 0.0;
};

std::string limit_eigs_csv(const std::vector<LimitEigRow>& rows);
std::vector<LimitEigRow> parse_limit_eigs_csv(const std::string& text);

/// One verdict of the validation suite.
struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double bound = 0.0;
    std::string detail;
};

std::string validate_json(const std::vector<CheckResult>& checks);

/// Long-format (quantity, eps, mode, value) records for external plotting.
std::string long_format_csv(const ConvergenceTable& table);

/// Coordinate-format text dump of a sparse or dense symmetric matrix.
std::string matrix_market(const eig::SparseMat& m);
std::string matrix_market(const eig::Matrix& m);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pzshell::cli
