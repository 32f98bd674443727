#pragma once

#include "pzshell/config.hpp"
#include "pzshell/fem2d.hpp"
#include "pzshell/fem3d.hpp"
#include "pzshell/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pzshell::cli {

class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

struct Solve2DResult {
    fem2d::LimitEigenReport report;
    std::vector<LimitEigRow> rows;
};

/// Solves the limit problem and (optionally) writes limit_eigs.csv plus mode
/// shape grids to cfg.out_dir.
Solve2DResult run_solve2d(const RunConfig& cfg, bool write_files = true);

struct Solve3DResult {
    double eps = 0.0;
    fem3d::CoupledSystem system;
    eig::Spectrum spectrum;
    std::vector<eig::Vector> potentials;          // recovered per mode
    fem2d::StrainRelationReport strain_relations; // for the first mode
};

Solve3DResult run_solve3d(const RunConfig& cfg, double eps, bool write_files = true);

struct SweepResult {
    fem2d::LimitEigenReport limit;
    std::vector<Solve3DResult> runs;  // one per eps, decreasing
    ConvergenceTable table;
    std::vector<SlopeEntry> slopes;
};

/// Thickness sweep: solves the limit problem once, the scaled 3D problem for
/// every eps, matches modes by mass-weighted overlap and writes sweep.csv,
/// sweep.json, sweep_long.csv, slopes.json and config_echo.json.
SweepResult run_sweep(const RunConfig& cfg, bool write_files = true);

/// Structural validation suite at reduced mesh sizes; writes validate.json.
std::vector<CheckResult> run_validate(const RunConfig& cfg, bool write_files = true);

/// Deflection mode rescaled so that its squared integral over omega is 1/2,
/// matching the thickness-integrated normalization of the 3D modes.
eig::Vector bulk_normalized_deflection(const fem2d::LimitEigenReport& rep, int mode);

}  // namespace pzshell::cli
