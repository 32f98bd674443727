#pragma once

#include "pzshell/eigsolve.hpp"
#include "pzshell/fem2d.hpp"
#include "pzshell/geometry.hpp"
#include "pzshell/material.hpp"
#include "pzshell/mesh.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pzshell::cli {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Full run configuration, parsed from a JSON file with blocks
/// geometry / material / mesh / boundary / solve / output. Validation rejects
/// physically inadmissible input before any solve.
struct RunConfig {
    // geometry
    double Lx = 1.0, Ly = 1.0;
    geom::MidsurfaceGeometry theta = geom::MidsurfaceGeometry::flat();

    // material
    material::MaterialConstants mat;
    material::BendingMode bending_mode = material::BendingMode::Standard;

    // mesh
    int nx = 8, ny = 8, nz = 2;
    int nx2d = 16, ny2d = 16;

    // boundary
    std::set<mesh::Side> clamped_sides;
    std::set<mesh::Side> electrode_sides;
    std::set<mesh::Side> guided_sides;

    // solve
    int m_count = 1;
    std::vector<double> eps_list;
    fem2d::PotentialVariant reconstruction = fem2d::PotentialVariant::Constructed;
    std::uint64_t seed = 1;
    eig::SolveMode solve_mode = eig::SolveMode::ShiftInvert;
    bool assumed_strain = true;
    int quadrature = 0;  // 0 = automatic

    // output
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;
    bool mode_shapes = false;
    bool dump_matrices = false;

    mesh::Mesh3 mesh3() const;
    mesh::Mesh2 mesh2() const;
    fem3d::AssemblyOptions assembly_options() const;

    /// Throws ConfigError with a field-level message on the first violation.
    void validate() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_echo_json(const RunConfig& cfg);

}  // namespace pzshell::cli
