#pragma once

#include <array>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pzshell::mesh {

class MeshError : public std::runtime_error {
public:
    explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Sides of the rectangular parameter domain [0,Lx] x [0,Ly].
enum class Side { XMin, XMax, YMin, YMax };

Side side_from_string(const std::string& s);
std::string to_string(Side s);

/// Structured hexahedral mesh of Omega = [0,Lx] x [0,Ly] x (-1,1) with
/// trilinear elements. Lateral boundary tags: clamped sides carry the
/// displacement condition, electrode sides plus both horizontal faces carry
/// the grounded-potential condition.
struct Mesh3 {
    double Lx = 1.0, Ly = 1.0;
    int nx = 0, ny = 0, nz = 0;
    std::set<Side> clamped;
    std::set<Side> electrodes;

    double hx() const { return Lx / nx; }
    double hy() const { return Ly / ny; }
    double hz() const { return 2.0 / nz; }
    int nnx() const { return nx + 1; }
    int nny() const { return ny + 1; }
    int nnz() const { return nz + 1; }
    int node_count() const { return nnx() * nny() * nnz(); }
    int element_count() const { return nx * ny * nz; }
    int node(int i, int j, int k) const { return (k * nny() + j) * nnx() + i; }

    /// Node coordinates in the scaled domain.
    std::array<double, 3> coords(int i, int j, int k) const {
        return {i * hx(), j * hy(), -1.0 + k * hz()};
    }

    bool node_clamped(int i, int j) const;
    bool node_grounded(int i, int j, int k) const;

    /// Nodes of element (ei,ej,ek), local index a in [0,8), x fastest.
    int element_node(int ei, int ej, int ek, int a) const {
        return node(ei + (a & 1), ej + ((a >> 1) & 1), ek + (a >> 2));
    }
};

Mesh3 build_mesh(double Lx, double Ly, int nx, int ny, int nz,
                 const std::set<Side>& clamped_sides,
                 const std::set<Side>& electrode_sides);

/// Per-side kinematic condition of the plate model. Clamped sides fix the
/// deflection and both rotations; guided sides fix only the rotation normal
/// to the side (symmetry condition), which keeps cylindrical states
/// admissible on the remaining sides.
enum class SideCondition { Free, Clamped, Guided };

/// Structured quadrilateral mesh of omega = [0,Lx] x [0,Ly] for the limit
/// model: bicubic Hermite deflection space and bilinear membrane space.
struct Mesh2 {
    double Lx = 1.0, Ly = 1.0;
    int nx = 0, ny = 0;
    std::array<SideCondition, 4> side{SideCondition::Free, SideCondition::Free,
                                      SideCondition::Free, SideCondition::Free};

    double hx() const { return Lx / nx; }
    double hy() const { return Ly / ny; }
    int nnx() const { return nx + 1; }
    int nny() const { return ny + 1; }
    int node_count() const { return nnx() * nny(); }
    int element_count() const { return nx * ny; }
    int node(int i, int j) const { return j * nnx() + i; }

    SideCondition condition(Side s) const { return side[static_cast<int>(s)]; }
    void set_condition(Side s, SideCondition c) { side[static_cast<int>(s)] = c; }

    /// Deflection DOFs per node: (w, w_x, w_y, w_xy). Returns the mask of
    /// constrained DOF types at the node.
    std::array<bool, 4> deflection_constraints(int i, int j) const;
    /// Membrane DOFs per node: (u1, u2); constrained components at the node.
    std::array<bool, 2> membrane_constraints(int i, int j) const;
};

Mesh2 build_mesh2(double Lx, double Ly, int nx, int ny,
                  const std::set<Side>& clamped_sides,
                  const std::set<Side>& guided_sides = {});

}  // namespace pzshell::mesh
