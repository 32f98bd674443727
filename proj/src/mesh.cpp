#include "pzshell/mesh.hpp"

namespace pzshell::mesh {

Side side_from_string(const std::string& s) {
    if (s == "x0" || s == "xmin") return Side::XMin;
    if (s == "x1" || s == "xmax") return Side::XMax;
    if (s == "y0" || s == "ymin") return Side::YMin;
    if (s == "y1" || s == "ymax") return Side::YMax;
    throw MeshError("unknown side '" + s + "' (expected x0, x1, y0 or y1)");
}

std::string to_string(Side s) {
    switch (s) {
        case Side::XMin: return "x0";
        case Side::XMax: return "x1";
        case Side::YMin: return "y0";
        case Side::YMax: return "y1";
    }
    return "?";
}

namespace {

bool on_side(Side s, int i, int j, int nx, int ny) {
    switch (s) {
        case Side::XMin: return i == 0;
        case Side::XMax: return i == nx;
        case Side::YMin: return j == 0;
        case Side::YMax: return j == ny;
    }
    return false;
}

}  // namespace

bool Mesh3::node_clamped(int i, int j) const {
    for (Side s : clamped)
        if (on_side(s, i, j, nx, ny)) return true;
    return false;
}

bool Mesh3::node_grounded(int i, int j, int k) const {
    if (k == 0 || k == nz) return true;  // both horizontal faces are electroded
    for (Side s : electrodes)
        if (on_side(s, i, j, nx, ny)) return true;
    return false;
}

Mesh3 build_mesh(double Lx, double Ly, int nx, int ny, int nz,
                 const std::set<Side>& clamped_sides,
                 const std::set<Side>& electrode_sides) {
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw MeshError("build_mesh: Lx, Ly must be positive");
    if (nx < 2 || ny < 2 || nz < 2) throw MeshError("build_mesh: nx, ny, nz must be >= 2");
    if (clamped_sides.empty())
        throw MeshError("build_mesh: meas(gamma_0)=0; at least one clamped side is required");
    if (electrode_sides.empty())
        throw MeshError("build_mesh: meas(gamma_e)=0; at least one electrode side is required");
    Mesh3 m;
    m.Lx = Lx;
    m.Ly = Ly;
    m.nx = nx;
    m.ny = ny;
    m.nz = nz;
    m.clamped = clamped_sides;
    m.electrodes = electrode_sides;
    return m;
}

std::array<bool, 4> Mesh2::deflection_constraints(int i, int j) const {
    std::array<bool, 4> c{false, false, false, false};  // w, wx, wy, wxy
    auto apply = [&](Side s) {
        const SideCondition sc = condition(s);
        if (sc == SideCondition::Free || !on_side(s, i, j, nx, ny)) return;
        const bool xside = (s == Side::XMin || s == Side::XMax);
        if (sc == SideCondition::Clamped) {
            // w and the tangential derivative vanish along the side, the normal
            // derivative is prescribed zero, hence the mixed DOF vanishes too.
            c = {true, true, true, true};
        } else {  // Guided: zero normal rotation, deflection free
            if (xside) {
                c[1] = true;  // w_x
            } else {
                c[2] = true;  // w_y
            }
            c[3] = true;  // w_xy is the tangential derivative of the normal rotation
        }
    };
    apply(Side::XMin);
    apply(Side::XMax);
    apply(Side::YMin);
    apply(Side::YMax);
    return c;
}

std::array<bool, 2> Mesh2::membrane_constraints(int i, int j) const {
    std::array<bool, 2> c{false, false};
    auto apply = [&](Side s) {
        const SideCondition sc = condition(s);
        if (sc == SideCondition::Free || !on_side(s, i, j, nx, ny)) return;
        const bool xside = (s == Side::XMin || s == Side::XMax);
        if (sc == SideCondition::Clamped) {
            c = {true, true};
        } else {  // Guided: symmetry plane, normal in-plane component vanishes
            c[xside ? 0 : 1] = true;
        }
    };
    apply(Side::XMin);
    apply(Side::XMax);
    apply(Side::YMin);
    apply(Side::YMax);
    return c;
}

Mesh2 build_mesh2(double Lx, double Ly, int nx, int ny,
                  const std::set<Side>& clamped_sides,
                  const std::set<Side>& guided_sides) {
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw MeshError("build_mesh2: Lx, Ly must be positive");
    if (nx < 1 || ny < 1) throw MeshError("build_mesh2: nx, ny must be >= 1");
    if (clamped_sides.empty())
        throw MeshError("build_mesh2: meas(gamma_0)=0; at least one clamped side is required");
    Mesh2 m;
    m.Lx = Lx;
    m.Ly = Ly;
    m.nx = nx;
    m.ny = ny;
    for (Side s : clamped_sides) m.set_condition(s, SideCondition::Clamped);
    for (Side s : guided_sides) {
        if (clamped_sides.count(s))
            throw MeshError("build_mesh2: side " + to_string(s) + " is both clamped and guided");
        m.set_condition(s, SideCondition::Guided);
    }
    return m;
}

}  // namespace pzshell::mesh
