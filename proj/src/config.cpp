#include "pzshell/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace pzshell::cli {

using nlohmann::json;

namespace {

// Voigt pair order for symmetric index pairs: 11, 22, 33, 23, 13, 12.
constexpr int kVoigt[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};

std::set<mesh::Side> parse_sides(const json& j, const std::string& field) {
    std::set<mesh::Side> sides;
    if (!j.is_array()) throw ConfigError(field + ": expected an array of side names");
    for (const auto& s : j) {
        if (!s.is_string()) throw ConfigError(field + ": side entries must be strings");
        try {
            sides.insert(mesh::side_from_string(s.get<std::string>()));
        } catch (const mesh::MeshError& e) {
            throw ConfigError(field + ": " + e.what());
        }
    }
    return sides;
}

geom::MidsurfaceGeometry parse_theta(const json& j) {
    const std::string family = j.value("family", "flat");
    if (family == "flat") return geom::MidsurfaceGeometry::flat();
    if (family == "paraboloid") {
        const auto c = j.at("coeffs");
        if (!c.is_array() || c.size() != 2)
            throw ConfigError("geometry.theta.coeffs: paraboloid expects [c1, c2]");
        return geom::MidsurfaceGeometry::paraboloid(c[0].get<double>(), c[1].get<double>());
    }
    if (family == "saddle") {
        const auto c = j.at("coeffs");
        if (!c.is_array() || c.size() != 1)
            throw ConfigError("geometry.theta.coeffs: saddle expects [c]");
        return geom::MidsurfaceGeometry::saddle(c[0].get<double>());
    }
    if (family == "polynomial") {
        const auto terms = j.at("terms");
        if (!terms.is_array() || terms.empty())
            throw ConfigError("geometry.theta.terms: polynomial expects [[i, j, c], ...]");
        std::vector<geom::MidsurfaceGeometry::Monomial> ms;
        for (const auto& t : terms) {
            if (!t.is_array() || t.size() != 3)
                throw ConfigError("geometry.theta.terms: each term is [i, j, c]");
            geom::MidsurfaceGeometry::Monomial mm;
            mm.i = t[0].get<int>();
            mm.j = t[1].get<int>();
            mm.c = t[2].get<double>();
            if (mm.i < 0 || mm.j < 0)
                throw ConfigError("geometry.theta.terms: exponents must be nonnegative");
            ms.push_back(mm);
        }
        return geom::MidsurfaceGeometry::polynomial(std::move(ms));
    }
    throw ConfigError("geometry.theta.family: unknown family '" + family + "'");
}

}  // namespace

mesh::Mesh3 RunConfig::mesh3() const {
    return mesh::build_mesh(Lx, Ly, nx, ny, nz, clamped_sides, electrode_sides);
}

mesh::Mesh2 RunConfig::mesh2() const {
    return mesh::build_mesh2(Lx, Ly, nx2d, ny2d, clamped_sides, guided_sides);
}

fem3d::AssemblyOptions RunConfig::assembly_options() const {
    fem3d::AssemblyOptions o;
    o.assumed_strain = assumed_strain;
    o.quadrature = quadrature;
    return o;
}

void RunConfig::validate() const {
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw ConfigError("geometry: Lx and Ly must be positive");
    try {
        mat.validate();
    } catch (const material::MaterialError& e) {
        throw ConfigError(std::string("material: ") + e.what());
    }
    if (nx < 2 || ny < 2 || nz < 2) throw ConfigError("mesh: nx, ny, nz must be >= 2");
    if (nx2d < 1 || ny2d < 1) throw ConfigError("mesh: nx2d, ny2d must be >= 1");
    if (clamped_sides.empty())
        throw ConfigError("boundary.clamped_sides: meas(gamma_0)=0; need at least one side");
    if (electrode_sides.empty())
        throw ConfigError("boundary.electrode_sides: meas(gamma_e)=0; need at least one side");
    for (mesh::Side s : guided_sides)
        if (clamped_sides.count(s))
            throw ConfigError("boundary.guided_sides: side " + mesh::to_string(s) +
                              " is also clamped");
    if (m_count < 1) throw ConfigError("solve.m_count: must be >= 1");
    if (eps_list.empty()) throw ConfigError("solve.eps_list: must be nonempty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0) || !(eps_list[i] <= 1.0))
            throw ConfigError("solve.eps_list: entries must lie in (0, 1]");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ConfigError("solve.eps_list: entries must be strictly decreasing");
    }
    if (quadrature != 0 && quadrature != 2 && quadrature != 3)
        throw ConfigError("solve.quadrature: supported values are 0 (auto), 2 and 3");
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        const auto& jg = j.at("geometry");
        cfg.Lx = jg.value("Lx", 1.0);
        cfg.Ly = jg.value("Ly", 1.0);
        if (jg.contains("theta")) cfg.theta = parse_theta(jg.at("theta"));

        const auto& jm = j.at("material");
        cfg.mat.lambda = jm.at("lambda").get<double>();
        cfg.mat.mu = jm.at("mu").get<double>();
        if (jm.contains("p_hat")) {
            const auto& p = jm.at("p_hat");
            if (!p.is_array() || p.size() != 3)
                throw ConfigError("material.p_hat: expected 3 rows of 6 entries");
            for (int k = 0; k < 3; ++k) {
                if (!p[static_cast<std::size_t>(k)].is_array() ||
                    p[static_cast<std::size_t>(k)].size() != 6)
                    throw ConfigError("material.p_hat: each row needs 6 entries");
                for (int v = 0; v < 6; ++v) {
                    const double val =
                        p[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)].get<double>();
                    cfg.mat.P_hat(k, kVoigt[v][0], kVoigt[v][1]) = val;
                    cfg.mat.P_hat(k, kVoigt[v][1], kVoigt[v][0]) = val;
                }
            }
        }
        if (jm.contains("e_hat")) {
            const auto& e = jm.at("e_hat");
            if (!e.is_array() || e.size() != 6)
                throw ConfigError("material.e_hat: expected 6 entries (11,22,33,23,13,12)");
            for (int v = 0; v < 6; ++v) {
                const double val = e[static_cast<std::size_t>(v)].get<double>();
                cfg.mat.E_hat(kVoigt[v][0], kVoigt[v][1]) = val;
                cfg.mat.E_hat(kVoigt[v][1], kVoigt[v][0]) = val;
            }
        }
        std::string bending = jm.value("bending_mode", "standard");
        if (j.contains("solve") && j.at("solve").contains("bending_mode"))
            bending = j.at("solve").at("bending_mode").get<std::string>();
        if (bending == "standard")
            cfg.bending_mode = material::BendingMode::Standard;
        else if (bending == "as-printed")
            cfg.bending_mode = material::BendingMode::AsPrinted;
        else
            throw ConfigError("bending_mode: expected 'standard' or 'as-printed'");

        const auto& jmesh = j.at("mesh");
        cfg.nx = jmesh.value("nx", 8);
        cfg.ny = jmesh.value("ny", 8);
        cfg.nz = jmesh.value("nz", 2);
        cfg.nx2d = jmesh.value("nx2d", 2 * cfg.nx);
        cfg.ny2d = jmesh.value("ny2d", 2 * cfg.ny);

        const auto& jb = j.at("boundary");
        cfg.clamped_sides = parse_sides(jb.at("clamped_sides"), "boundary.clamped_sides");
        cfg.electrode_sides = parse_sides(jb.at("electrode_sides"), "boundary.electrode_sides");
        if (jb.contains("guided_sides"))
            cfg.guided_sides = parse_sides(jb.at("guided_sides"), "boundary.guided_sides");

        const auto& js = j.at("solve");
        cfg.m_count = js.value("m_count", 1);
        cfg.eps_list = js.at("eps_list").get<std::vector<double>>();
        const std::string rec = js.value("reconstruction", "constructed");
        if (rec == "constructed")
            cfg.reconstruction = fem2d::PotentialVariant::Constructed;
        else if (rec == "compact")
            cfg.reconstruction = fem2d::PotentialVariant::Compact;
        else
            throw ConfigError("solve.reconstruction: expected 'constructed' or 'compact'");
        cfg.seed = js.value("seed", 1ULL);
        const std::string mode = js.value("mode", "shift-invert");
        if (mode == "dense")
            cfg.solve_mode = eig::SolveMode::Dense;
        else if (mode == "shift-invert")
            cfg.solve_mode = eig::SolveMode::ShiftInvert;
        else
            throw ConfigError("solve.mode: expected 'dense' or 'shift-invert'");
        const std::string element = js.value("element", "assumed-strain");
        if (element == "assumed-strain")
            cfg.assumed_strain = true;
        else if (element == "compatible")
            cfg.assumed_strain = false;
        else
            throw ConfigError("solve.element: expected 'assumed-strain' or 'compatible'");
        cfg.quadrature = js.value("quadrature", 0);

        if (j.contains("output")) {
            const auto& jo = j.at("output");
            cfg.out_dir = jo.value("directory", std::string("out"));
            if (jo.contains("formats")) {
                cfg.write_csv = false;
                cfg.write_json = false;
                for (const auto& f : jo.at("formats")) {
                    const std::string fs = f.get<std::string>();
                    if (fs == "csv")
                        cfg.write_csv = true;
                    else if (fs == "json")
                        cfg.write_json = true;
                    else
                        throw ConfigError("output.formats: unknown format '" + fs + "'");
                }
            }
            cfg.mode_shapes = jo.value("mode_shapes", false);
            cfg.dump_matrices = jo.value("debug_dump_matrices", false);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_echo_json(const RunConfig& cfg) {
    json j;
    j["geometry"]["Lx"] = cfg.Lx;
    j["geometry"]["Ly"] = cfg.Ly;
    switch (cfg.theta.family()) {
        case geom::MidsurfaceGeometry::Family::Flat:
            j["geometry"]["theta"]["family"] = "flat";
            break;
        case geom::MidsurfaceGeometry::Family::Paraboloid:
            j["geometry"]["theta"]["family"] = "paraboloid";
            j["geometry"]["theta"]["coeffs"] = {cfg.theta.terms()[0].c, cfg.theta.terms()[1].c};
            break;
        case geom::MidsurfaceGeometry::Family::Saddle:
            j["geometry"]["theta"]["family"] = "saddle";
            j["geometry"]["theta"]["coeffs"] = {cfg.theta.terms()[0].c};
            break;
        case geom::MidsurfaceGeometry::Family::Polynomial:
            j["geometry"]["theta"]["family"] = "polynomial";
            for (const auto& t : cfg.theta.terms())
                j["geometry"]["theta"]["terms"].push_back({t.i, t.j, t.c});
            break;
    }
    j["material"]["lambda"] = cfg.mat.lambda;
    j["material"]["mu"] = cfg.mat.mu;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> row;
        for (int v = 0; v < 6; ++v) row.push_back(cfg.mat.P_hat(k, kVoigt[v][0], kVoigt[v][1]));
        j["material"]["p_hat"].push_back(row);
    }
    for (int v = 0; v < 6; ++v)
        j["material"]["e_hat"].push_back(cfg.mat.E_hat(kVoigt[v][0], kVoigt[v][1]));
    j["material"]["bending_mode"] =
        cfg.bending_mode == material::BendingMode::Standard ? "standard" : "as-printed";
    j["mesh"] = {{"nx", cfg.nx}, {"ny", cfg.ny}, {"nz", cfg.nz},
                 {"nx2d", cfg.nx2d}, {"ny2d", cfg.ny2d}};
    auto side_names = [](const std::set<mesh::Side>& ss) {
        std::vector<std::string> v;
        for (auto s : ss) v.push_back(mesh::to_string(s));
        return v;
    };
    j["boundary"]["clamped_sides"] = side_names(cfg.clamped_sides);
    j["boundary"]["electrode_sides"] = side_names(cfg.electrode_sides);
    j["boundary"]["guided_sides"] = side_names(cfg.guided_sides);
    j["solve"]["m_count"] = cfg.m_count;
    j["solve"]["eps_list"] = cfg.eps_list;
    j["solve"]["reconstruction"] =
        cfg.reconstruction == fem2d::PotentialVariant::Constructed ? "constructed" : "compact";
    j["solve"]["seed"] = cfg.seed;
    j["solve"]["mode"] = cfg.solve_mode == eig::SolveMode::Dense ? "dense" : "shift-invert";
    j["solve"]["element"] = cfg.assumed_strain ? "assumed-strain" : "compatible";
    j["solve"]["quadrature"] = cfg.quadrature;
    j["output"]["directory"] = cfg.out_dir;
    j["output"]["mode_shapes"] = cfg.mode_shapes;
    return j.dump(2);
}

}  // namespace pzshell::cli
