// Python bindings for the main operations: limit solve, scaled 3D solve,
// thickness sweep and the validation suite, all driven by the same JSON
// configuration the CLI consumes, plus a few closed-form helpers.

#include "pzshell/runner.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

namespace py = pybind11;
using namespace pzshell;

namespace {

std::vector<double> to_vec(const eig::Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

py::dict limit_report_dict(const fem2d::LimitEigenReport& rep) {
    py::dict d;
    d["xi"] = to_vec(rep.xi);
    d["xi_bulk"] = to_vec(rep.xi_bulk);
    d["gram_residual"] = rep.gram_residual;
    d["solver_residuals"] = to_vec(rep.solver_residuals);
    return d;
}

py::dict sweep_dict(const cli::SweepResult& res) {
    py::dict d;
    py::list rows;
    for (const auto& r : res.table.rows) {
        py::dict row;
        row["eps"] = r.eps;
        row["mode"] = r.mode;
        row["xi_eps"] = r.xi_eps;
        row["xi_limit"] = r.xi_limit;
        row["xi_gap"] = r.xi_gap;
        row["h1_error_disp"] = r.h1_error_disp;
        row["l2_error_phi"] = r.l2_error_phi;
        row["l2_error_dphi3"] = r.l2_error_dphi3;
        row["overlap"] = r.overlap;
        row["flagged"] = r.flagged;
        rows.append(row);
    }
    d["rows"] = rows;
    py::list slopes;
    for (const auto& s : res.slopes) {
        py::dict e;
        e["mode"] = s.mode;
        e["quantity"] = s.quantity;
        e["slope"] = s.slope;
        e["r_squared"] = s.r_squared;
        e["monotone"] = s.monotone;
        slopes.append(e);
    }
    d["slopes"] = slopes;
    d["limit"] = limit_report_dict(res.limit);
    py::list rel;
    for (const auto& run : res.runs) {
        py::dict e;
        e["eps"] = run.eps;
        e["xi"] = to_vec(run.spectrum.values);
        e["shear_residual"] = run.strain_relations.shear_residual;
        e["thickness_residual"] = run.strain_relations.thickness_residual;
        rel.append(e);
    }
    d["runs"] = rel;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Piezoelectric shallow-shell eigenvalue solvers: scaled 3D model, "
              "two-dimensional limit model and the thickness-sweep harness.";

    m.def(
        "solve2d",
        [](const std::string& config_json, bool write_files) {
            const auto cfg = cli::parse_config(config_json);
            const auto res = cli::run_solve2d(cfg, write_files);
            return limit_report_dict(res.report);
        },
        py::arg("config_json"), py::arg("write_files") = false,
        "Solve the two-dimensional limit eigenproblem for a JSON configuration.");

    m.def(
        "solve3d",
        [](const std::string& config_json, double eps, bool write_files) {
            const auto cfg = cli::parse_config(config_json);
            const auto res = cli::run_solve3d(cfg, eps, write_files);
            py::dict d;
            d["eps"] = res.eps;
            d["xi"] = to_vec(res.spectrum.values);
            d["residuals"] = to_vec(res.spectrum.residuals);
            d["shear_residual"] = res.strain_relations.shear_residual;
            d["thickness_residual"] = res.strain_relations.thickness_residual;
            return d;
        },
        py::arg("config_json"), py::arg("eps"), py::arg("write_files") = false,
        "Solve the scaled three-dimensional eigenproblem at one thickness ratio.");

    m.def(
        "sweep",
        [](const std::string& config_json, bool write_files) {
            const auto cfg = cli::parse_config(config_json);
            return sweep_dict(cli::run_sweep(cfg, write_files));
        },
        py::arg("config_json"), py::arg("write_files") = false,
        "Thickness sweep: per-eps eigenvalues and errors against the limit model.");

    m.def(
        "validate",
        [](const std::string& config_json, bool write_files) {
            const auto cfg = cli::parse_config(config_json);
            const auto checks = cli::run_validate(cfg, write_files);
            py::list out;
            for (const auto& c : checks) {
                py::dict d;
                d["name"] = c.name;
                d["passed"] = c.passed;
                d["value"] = c.value;
                d["bound"] = c.bound;
                d["detail"] = c.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("config_json"), py::arg("write_files") = false,
        "Run the structural validation suite and return per-check verdicts.");

    m.def(
        "limit_coefficients",
        [](double lam, double mu, const std::vector<std::vector<double>>& p_hat,
           const std::vector<double>& e_hat, const std::string& bending_mode) {
            static const int kV[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
            material::MaterialConstants mat;
            mat.lambda = lam;
            mat.mu = mu;
            if (p_hat.size() != 3) throw std::invalid_argument("p_hat needs 3 rows");
            for (int k = 0; k < 3; ++k) {
                if (p_hat[static_cast<std::size_t>(k)].size() != 6)
                    throw std::invalid_argument("p_hat rows need 6 entries");
                for (int v = 0; v < 6; ++v) {
                    const double val = p_hat[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
                    mat.P_hat(k, kV[v][0], kV[v][1]) = val;
                    mat.P_hat(k, kV[v][1], kV[v][0]) = val;
                }
            }
            if (e_hat.size() != 6) throw std::invalid_argument("e_hat needs 6 entries");
            for (int v = 0; v < 6; ++v) {
                mat.E_hat(kV[v][0], kV[v][1]) = e_hat[static_cast<std::size_t>(v)];
                mat.E_hat(kV[v][1], kV[v][0]) = e_hat[static_cast<std::size_t>(v)];
            }
            const auto mode = bending_mode == "as-printed" ? material::BendingMode::AsPrinted
                                                           : material::BendingMode::Standard;
            const auto c = material::limit_coefficients(mat, mode);
            py::dict d;
            d["p33"] = c.p33;
            d["p3ab"] = std::vector<std::vector<double>>{{c.p3ab(0, 0), c.p3ab(0, 1)},
                                                         {c.p3ab(1, 0), c.p3ab(1, 1)}};
            d["bend_lapl"] = c.bend_lapl;
            d["bend_hess"] = c.bend_hess;
            d["mem_trace"] = c.mem_trace;
            d["mem_dev"] = c.mem_dev;
            return d;
        },
        py::arg("lam"), py::arg("mu"), py::arg("p_hat"), py::arg("e_hat"),
        py::arg("bending_mode") = "standard",
        "Closed-form coefficients of the two-dimensional limit model.");

    py::register_exception<cli::ConfigError>(m, "ConfigError");
    py::register_exception<cli::SolverFailure>(m, "SolverFailure");
}
