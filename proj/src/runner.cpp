#include "pzshell/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace pzshell::cli {

using eig::Matrix;
using eig::Vector;
using geom::Mat3;
using geom::Vec3;

namespace {

struct Gauss3 {
    std::array<double, 3> p{}, w{};
};

Gauss3 gauss3_01() {
    const double b = 0.5 * std::sqrt(3.0 / 5.0);
    return {{0.5 - b, 0.5, 0.5 + b}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
}

std::string eps_tag(double eps) {
    std::ostringstream os;
    os << eps;
    std::string s = os.str();
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

}  // namespace

Vector bulk_normalized_deflection(const fem2d::LimitEigenReport& rep, int mode) {
    // solver normalization: integral of z3^2 over omega equals 1; the
    // thickness-integrated mass of the 3D modes corresponds to 1/2
    return rep.z3_modes[static_cast<std::size_t>(mode)] / std::sqrt(2.0);
}

Solve2DResult run_solve2d(const RunConfig& cfg, bool write_files) {
    const auto m2 = cfg.mesh2();
    const auto coeffs = material::limit_coefficients(cfg.mat, cfg.bending_mode);
    const auto sys = fem2d::assemble_limit(m2, coeffs, cfg.mat, cfg.theta);
    Solve2DResult res;
    try {
        res.report = fem2d::solve_limit_eigen(sys, cfg.m_count, cfg.solve_mode, cfg.seed);
    } catch (const eig::SolverError& e) {
        throw SolverFailure(e.what());
    }
    for (int m = 0; m < cfg.m_count; ++m)
        res.rows.push_back({m + 1, res.report.xi[m], res.report.xi_bulk[m]});
    if (write_files) {
        if (cfg.write_csv)
            write_text_file(cfg.out_dir + "/limit_eigs.csv", limit_eigs_csv(res.rows));
        if (cfg.write_json) {
            std::ostringstream os;
            os << "[\n";
            for (std::size_t i = 0; i < res.rows.size(); ++i) {
                os << "  {\"mode\": " << res.rows[i].mode
                   << ", \"xi\": " << format_double(res.rows[i].xi)
                   << ", \"xi_bulk\": " << format_double(res.rows[i].xi_bulk) << "}"
                   << (i + 1 < res.rows.size() ? ",\n" : "\n");
            }
            os << "]\n";
            write_text_file(cfg.out_dir + "/limit_eigs.json", os.str());
            write_text_file(cfg.out_dir + "/config_echo.json", config_echo_json(cfg));
        }
        if (cfg.mode_shapes) {
            for (int m = 0; m < cfg.m_count; ++m) {
                std::ostringstream os;
                const Vector& z = res.report.z3_modes[static_cast<std::size_t>(m)];
                for (int j = 0; j <= m2.ny; ++j) {
                    for (int i = 0; i <= m2.nx; ++i) {
                        if (i) os << ',';
                        os << format_double(z[4 * m2.node(i, j)]);
                    }
                    os << "\n";
                }
                write_text_file(cfg.out_dir + "/mode_z3_" + std::to_string(m + 1) + ".csv",
                                os.str());
            }
        }
    }
    return res;
}

Solve3DResult run_solve3d(const RunConfig& cfg, double eps, bool write_files) {
    Solve3DResult res;
    res.eps = eps;
    res.system = fem3d::assemble_coupled(cfg.mesh3(), cfg.theta, cfg.mat, eps,
                                         cfg.assembly_options());
    const fem3d::CondensedOperator op(res.system);
    try {
        res.spectrum = eig::solve(op.pencil(), cfg.m_count, cfg.solve_mode, cfg.seed);
    } catch (const eig::SolverError& e) {
        throw SolverFailure(e.what());
    }
    for (int m = 0; m < cfg.m_count; ++m)
        res.potentials.push_back(op.recover_potential(res.spectrum.vectors.col(m)));
    res.strain_relations = fem2d::limit_strain_relations(
        res.system, res.spectrum.vectors.col(0), res.potentials[0]);
    if (write_files) {
        std::ostringstream os;
        os << "mode,xi_scaled,xi_physical\n";
        for (int m = 0; m < cfg.m_count; ++m)
            os << (m + 1) << ',' << format_double(res.spectrum.values[m]) << ','
               << format_double(eps * eps * res.spectrum.values[m]) << "\n";
        if (cfg.write_csv)
            write_text_file(cfg.out_dir + "/eigs3d_eps" + eps_tag(eps) + ".csv", os.str());
        if (cfg.dump_matrices) {
            write_text_file(cfg.out_dir + "/B_eps" + eps_tag(eps) + ".mtx",
                            matrix_market(op.dense()));
            write_text_file(cfg.out_dir + "/M_eps" + eps_tag(eps) + ".mtx",
                            matrix_market(res.system.M));
        }
    }
    return res;
}

namespace {

struct ModeComparison {
    double overlap = 0.0;
    double h1 = 0.0;
    double l2phi = 0.0;
    double l2dphi3 = 0.0;
};

ModeComparison compare_mode(const fem3d::CoupledSystem& sys, const Vector& u_free,
                            const Vector& phi_free, const fem2d::KLField& kl,
                            const fem2d::PotentialField& pot) {
    const mesh::Mesh3& m = sys.mesh;
    // overlap via the assembled mass against the nodal interpolant of the field
    Vector w = Vector::Zero(sys.dofs.n_u);
    for (int k = 0; k <= m.nz; ++k)
        for (int j = 0; j <= m.ny; ++j)
            for (int i = 0; i <= m.nx; ++i) {
                const int n = m.node(i, j, k);
                const auto c = m.coords(i, j, k);
                const Vec3 v = kl.value(Vec3(c[0], c[1], c[2]));
                for (int comp = 0; comp < 3; ++comp) {
                    const int f = sys.dofs.u_index[static_cast<std::size_t>(3 * n + comp)];
                    if (f >= 0) w[f] = v[comp];
                }
            }
    const Vector Mw = sys.M * w;
    const double wn = std::sqrt(std::max(w.dot(Mw), 1e-300));
    const double un = std::sqrt(std::max(u_free.dot(sys.M * u_free), 1e-300));
    ModeComparison out;
    out.overlap = u_free.dot(Mw) / (wn * un);
    const double sgn = out.overlap >= 0.0 ? 1.0 : -1.0;

    const Gauss3 g = gauss3_01();
    double h1 = 0.0, l2p = 0.0, l2d = 0.0;
    Eigen::Matrix<double, 24, 1> ue;
    Eigen::Matrix<double, 8, 1> pe;
    for (int ek = 0; ek < m.nz; ++ek)
        for (int ej = 0; ej < m.ny; ++ej)
            for (int ei = 0; ei < m.nx; ++ei) {
                for (int a = 0; a < 8; ++a) {
                    const int n = m.element_node(ei, ej, ek, a);
                    for (int c = 0; c < 3; ++c) {
                        const int f = sys.dofs.u_index[static_cast<std::size_t>(3 * n + c)];
                        ue[3 * a + c] = (f >= 0) ? sgn * u_free[f] : 0.0;
                    }
                    const int fp = sys.dofs.phi_index[static_cast<std::size_t>(n)];
                    pe[a] = (fp >= 0) ? sgn * phi_free[fp] : 0.0;
                }
                const double x0 = ei * m.hx(), y0 = ej * m.hy(), z0 = -1.0 + ek * m.hz();
                for (int q3 = 0; q3 < 3; ++q3)
                    for (int q2 = 0; q2 < 3; ++q2)
                        for (int q1 = 0; q1 < 3; ++q1) {
                            const double lx = g.p[static_cast<std::size_t>(q1)];
                            const double ly = g.p[static_cast<std::size_t>(q2)];
                            const double lz = g.p[static_cast<std::size_t>(q3)];
                            const double wq = g.w[static_cast<std::size_t>(q1)] *
                                              g.w[static_cast<std::size_t>(q2)] *
                                              g.w[static_cast<std::size_t>(q3)] * m.hx() *
                                              m.hy() * m.hz();
                            const fem3d::ShapeEval se = fem3d::shape_trilinear(m, lx, ly, lz);
                            const Vec3 x(x0 + lx * m.hx(), y0 + ly * m.hy(),
                                         z0 + lz * m.hz());
                            const Vec3 uh = ue.reshaped(3, 8) * se.N;
                            const Mat3 guh = ue.reshaped(3, 8) * se.dN;
                            const double ph = pe.dot(se.N);
                            const double dph3 = pe.dot(se.dN.col(2));
                            const Vec3 ul = kl.value(x);
                            const Mat3 gul = kl.gradient(x);
                            h1 += wq * ((uh - ul).squaredNorm() + (guh - gul).squaredNorm());
                            const double pl = pot.value(x);
                            const double dpl = pot.d3(x);
                            l2p += wq * (ph - pl) * (ph - pl);
                            l2d += wq * (dph3 - dpl) * (dph3 - dpl);
                        }
            }
    out.h1 = std::sqrt(h1);
    out.l2phi = std::sqrt(l2p);
    out.l2dphi3 = std::sqrt(l2d);
    return out;
}

}  // namespace

SweepResult run_sweep(const RunConfig& cfg, bool write_files) {
    SweepResult res;
    const Solve2DResult lim = run_solve2d(cfg, false);
    res.limit = lim.report;
    const auto m2 = cfg.mesh2();
    const auto coeffs = material::limit_coefficients(cfg.mat, cfg.bending_mode);

    std::vector<fem2d::KLField> kl_fields;
    std::vector<fem2d::PotentialField> pot_fields;
    for (int m = 0; m < cfg.m_count; ++m) {
        const Vector z3 = bulk_normalized_deflection(res.limit, m);
        const Vector zh = res.limit.zh_modes[static_cast<std::size_t>(m)] / std::sqrt(2.0);
        kl_fields.push_back(fem2d::reconstruct_kl(m2, zh, z3));
        pot_fields.push_back(
            fem2d::reconstruct_potential(coeffs, m2, z3, cfg.reconstruction));
    }

    for (double eps : cfg.eps_list) res.runs.push_back(run_solve3d(cfg, eps, false));

    for (std::size_t ie = 0; ie < res.runs.size(); ++ie) {
        const auto& run = res.runs[ie];
        for (int m = 0; m < cfg.m_count; ++m) {
            const ModeComparison cmp =
                compare_mode(run.system, run.spectrum.vectors.col(m),
                             run.potentials[static_cast<std::size_t>(m)],
                             kl_fields[static_cast<std::size_t>(m)],
                             pot_fields[static_cast<std::size_t>(m)]);
            SweepRow row;
            row.eps = run.eps;
            row.mode = m + 1;
            row.xi_eps = run.spectrum.values[m];
            row.xi_limit = res.limit.xi_bulk[m];
            row.xi_gap = std::abs(row.xi_eps - row.xi_limit);
            row.h1_error_disp = cmp.h1;
            row.l2_error_phi = cmp.l2phi;
            row.l2_error_dphi3 = cmp.l2dphi3;
            row.overlap = std::abs(cmp.overlap);
            row.flagged = row.overlap < 0.5;
            res.table.rows.push_back(row);
        }
    }

    // decay slopes per mode over unflagged rows
    for (int m = 1; m <= cfg.m_count; ++m) {
        std::vector<double> eps_ok;
        std::vector<double> gap, h1, l2p;
        for (const auto& r : res.table.rows)
            if (r.mode == m && !r.flagged) {
                eps_ok.push_back(r.eps);
                gap.push_back(std::max(r.xi_gap, 1e-300));
                h1.push_back(std::max(r.h1_error_disp, 1e-300));
                l2p.push_back(std::max(r.l2_error_phi, 1e-300));
            }
        auto add = [&](const char* q, const std::vector<double>& v) {
            SlopeEntry e;
            e.mode = m;
            e.quantity = q;
            e.monotone = true;
            for (std::size_t i = 0; i + 1 < v.size(); ++i)
                e.monotone = e.monotone && v[i + 1] < v[i];
            if (eps_ok.size() >= 2) {
                auto [s, r2] = geom::loglog_slope(eps_ok, v);
                e.slope = s;
                e.r_squared = r2;
            }
            res.slopes.push_back(e);
        };
        if (!eps_ok.empty()) {
            add("xi_gap", gap);
            add("h1_error_disp", h1);
            add("l2_error_phi", l2p);
        }
    }

    if (write_files) {
        if (cfg.write_csv) {
            write_text_file(cfg.out_dir + "/sweep.csv", sweep_csv(res.table));
            write_text_file(cfg.out_dir + "/sweep_long.csv", long_format_csv(res.table));
        }
        if (cfg.write_json) {
            write_text_file(cfg.out_dir + "/sweep.json", sweep_json(res.table));
            write_text_file(cfg.out_dir + "/slopes.json", slopes_json(res.slopes));
            write_text_file(cfg.out_dir + "/config_echo.json", config_echo_json(cfg));
        }
    }
    return res;
}

namespace {

RunConfig reduced(const RunConfig& cfg) {
    RunConfig small = cfg;
    small.nx = std::min(cfg.nx, 6);
    small.ny = std::min(cfg.ny, 6);
    small.nz = 2;
    small.nx2d = std::min(cfg.nx2d, 8);
    small.ny2d = std::min(cfg.ny2d, 8);
    small.m_count = std::min(cfg.m_count, 4);
    return small;
}

}  // namespace

std::vector<CheckResult> run_validate(const RunConfig& cfg, bool write_files) {
    std::vector<CheckResult> checks;
    const RunConfig small = reduced(cfg);
    const double eps_max = cfg.eps_list.front();
    const double eps_min = cfg.eps_list.back();

    auto push = [&checks](const std::string& name, bool ok, double value, double bound,
                          const std::string& detail = "") {
        checks.push_back({name, ok, value, bound, detail});
    };

    // frame identities over deterministic sample points
    {
        double dual = 0.0, prod = 0.0, gmin = 1e300, gmax = 0.0;
        const Vector xs = eig::deterministic_vector(90, cfg.seed + 11);
        for (int s = 0; s < 30; ++s) {
            const Vec3 x(0.5 * (xs[3 * s] + 1.0) * cfg.Lx, 0.5 * (xs[3 * s + 1] + 1.0) * cfg.Ly,
                         xs[3 * s + 2]);
            for (double eps : {eps_max, eps_min}) {
                const auto f = geom::chart_frame(cfg.theta, eps, x);
                dual = std::max(dual,
                                (f.g_con * f.g_cov.transpose() - Mat3::Identity())
                                    .cwiseAbs()
                                    .maxCoeff());
                for (int a = 0; a < 2; ++a) prod = std::max(prod, std::abs(f.gamma[2][a][2]));
                for (int p = 0; p < 3; ++p) prod = std::max(prod, std::abs(f.gamma[p][2][2]));
                gmin = std::min(gmin, f.det_metric);
                gmax = std::max(gmax, f.det_metric);
            }
        }
        push("frame_duality", dual <= 1e-10, dual, 1e-10);
        push("frame_product_identities", prod <= 1e-10, prod, 1e-10);
        push("volume_factor_bounds", gmin > 0.0, gmin, 0.0,
             "max=" + format_double(gmax));
    }

    // transformed tensor symmetries and coercivity at a curved frame
    {
        const auto f = geom::chart_frame(cfg.theta, eps_max,
                                         Vec3(0.37 * cfg.Lx, 0.61 * cfg.Ly, 0.29));
        const auto t = material::transform_tensors(f, cfg.mat);
        double sym = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        sym = std::max(sym, std::abs(t.A(i, j, k, l) - t.A(k, l, i, j)));
                        sym = std::max(sym, std::abs(t.A(i, j, k, l) - t.A(j, i, k, l)));
                        sym = std::max(sym, std::abs(t.P(k, i, j) - t.P(k, j, i)));
                    }
        sym = std::max(sym, (t.E - t.E.transpose()).cwiseAbs().maxCoeff());
        push("tensor_symmetries", sym <= 1e-12, sym, 1e-12);

        const auto flatA = material::isotropic_elasticity(cfg.mat.lambda, cfg.mat.mu);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> esA(
            t.A.symmetric_representation());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> esAf(
            flatA.symmetric_representation());
        Eigen::SelfAdjointEigenSolver<Mat3> esE(t.E);
        Eigen::SelfAdjointEigenSolver<Mat3> esEf(cfg.mat.E_hat);
        const bool okA = esA.eigenvalues().minCoeff() >= 0.5 * esAf.eigenvalues().minCoeff();
        const bool okE = esE.eigenvalues().minCoeff() >= 0.5 * esEf.eigenvalues().minCoeff();
        push("coercivity_elastic", okA, esA.eigenvalues().minCoeff(),
             0.5 * esAf.eigenvalues().minCoeff());
        push("coercivity_dielectric", okE, esE.eigenvalues().minCoeff(),
             0.5 * esEf.eigenvalues().minCoeff());
    }

    // thin-limit residual slopes
    {
        std::vector<double> eps_sweep = cfg.eps_list;
        if (eps_sweep.size() < 4) eps_sweep = {0.2, 0.1, 0.05, 0.025};
        const auto flatA = material::isotropic_elasticity(cfg.mat.lambda, cfg.mat.mu);
        const material::MaterialConstants& mm = cfg.mat;
        std::vector<geom::TensorDeviationProbe> probes;
        probes.push_back({[mm, flatA](const geom::PointFrame& f) {
                              const auto t = material::transform_tensors(f, mm);
                              double d = 0.0;
                              for (int i = 0; i < 81; ++i)
                                  d = std::max(d, std::abs(t.A.a[static_cast<std::size_t>(i)] -
                                                           flatA.a[static_cast<std::size_t>(i)]));
                              return d;
                          },
                          "elastic_tensor"});
        probes.push_back({[mm](const geom::PointFrame& f) {
                              const auto t = material::transform_tensors(f, mm);
                              double d = 0.0;
                              for (int i = 0; i < 27; ++i)
                                  d = std::max(d,
                                               std::abs(t.P.a[static_cast<std::size_t>(i)] -
                                                        mm.P_hat.a[static_cast<std::size_t>(i)]));
                              return d;
                          },
                          "piezo_tensor"});
        probes.push_back({[mm](const geom::PointFrame& f) {
                              const auto t = material::transform_tensors(f, mm);
                              return (t.E - mm.E_hat).cwiseAbs().maxCoeff();
                          },
                          "dielectric_tensor"});
        const auto rep = geom::expansion_residual_slopes(cfg.theta, eps_sweep, probes,
                                                         cfg.seed + 21);
        auto slope_check = [&](const std::string& q, double min_slope) {
            const auto& f = rep.fit(q);
            if (f.exact) {
                push("slope_" + q, true, 0.0, min_slope, "exact (flat)");
            } else {
                const bool ok = f.slope >= min_slope && f.conclusive;
                push("slope_" + q, ok, f.slope, min_slope,
                     f.conclusive ? "" : "inconclusive fit, R^2=" + format_double(f.r_squared));
            }
        };
        slope_check("volume_factor", 1.8);
        slope_check("elastic_tensor", 1.8);
        slope_check("piezo_tensor", 0.8);
        slope_check("dielectric_tensor", 0.8);
        slope_check("strain_inplane_remainder", 1.8);
        slope_check("strain_shear_remainder", 1.8);
    }

    // discrete Korn property on the reduced mesh
    {
        mesh::Mesh3 m3 = small.mesh3();
        m3.nx = std::min(m3.nx, 4);
        m3.ny = std::min(m3.ny, 4);
        const double lam_min = fem3d::korn_smallest_eigenvalue(m3, cfg.theta);
        push("korn_smallest_eigenvalue", lam_min > 0.0, lam_min, 0.0,
             "empirical constant C8=" + format_double(1.0 / std::sqrt(std::max(lam_min, 1e-300))));
    }

    // condensed operator structure at both ends of the sweep
    for (double eps : {eps_max, eps_min}) {
        const auto sys = fem3d::assemble_coupled(small.mesh3(), cfg.theta, cfg.mat, eps,
                                                 small.assembly_options());
        const fem3d::CondensedOperator op(sys);
        const double symr = op.symmetry_residual();
        push("schur_symmetry_eps" + eps_tag(eps), symr <= 1e-10, symr, 1e-10);
        const auto spec = eig::solve(op.pencil(), 1, eig::SolveMode::ShiftInvert, cfg.seed);
        push("schur_smallest_ritz_eps" + eps_tag(eps), spec.values[0] > 0.0, spec.values[0],
             0.0);
        const auto specm = eig::solve(op.pencil(), small.m_count, eig::SolveMode::ShiftInvert,
                                      cfg.seed);
        Matrix gram =
            specm.vectors.transpose() * Matrix(sys.M) * specm.vectors;
        const double gr =
            (gram - Matrix::Identity(small.m_count, small.m_count)).cwiseAbs().maxCoeff();
        push("mass_orthonormality_eps" + eps_tag(eps), gr <= 1e-8, gr, 1e-8);
    }

    // limit operator structure
    {
        const auto m2 = small.mesh2();
        const auto coeffs = material::limit_coefficients(cfg.mat, cfg.bending_mode);
        const auto sys = fem2d::assemble_limit(m2, coeffs, cfg.mat, cfg.theta);
        const fem2d::CondensedBending op(sys);
        const double symr = op.symmetry_residual();
        push("limit_bending_symmetry", symr <= 1e-9, symr, 1e-9);
        const auto spec = eig::solve(op.pencil(), 1, eig::SolveMode::ShiftInvert, cfg.seed);
        push("limit_bending_positive", spec.values[0] > 0.0, spec.values[0], 0.0);

        // informational: relative gap between the two closed forms of the
        // reconstructed potential on the first limit mode
        const auto rep = fem2d::solve_limit_eigen(sys, 1, eig::SolveMode::ShiftInvert, cfg.seed);
        const auto pa = fem2d::reconstruct_potential(coeffs, m2, rep.z3_modes[0],
                                                     fem2d::PotentialVariant::Compact);
        const auto pb = fem2d::reconstruct_potential(coeffs, m2, rep.z3_modes[0],
                                                     fem2d::PotentialVariant::Constructed);
        double num = 0.0, den = 0.0;
        for (double x : {0.15, 0.45, 0.85})
            for (double y : {0.25, 0.65})
                for (double z : {-0.6, 0.0, 0.5}) {
                    const geom::Vec3 p(x * cfg.Lx, y * cfg.Ly, z);
                    num += std::pow(pa.value(p) - pb.value(p), 2);
                    den += std::pow(pa.value(p), 2);
                }
        const double gap = den > 0.0 ? std::sqrt(num / den) : 0.0;
        push("potential_variant_difference", true, gap, 0.0,
             "relative sampled gap between the compact and constructed forms");
    }

    if (write_files && cfg.write_json)
        write_text_file(cfg.out_dir + "/validate.json", validate_json(checks));
    return checks;
}

}  // namespace pzshell::cli
