// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code is the number of
// failed criteria.

#include "pzshell/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

using namespace pzshell;
using eig::Matrix;
using eig::Vector;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// First roots of cos(k) cosh(k) = 1 via bisection.
std::vector<double> beam_roots(int count) {
    auto F = [](double k) { return std::cos(k) * std::cosh(k) - 1.0; };
    std::vector<double> roots;
    double a = 1.0;
    while (static_cast<int>(roots.size()) < count) {
        const double b = a + 0.05;
        if (F(a) * F(b) < 0.0) {
            double lo = a, hi = b;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (F(lo) * F(mid) <= 0.0 ? hi : lo) = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        a = b;
    }
    return roots;
}

const char* kSweepConfig = R"({
  "geometry": {"Lx": 1.0, "Ly": 1.0, "theta": {"family": "paraboloid", "coeffs": [0.5, 0.5]}},
  "material": {
    "lambda": 2.0, "mu": 1.0,
    "p_hat": [[0,0,0,0,0.2,0],[0,0,0,0.2,0,0],[0.4,0.4,0.3,0.5,0.5,0]],
    "e_hat": [1.5,1.5,2.0,0,0,0],
    "bending_mode": "standard"
  },
  "mesh": {"nx": 16, "ny": 16, "nz": 2, "nx2d": 32, "ny2d": 32},
  "boundary": {"clamped_sides": ["x0","x1","y0","y1"], "electrode_sides": ["x0","x1","y0","y1"]},
  "solve": {"m_count": 5, "eps_list": [0.2, 0.1, 0.05, 0.025], "seed": 1234,
            "reconstruction": "constructed"},
  "output": {"directory": "acceptance_out"}
})";

void criterion_1_beam_anchor() {
    const auto t0 = std::chrono::steady_clock::now();
    material::MaterialConstants mat;
    mat.lambda = 2.0;
    mat.mu = 1.0;
    mat.E_hat = geom::Mat3::Identity();
    const auto m = mesh::build_mesh2(1.0, 0.2, 64, 4, {mesh::Side::XMin, mesh::Side::XMax},
                                     {mesh::Side::YMin, mesh::Side::YMax});
    const auto sys = fem2d::assemble_limit(
        m, material::limit_coefficients(mat, material::BendingMode::Standard), mat,
        geom::MidsurfaceGeometry::flat());
    const auto rep = fem2d::solve_limit_eigen(sys, 3);
    const auto k = beam_roots(3);
    bool ok = true;
    std::ostringstream os;
    os << "beam anchor (64x4 guided strip, D=2):";
    for (int j = 0; j < 3; ++j) {
        const double ref = 2.0 * std::pow(k[static_cast<std::size_t>(j)], 4);
        const double rel = std::abs(rep.xi[j] - ref) / ref;
        ok = ok && rel <= 0.01;
        os << " xi" << (j + 1) << "=" << fmt(rep.xi[j]) << " (ref " << fmt(ref) << ", "
           << fmt(100 * rel) << "%)";
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 30.0;
    os << ", runtime " << fmt(dt) << " s";
    report(1, ok, os.str());
}

struct SweepBundle {
    cli::RunConfig cfg;
    cli::SweepResult res;
    double runtime = 0.0;
};

SweepBundle run_main_sweep() {
    SweepBundle b;
    b.cfg = cli::parse_config(kSweepConfig);
    const auto t0 = std::chrono::steady_clock::now();
    b.res = cli::run_sweep(b.cfg);
    b.runtime = seconds_since(t0);
    return b;
}

std::vector<const cli::SweepRow*> mode_rows(const cli::SweepResult& res, int mode) {
    std::vector<const cli::SweepRow*> rows;
    for (const auto& r : res.table.rows)
        if (r.mode == mode) rows.push_back(&r);
    return rows;
}

void criterion_2_convergence(const SweepBundle& b) {
    const auto rows = mode_rows(b.res, 1);
    bool mono = true;
    std::ostringstream os;
    os << "gaps:";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) mono = mono && rows[i]->xi_gap < rows[i - 1]->xi_gap;
        os << " " << fmt(rows[i]->xi_gap);
    }
    const double final_rel = rows.back()->xi_gap / rows.back()->xi_limit;
    const bool ok = mono && final_rel < 0.10 && b.runtime < 600.0;
    os << "; final gap " << fmt(100 * final_rel) << "% of limit " << fmt(rows.back()->xi_limit)
       << ", runtime " << fmt(b.runtime) << " s";
    report(2, ok, os.str());
}

void criterion_3_discrimination(const SweepBundle& b) {
    // report-only: which bending convention the 3D trend approaches
    auto printed_cfg = b.cfg;
    printed_cfg.bending_mode = material::BendingMode::AsPrinted;
    const auto printed = cli::run_solve2d(printed_cfg, false);
    const double xi_std = b.res.limit.xi_bulk[0];
    const double xi_printed = printed.report.xi_bulk[0];
    const double xi3d = mode_rows(b.res, 1).back()->xi_eps;
    const double rel_std = std::abs(xi3d - xi_std) / xi_std;
    const double rel_printed = std::abs(xi3d - xi_printed) / xi_printed;
    std::ostringstream os;
    os << "3D trend " << fmt(xi3d) << " vs standard " << fmt(xi_std) << " ("
       << fmt(100 * rel_std) << "%) and as-printed " << fmt(xi_printed) << " ("
       << fmt(100 * rel_printed) << "%); trend favors "
       << (rel_std < rel_printed ? "standard" : "as-printed");
    cli::write_text_file(b.cfg.out_dir + "/bending_mode_report.json",
                         std::string("{\n  \"xi_3d_final\": ") + cli::format_double(xi3d) +
                             ",\n  \"xi_limit_standard\": " + cli::format_double(xi_std) +
                             ",\n  \"xi_limit_as_printed\": " + cli::format_double(xi_printed) +
                             ",\n  \"closer\": \"" +
                             (rel_std < rel_printed ? "standard" : "as-printed") + "\"\n}\n");
    report(3, true, os.str());
}

void criterion_4_schur(const SweepBundle& b) {
    bool ok = true;
    std::ostringstream os;
    os << "Schur operator per eps:";
    for (const auto& run : b.res.runs) {
        const fem3d::CondensedOperator op(run.system);
        const double sym = op.symmetry_residual();
        const double ritz = run.spectrum.values[0];
        ok = ok && sym <= 1e-10 && ritz > 0.0;
        os << " [eps " << fmt(run.eps) << ": sym " << fmt(sym) << ", ritz " << fmt(ritz)
           << "]";
    }
    report(4, ok, os.str());
}

void criterion_5_orthonormality(const SweepBundle& b) {
    bool ok = true;
    std::ostringstream os;
    os << "M-Gram residual (m=5):";
    for (const auto& run : b.res.runs) {
        const Matrix gram =
            run.spectrum.vectors.transpose() * Matrix(run.system.M) * run.spectrum.vectors;
        const double g = (gram - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff();
        ok = ok && g <= 1e-8;
        os << " " << fmt(g);
    }
    report(5, ok, os.str());
}

void criterion_6_slopes(const SweepBundle& b) {
    const auto& mat = b.cfg.mat;
    const auto flatA = material::isotropic_elasticity(mat.lambda, mat.mu);
    std::vector<geom::TensorDeviationProbe> probes;
    probes.push_back({[&mat, flatA](const geom::PointFrame& f) {
                          const auto t = material::transform_tensors(f, mat);
                          double d = 0.0;
                          for (std::size_t i = 0; i < 81; ++i)
                              d = std::max(d, std::abs(t.A.a[i] - flatA.a[i]));
                          return d;
                      },
                      "elastic"});
    probes.push_back({[&mat](const geom::PointFrame& f) {
                          const auto t = material::transform_tensors(f, mat);
                          double d = 0.0;
                          for (std::size_t i = 0; i < 27; ++i)
                              d = std::max(d, std::abs(t.P.a[i] - mat.P_hat.a[i]));
                          return d;
                      },
                      "piezo"});
    probes.push_back({[&mat](const geom::PointFrame& f) {
                          const auto t = material::transform_tensors(f, mat);
                          return (t.E - mat.E_hat).cwiseAbs().maxCoeff();
                      },
                      "dielectric"});
    const auto rep =
        geom::expansion_residual_slopes(b.cfg.theta, b.cfg.eps_list, probes, b.cfg.seed);
    const double sg = rep.fit("volume_factor").slope;
    const double sa = rep.fit("elastic").slope;
    const double sp = rep.fit("piezo").slope;
    const double se = rep.fit("dielectric").slope;
    const bool ok = sg >= 1.8 && sa >= 1.8 && sp >= 0.8 && se >= 0.8;
    std::ostringstream os;
    os << "slopes: g " << fmt(sg) << " (>=1.8), A " << fmt(sa) << " (>=1.8), P " << fmt(sp)
       << " (>=0.8), E " << fmt(se) << " (>=0.8)";
    report(6, ok, os.str());
}

void criterion_7_strain_relations(const SweepBundle& b) {
    bool mono_shear = true, mono_thick = true;
    std::ostringstream os;
    os << "residuals (shear | thickness):";
    double prev_s = 0.0, prev_t = 0.0;
    for (std::size_t i = 0; i < b.res.runs.size(); ++i) {
        const auto& rel = b.res.runs[i].strain_relations;
        if (i > 0) {
            mono_shear = mono_shear && rel.shear_residual < prev_s;
            mono_thick = mono_thick && rel.thickness_residual < prev_t;
        }
        prev_s = rel.shear_residual;
        prev_t = rel.thickness_residual;
        os << " [" << fmt(rel.shear_residual) << " | " << fmt(rel.thickness_residual)
           << " (rel " << fmt(rel.thickness_residual / rel.thickness_target_norm) << ")]";
    }
    os << (mono_shear ? "" : "; shear sequence not monotone")
       << (mono_thick ? "" : "; thickness sequence not monotone");
    report(7, mono_shear && mono_thick, os.str());
}

void criterion_8_potential(const SweepBundle& b) {
    // face values of the reconstructed potential
    const auto coeffs = material::limit_coefficients(b.cfg.mat, b.cfg.bending_mode);
    const auto m2 = b.cfg.mesh2();
    const Vector z3 = cli::bulk_normalized_deflection(b.res.limit, 0);
    const auto pot = fem2d::reconstruct_potential(coeffs, m2, z3, b.cfg.reconstruction);
    double face = 0.0;
    for (double x : {0.2, 0.5, 0.8})
        for (double y : {0.3, 0.7}) {
            face = std::max(face, std::abs(pot.value(geom::Vec3(x, y, 1.0))));
            face = std::max(face, std::abs(pot.value(geom::Vec3(x, y, -1.0))));
        }
    const auto rows = mode_rows(b.res, 1);
    bool mono = true;
    std::ostringstream os;
    os << "face max " << fmt(face) << "; L2 gaps:";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) mono = mono && rows[i]->l2_error_phi < rows[i - 1]->l2_error_phi;
        os << " " << fmt(rows[i]->l2_error_phi);
    }
    report(8, face == 0.0 && mono, os.str());
}

void criterion_9_apriori(const SweepBundle& b) {
    bool ok = true;
    std::ostringstream os;
    // uniform bound: no eigenvalue exceeds twice its smallest-eps value
    for (int mode = 1; mode <= 3; ++mode) {
        const auto rows = mode_rows(b.res, mode);
        const double last = rows.back()->xi_eps;
        double worst = 0.0;
        for (const auto* r : rows) worst = std::max(worst, r->xi_eps / (2.0 * last));
        ok = ok && worst <= 1.0;
        os << "m" << mode << " max/2min " << fmt(worst) << "; ";
    }
    // bending test-field quotients bound the first eigenvalue from above
    const auto m2 = b.cfg.mesh2();
    const fem2d::DeflectionField z3(m2, cli::bulk_normalized_deflection(b.res.limit, 0));
    fem3d::PlateField w;
    w.value = [&z3](double x, double y) { return z3.value(x, y); };
    w.gradient = [&z3](double x, double y) { return z3.gradient(x, y); };
    os << "quotient margins:";
    for (const auto& run : b.res.runs) {
        const fem3d::CondensedOperator op(run.system);
        const Vector vphi = fem3d::kirchhoff_test_field(run.system, w);
        const double rq = fem3d::rayleigh_quotient(op, vphi);
        const bool above = rq >= run.spectrum.values[0] - 1e-8;
        ok = ok && above;
        os << " " << fmt(rq / run.spectrum.values[0]);
    }
    report(9, ok, os.str());
}

void criterion_10_determinism(const SweepBundle& b) {
    auto cfg = b.cfg;
    cfg.out_dir = b.cfg.out_dir + "/rerun";
    cli::run_sweep(cfg);
    const bool same_csv = cli::read_text_file(b.cfg.out_dir + "/sweep.csv") ==
                          cli::read_text_file(cfg.out_dir + "/sweep.csv");
    const bool same_json = cli::read_text_file(b.cfg.out_dir + "/slopes.json") ==
                           cli::read_text_file(cfg.out_dir + "/slopes.json");
    report(10, same_csv && same_json,
           std::string("byte-identical rerun: sweep.csv ") + (same_csv ? "yes" : "NO") +
               ", slopes.json " + (same_json ? "yes" : "NO"));
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_beam_anchor();
    const SweepBundle b = run_main_sweep();
    criterion_2_convergence(b);
    criterion_3_discrimination(b);
    criterion_4_schur(b);
    criterion_5_orthonormality(b);
    criterion_6_slopes(b);
    criterion_7_strain_relations(b);
    criterion_8_potential(b);
    criterion_9_apriori(b);
    criterion_10_determinism(b);
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
