// Command-line driver: limit solve, single-thickness 3D solve, thickness
// sweep, and structural validation suite.

#include "pzshell/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Args {
    std::string config_path;
    std::string out_dir;
};

pzshell::cli::RunConfig load(const Args& a) {
    auto cfg = pzshell::cli::load_config(a.config_path);
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
    return cfg;
}

void add_common(CLI::App* sub, Args& a) {
    sub->add_option("--config", a.config_path, "path to the JSON run configuration")
        ->required();
    sub->add_option("--out", a.out_dir, "output directory (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"piezoelectric shallow-shell eigenvalue solver"};
    app.require_subcommand(1);

    Args args;
    double eps = 0.0;
    auto* s2 = app.add_subcommand("solve2d", "solve the two-dimensional limit eigenproblem");
    add_common(s2, args);
    auto* s3 = app.add_subcommand("solve3d", "solve the scaled 3D eigenproblem at one eps");
    add_common(s3, args);
    s3->add_option("--eps", eps, "thickness ratio")->required();
    auto* sw = app.add_subcommand("sweep", "thickness sweep against the limit model");
    add_common(sw, args);
    auto* va = app.add_subcommand("validate", "run the structural validation suite");
    add_common(va, args);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = load(args);
        if (s2->parsed()) {
            const auto res = pzshell::cli::run_solve2d(cfg);
            for (const auto& r : res.rows)
                std::printf("mode %d: xi = %.12g (bulk normalization %.12g)\n", r.mode, r.xi,
                            r.xi_bulk);
        } else if (s3->parsed()) {
            if (!(eps > 0.0) || eps > 1.0) {
                std::fprintf(stderr, "error: --eps must lie in (0, 1]\n");
                return kExitConfig;
            }
            const auto res = pzshell::cli::run_solve3d(cfg, eps);
            for (int m = 0; m < res.spectrum.values.size(); ++m)
                std::printf("mode %d: xi(eps) = %.12g, physical xi = %.12g\n", m + 1,
                            res.spectrum.values[m], eps * eps * res.spectrum.values[m]);
        } else if (sw->parsed()) {
            const auto res = pzshell::cli::run_sweep(cfg);
            for (const auto& r : res.table.rows)
                std::printf("eps %-8g mode %d: xi(eps) = %-14.8g limit = %-14.8g gap = %.4g%s\n",
                            r.eps, r.mode, r.xi_eps, r.xi_limit, r.xi_gap,
                            r.flagged ? "  [flagged]" : "");
        } else if (va->parsed()) {
            const auto checks = pzshell::cli::run_validate(cfg);
            bool all = true;
            for (const auto& c : checks) {
                std::printf("%-40s %s  value=%.6g bound=%.6g %s\n", c.name.c_str(),
                            c.passed ? "pass" : "FAIL", c.value, c.bound, c.detail.c_str());
                all = all && c.passed;
            }
            if (!all) return kExitSolver;
        }
        return kExitOk;
    } catch (const pzshell::cli::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const pzshell::mesh::MeshError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const pzshell::material::MaterialError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    }
}
