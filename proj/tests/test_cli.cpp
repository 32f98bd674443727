#include <doctest.h>
#include <cmath>
#include <algorithm>

#include "pzshell/runner.hpp"

#include <filesystem>

using namespace pzshell;

namespace {

std::string tiny_config(const std::string& extra_solve = "",
                        const std::string& e_hat = "[1.5,1.5,2.0,0,0,0]") {
    return R"({
      "geometry": {"Lx": 1.0, "Ly": 1.0, "theta": {"family": "paraboloid", "coeffs": [0.5, 0.5]}},
      "material": {
        "lambda": 2.0, "mu": 1.0,
        "p_hat": [[0,0,0,0,0.2,0],[0,0,0,0.2,0,0],[0.4,0.4,0.3,0.5,0.5,0]],
        "e_hat": )" +
           e_hat + R"(,
        "bending_mode": "standard"
      },
      "mesh": {"nx": 4, "ny": 4, "nz": 2, "nx2d": 8, "ny2d": 8},
      "boundary": {"clamped_sides": ["x0","x1","y0","y1"], "electrode_sides": ["x0","x1","y0","y1"]},
      "solve": {"m_count": 2, "eps_list": [0.2, 0.1], "seed": 42)" +
           extra_solve + R"(}
    })";
}

}  // namespace

TEST_CASE("config parsing and validation") {
    CHECK_NOTHROW(cli::parse_config(tiny_config()));

    SUBCASE("rejects a non-SPD dielectric tensor before any solve") {
        CHECK_THROWS_AS(cli::parse_config(tiny_config("", "[1.0,1.0,-2.0,0,0,0]")),
                        cli::ConfigError);
    }
    SUBCASE("rejects a non-decreasing eps list") {
        auto bad = tiny_config();
        const auto pos = bad.find("[0.2, 0.1]");
        bad.replace(pos, 10, "[0.1, 0.2]");
        CHECK_THROWS_AS(cli::parse_config(bad), cli::ConfigError);
    }
    SUBCASE("rejects an empty clamp set") {
        auto bad = tiny_config();
        const auto pos = bad.find(R"("clamped_sides": ["x0","x1","y0","y1"])");
        bad.replace(pos, std::string(R"("clamped_sides": ["x0","x1","y0","y1"])").size(),
                    R"("clamped_sides": [])");
        CHECK_THROWS_AS(cli::parse_config(bad), cli::ConfigError);
    }
    SUBCASE("rejects malformed JSON") {
        CHECK_THROWS_AS(cli::parse_config("{not json"), cli::ConfigError);
    }
    SUBCASE("field errors carry the field name") {
        try {
            cli::parse_config(tiny_config("", "[1.0,1.0]"));
            CHECK(false);
        } catch (const cli::ConfigError& e) {
            CHECK(std::string(e.what()).find("e_hat") != std::string::npos);
        }
    }
    SUBCASE("config echo reparses to the same echo") {
        const auto cfg = cli::parse_config(tiny_config());
        const auto echoed = cli::config_echo_json(cfg);
        const auto cfg2 = cli::parse_config(echoed);
        CHECK(cli::config_echo_json(cfg2) == echoed);
    }
}

TEST_CASE("report formats") {
    SUBCASE("empty table yields a header-only CSV") {
        cli::ConvergenceTable t;
        const auto csv = cli::sweep_csv(t);
        CHECK(csv ==
              "eps,mode,xi_eps,xi_limit,xi_gap,h1_error_disp,l2_error_phi,l2_error_dphi3,"
              "overlap,flagged\n");
    }
    SUBCASE("sweep CSV round-trips byte-identically") {
        cli::ConvergenceTable t;
        t.rows.push_back({0.2, 1, 349.35095015312947, 1311.0319101902458, 961.68096003711628,
                          15.914029964396764, 1.267524239763143, 2.0107962333102982,
                          0.9329911700697705, false});
        t.rows.push_back({0.1, 1, 1.0 / 3.0, 2.0 / 7.0, 0.047619047619047616, 1e-17, 2.5e-13,
                          3.0, 0.99, true});
        const auto csv = cli::sweep_csv(t);
        const auto parsed = cli::parse_sweep_csv(csv);
        CHECK(cli::sweep_csv(parsed) == csv);
    }
    SUBCASE("limit eigen CSV round-trips") {
        std::vector<cli::LimitEigRow> rows{{1, 1001.1278450930607, 500.56392254653036},
                                           {2, 7607.076555621933, 3803.5382778109665}};
        const auto csv = cli::limit_eigs_csv(rows);
        const auto parsed = cli::parse_limit_eigs_csv(csv);
        CHECK(cli::limit_eigs_csv(parsed) == csv);
    }
    SUBCASE("JSON mirror carries identical values") {
        cli::ConvergenceTable t;
        t.rows.push_back({0.2, 1, 349.35095015312947, 1311.0319101902458, 961.68096003711628,
                          15.914029964396764, 1.267524239763143, 2.0107962333102982,
                          0.9329911700697705, false});
        const auto js = cli::sweep_json(t);
        // a 17-digit value must appear verbatim in both mirrors
        CHECK(js.find("349.35095015312947") != std::string::npos);
        CHECK(cli::sweep_csv(t).find("349.35095015312947") != std::string::npos);
    }
}

TEST_CASE("limit solve writes the beam-anchor value to the CSV") {
    const std::string strip = R"({
      "geometry": {"Lx": 1.0, "Ly": 0.2, "theta": {"family": "flat"}},
      "material": {"lambda": 2.0, "mu": 1.0, "bending_mode": "standard"},
      "mesh": {"nx": 4, "ny": 2, "nz": 2, "nx2d": 64, "ny2d": 4},
      "boundary": {"clamped_sides": ["x0","x1"], "electrode_sides": ["x0"],
                   "guided_sides": ["y0","y1"]},
      "solve": {"m_count": 1, "eps_list": [0.1], "seed": 7}
    })";
    auto cfg = cli::parse_config(strip);
    cfg.out_dir = (std::filesystem::temp_directory_path() / "pz_strip").string();
    cli::run_solve2d(cfg);
    const auto rows =
        cli::parse_limit_eigs_csv(cli::read_text_file(cfg.out_dir + "/limit_eigs.csv"));
    const double k1 = 4.7300407448627040;
    const double ref = 2.0 * k1 * k1 * k1 * k1;
    CHECK(std::abs(rows.front().xi - ref) <= 0.01 * ref);
}

TEST_CASE("limit solve run: row count and determinism") {
    auto cfg = cli::parse_config(tiny_config());
    cfg.m_count = 3;
    cfg.out_dir = (std::filesystem::temp_directory_path() / "pz_t2d_a").string();
    const auto r1 = cli::run_solve2d(cfg);
    CHECK(r1.rows.size() == 3);
    const auto csv1 = cli::read_text_file(cfg.out_dir + "/limit_eigs.csv");
    cfg.out_dir = (std::filesystem::temp_directory_path() / "pz_t2d_b").string();
    const auto r2 = cli::run_solve2d(cfg);
    const auto csv2 = cli::read_text_file(cfg.out_dir + "/limit_eigs.csv");
    CHECK(csv1 == csv2);
}

TEST_CASE("sweep run: row count, flags and determinism") {
    auto cfg = cli::parse_config(tiny_config());
    SUBCASE("single-entry eps list gives m rows") {
        cfg.eps_list = {0.1};
        cfg.m_count = 2;
        const auto res = cli::run_sweep(cfg, false);
        CHECK(res.table.rows.size() == 2);
    }
    SUBCASE("repeated runs are byte-identical") {
        cfg.out_dir = (std::filesystem::temp_directory_path() / "pz_sw_a").string();
        cli::run_sweep(cfg);
        const auto a_csv = cli::read_text_file(cfg.out_dir + "/sweep.csv");
        const auto a_json = cli::read_text_file(cfg.out_dir + "/slopes.json");
        cfg.out_dir = (std::filesystem::temp_directory_path() / "pz_sw_b").string();
        cli::run_sweep(cfg);
        CHECK(cli::read_text_file(cfg.out_dir + "/sweep.csv") == a_csv);
        CHECK(cli::read_text_file(cfg.out_dir + "/slopes.json") == a_json);
    }
}

TEST_CASE("matrix dumps, mode shapes and polynomial shapes through the config") {
    const std::string cfg_text = R"({
      "geometry": {"Lx": 1.0, "Ly": 1.0,
                   "theta": {"family": "polynomial", "terms": [[2,1,0.3],[1,2,-0.2]]}},
      "material": {"lambda": 2.0, "mu": 1.0,
        "p_hat": [[0,0,0,0,0.2,0],[0,0,0,0.2,0,0],[0.4,0.4,0.3,0.5,0.5,0]],
        "e_hat": [1.5,1.5,2.0,0,0,0]},
      "mesh": {"nx": 3, "ny": 3, "nz": 2, "nx2d": 6, "ny2d": 6},
      "boundary": {"clamped_sides": ["x0","x1","y0","y1"],
                   "electrode_sides": ["x0"]},
      "solve": {"m_count": 2, "eps_list": [0.1], "seed": 5},
      "output": {"directory": "unused", "mode_shapes": true,
                 "debug_dump_matrices": true}
    })";
    auto cfg = cli::parse_config(cfg_text);
    cfg.out_dir = (std::filesystem::temp_directory_path() / "pz_dump").string();
    std::filesystem::remove_all(cfg.out_dir);

    const auto r3 = cli::run_solve3d(cfg, 0.1);
    CHECK(r3.spectrum.values[0] > 0.0);
    const auto bdump = cli::read_text_file(cfg.out_dir + "/B_eps0p1.mtx");
    CHECK(bdump.rfind("%%MatrixMarket matrix array real general", 0) == 0);
    const auto mdump = cli::read_text_file(cfg.out_dir + "/M_eps0p1.mtx");
    CHECK(mdump.rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);

    const auto r2 = cli::run_solve2d(cfg);
    const auto grid = cli::read_text_file(cfg.out_dir + "/mode_z3_1.csv");
    // (ny2d+1) rows of (nx2d+1) comma-separated nodal values
    CHECK(std::count(grid.begin(), grid.end(), '\n') == cfg.ny2d + 1);
    CHECK(std::count(grid.begin(), grid.end(), ',') == (cfg.ny2d + 1) * cfg.nx2d);
}

TEST_CASE("validation suite passes on the default small configuration") {
    auto cfg = cli::parse_config(tiny_config());
    cfg.out_dir = (std::filesystem::temp_directory_path() / "pz_val").string();
    const auto checks = cli::run_validate(cfg);
    for (const auto& c : checks) {
        INFO(c.name, " value=", c.value, " bound=", c.bound);
        CHECK(c.passed);
    }
    CHECK(std::filesystem::exists(cfg.out_dir + "/validate.json"));
}
