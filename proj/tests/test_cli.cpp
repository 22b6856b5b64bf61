#include <doctest.h>

#include "cavmatch/commands.hpp"
#include "cavmatch/io.hpp"
#include "cavmatch/model.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace cavmatch;
using nlohmann::json;

namespace {

std::string write_file(const std::string& name, const std::string& body) {
    const std::string path = "/tmp/cavmatch_cli_" + name;
    std::ofstream out(path);
    out << body;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(bool(in), "missing file: " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Invoke the CLI entry point in-process.
int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("cavmatch");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(int(argv.size()), argv.data());
}

// Invoke the installed binary to capture diagnostics on stderr.
struct BinResult {
    int exit_code;
    std::string err;
};

BinResult run_binary(const std::string& args) {
    const std::string err_path = "/tmp/cavmatch_cli_stderr.txt";
    const std::string cmd = std::string(CAVMATCH_BIN) + " " + args +
                            " >/dev/null 2>" + err_path;
    const int status = std::system(cmd.c_str());
    BinResult r;
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_path);
    return r;
}

const std::string kBaseConfig =
    "[cavity]\n"
    "g_mhz = 15\n"
    "kappa_mhz = 3\n"
    "gamma_mhz = 3\n"
    "rho0 = 0.005\n"
    "\n"
    "[photon]\n"
    "shape = sin2\n"
    "tau_us = 3.14\n";

int count_data_rows(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    int rows = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config loading: defaults, overrides, and rejection") {
    const std::string minimal = write_file("min.ini",
                                           "[cavity]\n"
                                           "g_mhz = 15\n"
                                           "kappa_mhz = 3\n"
                                           "gamma_mhz = 3\n");
    const RunConfig cfg = load_config(minimal);
    CHECK(cfg.g_mhz == 15.0);
    CHECK(cfg.rho0 == 0.005);          // default seed
    CHECK(cfg.shape == ShapeKind::sin2);
    CHECK(cfg.tau_us == 3.14);
    CHECK(cfg.steps == 16384);
    CHECK(cfg.init == "seeded");
    CHECK(cfg.gap_us == 0.5);
    CHECK(cfg.params().cooperativity() == doctest::Approx(12.5).epsilon(1e-12));

    const std::string full = write_file("full.ini",
                                        "[cavity]\n"
                                        "g_mhz = 10\n"
                                        "kappa_mhz = 2\n"
                                        "gamma_mhz = 1\n"
                                        "rho0 = 0.01\n"
                                        "[photon]\n"
                                        "shape = twin_peak\n"
                                        "tau_us = 2.5\n"
                                        "[grid]\n"
                                        "steps = 4096\n"
                                        "[limits]\n"
                                        "omega_max_mhz = 25\n"
                                        "[simulate]\n"
                                        "init = ground\n"
                                        "[sweep]\n"
                                        "axis = rho0\n"
                                        "values = 0.02, 0.01 0.005\n"
                                        "[timebin]\n"
                                        "alpha_re = 0.6\n"
                                        "beta_im = 0.8\n"
                                        "gap_us = 1.0\n");
    const RunConfig fc = load_config(full);
    CHECK(fc.shape == ShapeKind::twin_peak);
    CHECK(fc.tau_us == 2.5);
    CHECK(fc.steps == 4096);
    CHECK(fc.omega_max_mhz == 25.0);
    CHECK(fc.init == "ground");
    CHECK(fc.sweep_axis == "rho0");
    REQUIRE(fc.sweep_values.size() == 3);
    CHECK(fc.sweep_values[1] == 0.01);
    CHECK(fc.alpha_re == 0.6);
    CHECK(fc.beta_im == 0.8);
    CHECK(fc.gap_us == 1.0);

    CHECK_THROWS_AS(load_config("/tmp/cavmatch_cli_missing.ini"), ParseError);
    CHECK_THROWS_AS(
        load_config(write_file("nog.ini", "[cavity]\nkappa_mhz = 3\ngamma_mhz = 3\n")),
        ParseError);
    CHECK_THROWS_AS(
        load_config(write_file("notini.ini", "cavity { g_mhz: 15 }\n")),
        ParseError);
}

TEST_CASE("config loading: range validation") {
    CHECK_THROWS_AS(load_config(write_file("negk.ini",
                                           "[cavity]\n"
                                           "g_mhz = 15\n"
                                           "kappa_mhz = -3\n"
                                           "gamma_mhz = 3\n")),
                    InvalidParams);
    CHECK_THROWS_AS(load_config(write_file("rho1.ini",
                                           "[cavity]\n"
                                           "g_mhz = 15\n"
                                           "kappa_mhz = 3\n"
                                           "gamma_mhz = 3\n"
                                           "rho0 = 1.0\n")),
                    InvalidParams);
    CHECK_THROWS_AS(load_config(write_file("badshape.ini",
                                           "[cavity]\n"
                                           "g_mhz = 15\n"
                                           "kappa_mhz = 3\n"
                                           "gamma_mhz = 3\n"
                                           "[photon]\n"
                                           "shape = gauss\n"
                                           "tau_us = 3.14\n")),
                    Error);
    CHECK_THROWS_AS(load_config(write_file("badinit.ini",
                                           kBaseConfig +
                                           "[simulate]\ninit = excited\n")),
                    InvalidParams);
    CHECK_THROWS_AS(load_config(write_file("badaxis.ini",
                                           kBaseConfig +
                                           "[sweep]\naxis = detuning\nvalues = 1\n")),
                    InvalidParams);
    CHECK_THROWS_AS(load_config(write_file("badvals.ini",
                                           kBaseConfig +
                                           "[sweep]\naxis = rho0\nvalues = 0.1, abc\n")),
                    ParseError);
    CHECK_THROWS_AS(load_config(write_file("badsteps.ini",
                                           kBaseConfig + "[grid]\nsteps = 1\n")),
                    InvalidParams);
}

TEST_CASE("derive writes a deterministic table and manifest") {
    const std::string cfg = write_file("derive.ini", kBaseConfig);
    REQUIRE(run({"derive", "--config", cfg, "--out", "/tmp/cavmatch_cli_d1",
                 "--steps", "2048"}) == 0);

    const std::string csv = slurp("/tmp/cavmatch_cli_d1.csv");
    CHECK(count_data_rows(csv) == 2049);
    CHECK(csv.find("t_us,phi_in,omega_mhz,rho_ee") != std::string::npos);

    // Every cell numeric and finite; endpoints of the time column pinned.
    std::istringstream in(csv);
    std::string line;
    bool seen_header = false;
    double first_t = -1.0, last_t = -1.0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            const double v = std::stod(cell);
            CHECK(std::isfinite(v));
            if (col == 0) {
                if (first_t < 0.0) first_t = v;
                last_t = v;
            }
            ++col;
        }
        CHECK(col == 4);
    }
    CHECK(first_t == 0.0);
    CHECK(last_t == doctest::Approx(3.14).epsilon(1e-12));

    const json manifest = json::parse(slurp("/tmp/cavmatch_cli_d1.json"));
    CHECK(manifest["command"] == "derive");
    CHECK(manifest["g_mhz"] == 15.0);
    CHECK(manifest["steps"] == 2048);
    // The grid maximum undershoots the continuum peak by O(dt^2), so the
    // 2048-step figure sits a shade below the fine-grid 11.95018 MHz.
    CHECK(double(manifest["peak_omega_mhz"]) ==
          doctest::Approx(11.950179666997894).epsilon(1e-4));

    // Byte-identical on a second run: no timestamps, no locale drift.
    REQUIRE(run({"derive", "--config", cfg, "--out", "/tmp/cavmatch_cli_d2",
                 "--steps", "2048"}) == 0);
    CHECK(slurp("/tmp/cavmatch_cli_d2.csv") == csv);
}

TEST_CASE("derived pulse feeds back into simulate and absorbs the photon") {
    const std::string cfg = write_file("chain.ini", kBaseConfig);
    REQUIRE(run({"derive", "--config", cfg, "--out", "/tmp/cavmatch_cli_chain",
                 "--steps", "2048"}) == 0);
    REQUIRE(run({"simulate", "--config", cfg, "--out", "/tmp/cavmatch_cli_chain_sim",
                 "--steps", "2048", "--pulse", "/tmp/cavmatch_cli_chain.csv"}) == 0);

    const json rep = json::parse(slurp("/tmp/cavmatch_cli_chain_sim.json"));
    CHECK(rep["command"] == "simulate");
    CHECK(double(rep["reflection"]) < 1e-8);
    CHECK(double(rep["storage_efficiency"]) ==
          doctest::Approx(0.9598497420114924).epsilon(1e-6));
    CHECK(double(rep["conservation_residual"]) < 1e-6);

    // The inline-derived path agrees with the file path.  The CSV stores the
    // pulse in MHz text, and the units round trip costs about one ulp per
    // sample, so the near-zero reflection moves in its trailing digits while
    // every field of substance matches tightly.
    REQUIRE(run({"simulate", "--config", cfg, "--out",
                 "/tmp/cavmatch_cli_chain_inline", "--steps", "2048"}) == 0);
    const json inl = json::parse(slurp("/tmp/cavmatch_cli_chain_inline.json"));
    CHECK(inl["command"] == rep["command"]);
    CHECK(inl["init"] == rep["init"]);
    CHECK(inl["g_mhz"] == rep["g_mhz"]);
    CHECK(inl["steps"] == rep["steps"]);
    CHECK(double(inl["reflection"]) ==
          doctest::Approx(double(rep["reflection"])).epsilon(1e-6));
    CHECK(double(inl["spont_loss"]) ==
          doctest::Approx(double(rep["spont_loss"])).epsilon(1e-12));
    CHECK(double(inl["storage_efficiency"]) ==
          doctest::Approx(double(rep["storage_efficiency"])).epsilon(1e-12));
    CHECK(double(inl["conservation_residual"]) ==
          doctest::Approx(double(rep["conservation_residual"])).epsilon(1e-3));

    const std::string sim_csv = slurp("/tmp/cavmatch_cli_chain_sim.csv");
    CHECK(sim_csv.find("t_us,phi_in,phi_out,c_e,c_x_im,c_g,rho_ee,rho_gg,rho_xx") !=
          std::string::npos);
    CHECK(count_data_rows(sim_csv) == 2048 + 512 + 1);  // drain tail included
}

TEST_CASE("empty-cavity simulation reflects the full photon") {
    const std::string cfg = write_file("empty.ini", kBaseConfig);
    REQUIRE(run({"simulate", "--config", cfg, "--out", "/tmp/cavmatch_cli_empty",
                 "--steps", "2048", "--empty-cavity"}) == 0);
    const json rep = json::parse(slurp("/tmp/cavmatch_cli_empty.json"));
    CHECK(double(rep["reflection"]) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(double(rep["storage_efficiency"]) == 0.0);
    CHECK(double(rep["conservation_residual"]) < 1e-6);
}

TEST_CASE("sweep over the seed population writes the long table and surface") {
    const std::string cfg = write_file("sweep.ini",
                                       kBaseConfig +
                                       "[sweep]\n"
                                       "axis = rho0\n"
                                       "values = 0.01, 0.005, 0\n");
    REQUIRE(run({"sweep", "--config", cfg, "--out", "/tmp/cavmatch_cli_sw",
                 "--steps", "1024", "--jobs", "2"}) == 0);

    const std::string csv = slurp("/tmp/cavmatch_cli_sw.csv");
    CHECK(csv.find("sweep_value,metric,value,feasible") != std::string::npos);
    CHECK(count_data_rows(csv) == 6);  // two metrics per point
    CHECK(csv.find("peak_omega_mhz") != std::string::npos);
    CHECK(csv.find("roundtrip_reflection") != std::string::npos);
    // The rho0 = 0 point reports infeasibility, not numbers.
    CHECK(csv.find("0,peak_omega_mhz,nan,0") != std::string::npos);

    // Pulse surface: one block of support samples per feasible point.
    const std::string surface = slurp("/tmp/cavmatch_cli_sw_pulses.csv");
    CHECK(surface.find("t_us,rho0,omega_mhz") != std::string::npos);
    CHECK(count_data_rows(surface) == 2 * 1025);

    const json manifest = json::parse(slurp("/tmp/cavmatch_cli_sw.json"));
    CHECK(manifest["axis"] == "rho0");
    CHECK(manifest["n_points"] == 3);
    CHECK(manifest["n_feasible"] == 2);
}

TEST_CASE("sweep over the cooperativity flags the infeasible region") {
    const std::string cfg = write_file("sweepc.ini",
                                       kBaseConfig +
                                       "[sweep]\n"
                                       "axis = cooperativity\n"
                                       "values = 0.3, 12.5\n");
    REQUIRE(run({"sweep", "--config", cfg, "--out", "/tmp/cavmatch_cli_swc",
                 "--steps", "1024"}) == 0);
    const std::string csv = slurp("/tmp/cavmatch_cli_swc.csv");
    CHECK(csv.find("0.29999999999999999,efficiency,nan,0") != std::string::npos);
    CHECK(csv.find("12.5,efficiency,0.95") != std::string::npos);
    CHECK(csv.find("12.5,mismatch,") != std::string::npos);

    const json manifest = json::parse(slurp("/tmp/cavmatch_cli_swc.json"));
    CHECK(manifest["n_feasible"] == 1);

    // A sweep without an axis cannot run.
    const std::string noaxis = write_file("noaxis.ini", kBaseConfig);
    CHECK(run({"sweep", "--config", noaxis, "--out", "/tmp/cavmatch_cli_noax"}) == 2);
}

TEST_CASE("timebin subcommand writes the mapped-state report") {
    const std::string cfg = write_file("tb.ini",
                                       kBaseConfig +
                                       "[timebin]\n"
                                       "alpha_re = 0.7071\n"
                                       "beta_re = -0.7071\n"
                                       "gap_us = 0.5\n");
    REQUIRE(run({"timebin", "--config", cfg, "--out", "/tmp/cavmatch_cli_tb",
                 "--steps", "2048"}) == 0);
    const json rep = json::parse(slurp("/tmp/cavmatch_cli_tb.json"));
    // 4-digit inputs are renormalized to an exact unit qubit.
    CHECK(double(rep["alpha_re"]) == doctest::Approx(M_SQRT1_2).epsilon(1e-9));
    CHECK(double(rep["efficiency"]) == doctest::Approx(0.95985).epsilon(1e-3));
    CHECK(double(rep["fidelity"]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(double(rep["pop_minus"]) == doctest::Approx(rep["pop_plus"].get<double>()).epsilon(1e-12));
    CHECK(double(rep["dm01_re"]) == doctest::Approx(-0.5).epsilon(1e-6));

    // One-bin limit: all of the success weight sits in |m=-1>.
    const std::string one = write_file("tb1.ini",
                                       kBaseConfig +
                                       "[timebin]\n"
                                       "alpha_re = 1\n"
                                       "beta_re = 0\n");
    REQUIRE(run({"timebin", "--config", one, "--out", "/tmp/cavmatch_cli_tb1",
                 "--steps", "1024"}) == 0);
    const json rep1 = json::parse(slurp("/tmp/cavmatch_cli_tb1.json"));
    CHECK(double(rep1["pop_plus"]) == 0.0);
    CHECK(double(rep1["dm00_re"]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("failure exit codes and diagnostics name the error type") {
    const std::string border = write_file("border.ini",
                                          "[cavity]\n"
                                          "g_mhz = 1.7320508075688772\n"
                                          "kappa_mhz = 3\n"
                                          "gamma_mhz = 1\n"
                                          "[photon]\n"
                                          "shape = sin2\n"
                                          "tau_us = 3.14\n");
    CHECK(run({"derive", "--config", border, "--out", "/tmp/cavmatch_cli_x"}) == 2);
    const BinResult coop = run_binary("derive --config " + border +
                                      " --out /tmp/cavmatch_cli_x --steps 512");
    CHECK(coop.exit_code == 2);
    CHECK(coop.err.find("InfeasibleCoupling") != std::string::npos);
    CHECK(coop.err.find("cooperativity") != std::string::npos);

    const std::string zero = write_file("zero.ini",
                                        "[cavity]\n"
                                        "g_mhz = 15\n"
                                        "kappa_mhz = 3\n"
                                        "gamma_mhz = 3\n"
                                        "rho0 = 0\n");
    const BinResult zr = run_binary("derive --config " + zero +
                                    " --out /tmp/cavmatch_cli_x --steps 512");
    CHECK(zr.exit_code == 2);
    CHECK(zr.err.find("ZeroRho0") != std::string::npos);

    const std::string unnorm = write_file("unnorm.ini",
                                          kBaseConfig +
                                          "[timebin]\n"
                                          "alpha_re = 1\n"
                                          "beta_re = 1\n");
    const BinResult nr = run_binary("timebin --config " + unnorm +
                                    " --out /tmp/cavmatch_cli_x --steps 512");
    CHECK(nr.exit_code == 2);
    CHECK(nr.err.find("normalization") != std::string::npos);

    // Usage problems: missing config, unknown subcommand, bad flag value.
    CHECK(run({"derive"}) == 2);
    CHECK(run({"transmogrify", "--config", border}) == 2);
    CHECK(run({"derive", "--config", "/tmp/cavmatch_cli_missing.ini", "--out",
               "/tmp/cavmatch_cli_x"}) == 2);
    CHECK(run({"--help"}) == 0);
}

TEST_CASE("pulse file diagnostics carry row and column positions") {
    const std::string cfg = write_file("pdiag.ini", kBaseConfig);

    const std::string bad_cell = write_file("bad_pulse.csv",
                                            "t_us,omega_mhz\n"
                                            "0,1.0\n"
                                            "0.5,oops\n"
                                            "1.0,3.0\n");
    const BinResult bc = run_binary("simulate --config " + cfg +
                                    " --out /tmp/cavmatch_cli_x --pulse " +
                                    bad_cell);
    CHECK(bc.exit_code == 2);
    CHECK(bc.err.find("ParseError") != std::string::npos);
    CHECK(bc.err.find("row 3") != std::string::npos);
    CHECK(bc.err.find("column 2") != std::string::npos);

    const std::string no_header = write_file("nohdr_pulse.csv",
                                             "time,omega\n"
                                             "0,1\n"
                                             "1,2\n");
    const BinResult nh = run_binary("simulate --config " + cfg +
                                    " --out /tmp/cavmatch_cli_x --pulse " +
                                    no_header);
    CHECK(nh.exit_code == 2);
    CHECK(nh.err.find("t_us") != std::string::npos);

    // A structurally valid pulse on the wrong grid is a grid mismatch, not
    // a parse problem.
    REQUIRE(run({"derive", "--config", cfg, "--out", "/tmp/cavmatch_cli_pg",
                 "--steps", "512"}) == 0);
    const BinResult gm = run_binary("simulate --config " + cfg +
                                    " --out /tmp/cavmatch_cli_x --steps 1024 "
                                    "--pulse /tmp/cavmatch_cli_pg.csv");
    CHECK(gm.exit_code == 2);
    CHECK(gm.err.find("GridMismatch") != std::string::npos);
}

TEST_CASE("output stems strip a trailing extension instead of doubling it") {
    const std::string cfg = write_file("stem.ini", kBaseConfig);
    REQUIRE(run({"derive", "--config", cfg, "--out", "/tmp/cavmatch_cli_stem.csv",
                 "--steps", "512"}) == 0);
    CHECK(std::ifstream("/tmp/cavmatch_cli_stem.csv").good());
    CHECK(std::ifstream("/tmp/cavmatch_cli_stem.json").good());
    CHECK_FALSE(std::ifstream("/tmp/cavmatch_cli_stem.csv.csv").good());
}

}  // TEST_SUITE("cli")
