#include "cavmatch/commands.hpp"

#include "cavmatch/dynamics.hpp"
#include "cavmatch/experiments.hpp"
#include "cavmatch/synthesis.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>

namespace cavmatch {

namespace {

std::string strip_suffix(std::string stem) {
    for (const char* ext : {".csv", ".json"}) {
        if (stem.size() > std::strlen(ext) &&
            stem.compare(stem.size() - std::strlen(ext), std::string::npos, ext) == 0) {
            stem.resize(stem.size() - std::strlen(ext));
            break;
        }
    }
    return stem;
}

void config_comments(CsvFile& csv, const RunConfig& cfg) {
    csv.comment(std::string("cavmatch ") + kVersion);
    csv.comment("g_mhz = " + fmt_g17(cfg.g_mhz));
    csv.comment("kappa_mhz = " + fmt_g17(cfg.kappa_mhz));
    csv.comment("gamma_mhz = " + fmt_g17(cfg.gamma_mhz));
    csv.comment("rho0 = " + fmt_g17(cfg.rho0));
    csv.comment(std::string("shape = ") + shape_name(cfg.shape));
    csv.comment("tau_us = " + fmt_g17(cfg.tau_us));
    csv.comment("steps = " + std::to_string(cfg.steps));
}

void config_fields(JsonFile& json, const RunConfig& cfg) {
    json.field("version", std::string(kVersion));
    json.field("g_mhz", cfg.g_mhz);
    json.field("kappa_mhz", cfg.kappa_mhz);
    json.field("gamma_mhz", cfg.gamma_mhz);
    json.field("rho0", cfg.rho0);
    json.field("shape", std::string(shape_name(cfg.shape)));
    json.field("tau_us", cfg.tau_us);
    json.field("steps", cfg.steps);
}

SynthesisOptions synthesis_options(const RunConfig& cfg) {
    SynthesisOptions opts;
    if (cfg.omega_max_mhz > 0.0) opts.omega_max = mhz_to_rad(cfg.omega_max_mhz);
    return opts;
}

}  // namespace

int cmd_derive(const RunConfig& cfg, const std::string& out_stem) {
    const PhotonWaveform w = make_waveform(cfg.shape_spec());
    const CavityParams p = cfg.params();
    const TimeGrid grid(w.t_start(), w.t_stop(), cfg.steps);

    const SynthesisIntermediates s = synthesis_intermediates(w, p, grid);
    const ControlPulse pulse = synthesize_control(w, p, grid, synthesis_options(cfg));

    const std::string stem = strip_suffix(out_stem);
    CsvFile csv(stem + ".csv");
    config_comments(csv, cfg);
    csv.comment("command = derive");
    csv.header({"t_us", "phi_in", "omega_mhz", "rho_ee"});
    for (int k = 0; k < grid.n_points(); ++k) {
        csv.row({fmt_g17(s_to_us(grid.t(k))), fmt_g17(w.value(grid.t(k))),
                 fmt_g17(rad_to_mhz(pulse.omega[k])), fmt_g17(s.rho_ee[k])});
    }

    JsonFile json(stem + ".json");
    json.field("command", std::string("derive"));
    config_fields(json, cfg);
    json.field("peak_omega_mhz", rad_to_mhz(pulse.peak_abs()));
    json.close();

    std::cout << "derived control pulse: " << grid.n_points() << " samples, peak |Omega|/2pi = "
              << rad_to_mhz(pulse.peak_abs()) << " MHz -> " << stem << ".csv\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_stem,
                 const std::string& pulse_path, bool empty_cavity) {
    const PhotonWaveform w = make_waveform(cfg.shape_spec());
    const CavityParams p = cfg.params();
    const TimeGrid support(w.t_start(), w.t_stop(), cfg.steps);
    const TimeGrid sim_grid = simulation_grid(w, cfg.steps);
    const std::string stem = strip_suffix(out_stem);

    if (empty_cavity) {
        const EmptyCavityResponse resp = empty_cavity_response(w, p.kappa, sim_grid);
        const double refl = reflection_probability(resp);
        const double end_pop = resp.c_cav[sim_grid.n_steps()] *
                               resp.c_cav[sim_grid.n_steps()];
        const double input_norm = trapezoid(resp.phi_in.square(), sim_grid.dt());

        CsvFile csv(stem + ".csv");
        config_comments(csv, cfg);
        csv.comment("command = simulate --empty-cavity");
        csv.header({"t_us", "phi_in", "phi_out", "c_e", "c_x_im", "c_g", "rho_ee",
                    "rho_gg", "rho_xx"});
        for (int k = 0; k < sim_grid.n_points(); ++k) {
            const double cg = resp.c_cav[k];
            csv.row({fmt_g17(s_to_us(sim_grid.t(k))), fmt_g17(resp.phi_in[k]),
                     fmt_g17(resp.phi_out[k]), "0", "0", fmt_g17(cg), "0",
                     fmt_g17(cg * cg), "0"});
        }

        JsonFile json(stem + ".json");
        json.field("command", std::string("simulate"));
        json.field("empty_cavity", std::string("true"));
        config_fields(json, cfg);
        json.field("reflection", refl);
        json.field("spont_loss", 0.0);
        json.field("storage_efficiency", 0.0);
        json.field("conservation_residual",
                   std::abs(end_pop + refl - input_norm));
        json.close();

        std::cout << "empty cavity: reflection = " << refl << " -> " << stem
                  << ".json\n";
        return 0;
    }

    ControlPulse pulse = pulse_path.empty()
                             ? synthesize_control(w, p, support, synthesis_options(cfg))
                             : read_pulse_csv(pulse_path);
    if (pulse.grid != support) {
        std::ostringstream msg;
        msg << "pulse grid [" << s_to_us(pulse.grid.t_start()) << ", "
            << s_to_us(pulse.grid.t_stop()) << "] us / " << pulse.grid.n_steps()
            << " steps does not match the photon support grid ["
            << s_to_us(support.t_start()) << ", " << s_to_us(support.t_stop())
            << "] us / " << support.n_steps() << " steps";
        throw GridMismatch(msg.str());
    }
    const ControlPulse sim_pulse = zero_extend(pulse, sim_grid);

    const InitialState init = cfg.init == "seeded"
                                  ? InitialState{std::sqrt(p.rho0), 0.0, 0.0}
                                  : InitialState{};
    const StateTrajectory traj = simulate(w, sim_pulse, p, init, sim_grid);
    const AbsorptionReport report = excitation_ledger(traj, w, p, init);

    CsvFile csv(stem + ".csv");
    config_comments(csv, cfg);
    csv.comment("command = simulate");
    csv.comment("init = " + cfg.init);
    csv.header({"t_us", "phi_in", "phi_out", "c_e", "c_x_im", "c_g", "rho_ee",
                "rho_gg", "rho_xx"});
    for (int k = 0; k < sim_grid.n_points(); ++k) {
        csv.row({fmt_g17(s_to_us(sim_grid.t(k))), fmt_g17(traj.phi_in[k]),
                 fmt_g17(traj.phi_out[k]), fmt_g17(traj.c_e[k]),
                 fmt_g17(traj.c_x_im[k]), fmt_g17(traj.c_g[k]),
                 fmt_g17(traj.c_e[k] * traj.c_e[k]),
                 fmt_g17(traj.c_g[k] * traj.c_g[k]),
                 fmt_g17(traj.c_x_im[k] * traj.c_x_im[k])});
    }

    JsonFile json(stem + ".json");
    json.field("command", std::string("simulate"));
    json.field("init", cfg.init);
    config_fields(json, cfg);
    json.field("reflection", report.reflection);
    json.field("spont_loss", report.spont_loss);
    json.field("storage_efficiency", report.storage_efficiency);
    json.field("conservation_residual", report.conservation_residual);
    json.close();

    std::cout << "simulated " << cfg.init << " case: reflection = "
              << report.reflection << ", storage efficiency = "
              << report.storage_efficiency << " -> " << stem << ".json\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_stem, int jobs) {
    if (cfg.sweep_axis.empty()) {
        throw InvalidParams("sweep needs [sweep] axis = rho0 | cooperativity");
    }
    if (cfg.sweep_values.empty()) {
        throw InvalidParams("sweep needs a non-empty [sweep] values list");
    }

    const PhotonWaveform w = make_waveform(cfg.shape_spec());
    const std::string stem = strip_suffix(out_stem);

    CsvFile csv(stem + ".csv");
    config_comments(csv, cfg);
    csv.comment("command = sweep");
    csv.comment("axis = " + cfg.sweep_axis);
    csv.header({"sweep_value", "metric", "value", "feasible"});

    int n_feasible = 0;
    if (cfg.sweep_axis == "rho0") {
        const auto points =
            sweep_rho0(w, cfg.params(), cfg.sweep_values, cfg.steps, jobs);
        for (const Rho0Point& pt : points) {
            const std::string flag = pt.feasible ? "1" : "0";
            const std::string peak =
                pt.feasible ? fmt_g17(rad_to_mhz(pt.peak_omega)) : "nan";
            const std::string refl =
                pt.feasible ? fmt_g17(pt.roundtrip_reflection) : "nan";
            csv.row({fmt_g17(pt.rho0), "peak_omega_mhz", peak, flag});
            csv.row({fmt_g17(pt.rho0), "roundtrip_reflection", refl, flag});
            if (pt.feasible) ++n_feasible;
        }
        // The full pulse surface, long format.
        CsvFile surface(stem + "_pulses.csv");
        config_comments(surface, cfg);
        surface.comment("command = sweep (pulse surface)");
        surface.header({"t_us", "rho0", "omega_mhz"});
        for (const Rho0Point& pt : points) {
            if (!pt.feasible) continue;
            const TimeGrid& grid = pt.pulse->grid;
            for (int k = 0; k < grid.n_points(); ++k) {
                surface.row({fmt_g17(s_to_us(grid.t(k))), fmt_g17(pt.rho0),
                             fmt_g17(rad_to_mhz(pt.pulse->omega[k]))});
            }
        }
    } else {
        const CavityParams base = cfg.params();
        const auto points =
            sweep_cooperativity(w, base.kappa, base.gamma, cfg.sweep_values,
                                cfg.rho0, cfg.steps, jobs);
        for (const CoopPoint& pt : points) {
            const std::string flag = pt.feasible ? "1" : "0";
            const std::string eff = pt.feasible ? fmt_g17(pt.efficiency) : "nan";
            const std::string mis = pt.feasible ? fmt_g17(pt.mismatch) : "nan";
            csv.row({fmt_g17(pt.cooperativity), "efficiency", eff, flag});
            csv.row({fmt_g17(pt.cooperativity), "mismatch", mis, flag});
            if (pt.feasible) ++n_feasible;
        }
    }

    JsonFile json(stem + ".json");
    json.field("command", std::string("sweep"));
    json.field("axis", cfg.sweep_axis);
    config_fields(json, cfg);
    json.field("n_points", int(cfg.sweep_values.size()));
    json.field("n_feasible", n_feasible);
    json.close();

    std::cout << "swept " << cfg.sweep_axis << ": " << cfg.sweep_values.size()
              << " points, " << n_feasible << " feasible -> " << stem << ".csv\n";
    return 0;
}

int cmd_timebin(const RunConfig& cfg, const std::string& out_stem) {
    std::complex<double> alpha(cfg.alpha_re, cfg.alpha_im);
    std::complex<double> beta(cfg.beta_re, cfg.beta_im);
    const double norm2 = std::norm(alpha) + std::norm(beta);
    // Accept mildly rounded inputs (e.g. 4-digit 0.7071) and renormalize
    // exactly; anything further from 1 is a genuine normalization error.
    if (std::abs(norm2 - 1.0) > 1e-3) {
        std::ostringstream msg;
        msg << "time-bin normalization error: |alpha|^2 + |beta|^2 = " << norm2
            << " (must be 1)";
        throw InvalidParams(msg.str());
    }
    alpha /= std::sqrt(norm2);
    beta /= std::sqrt(norm2);

    ShapeSpec spec = cfg.shape_spec();
    const PhotonWaveform bin1 = make_waveform(spec);
    const PhotonWaveform bin2 =
        shift_support(bin1, bin1.duration() + us_to_s(cfg.gap_us));
    const TimeBinQubit qubit(bin1, bin2, alpha, beta);

    const TimebinRun run = run_timebin(qubit, cfg.params(), cfg.steps);
    const MappingReport& rep = run.report;

    const std::string stem = strip_suffix(out_stem);
    JsonFile json(stem + ".json");
    json.field("command", std::string("timebin"));
    config_fields(json, cfg);
    json.field("alpha_re", alpha.real());
    json.field("alpha_im", alpha.imag());
    json.field("beta_re", beta.real());
    json.field("beta_im", beta.imag());
    json.field("gap_us", cfg.gap_us);
    json.field("pop_minus", rep.pop_minus);
    json.field("pop_plus", rep.pop_plus);
    json.field("efficiency", rep.efficiency);
    json.field("fidelity", rep.fidelity);
    json.field("dm00_re", rep.density_matrix(0, 0).real());
    json.field("dm00_im", rep.density_matrix(0, 0).imag());
    json.field("dm01_re", rep.density_matrix(0, 1).real());
    json.field("dm01_im", rep.density_matrix(0, 1).imag());
    json.field("dm10_re", rep.density_matrix(1, 0).real());
    json.field("dm10_im", rep.density_matrix(1, 0).imag());
    json.field("dm11_re", rep.density_matrix(1, 1).real());
    json.field("dm11_im", rep.density_matrix(1, 1).imag());
    json.field("bin1_reflection", run.bin1.reflection);
    json.field("bin2_reflection", run.bin2.reflection);
    json.close();

    std::cout << "time-bin mapping: efficiency = " << rep.efficiency
              << ", fidelity = " << rep.fidelity << " -> " << stem << ".json\n";
    return 0;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Impedance-matched single-photon absorption: control pulse "
                 "synthesis and verification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_stem = "cavmatch_out";
    std::string pulse_path;
    int steps_override = 0;
    int jobs = 1;
    bool empty_cavity = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "INI config file")->required();
        sub->add_option("--out", out_stem, "output path stem");
        sub->add_option("--steps", steps_override, "override grid steps")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* derive = app.add_subcommand("derive", "synthesize the control pulse");
    add_common(derive);
    CLI::App* simulate = app.add_subcommand("simulate", "integrate the equations of motion");
    add_common(simulate);
    simulate->add_option("--pulse", pulse_path, "pulse CSV (from derive) instead of deriving inline");
    simulate->add_flag("--empty-cavity", empty_cavity, "no atom: bare mirror response");
    CLI::App* sweep = app.add_subcommand("sweep", "sweep rho0 or cooperativity");
    add_common(sweep);
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    CLI::App* timebin = app.add_subcommand("timebin", "map a two-bin photonic qubit");
    add_common(timebin);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage problem.
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (steps_override > 0) cfg.steps = steps_override;

        if (derive->parsed()) return cmd_derive(cfg, out_stem);
        if (simulate->parsed()) return cmd_simulate(cfg, out_stem, pulse_path, empty_cavity);
        if (sweep->parsed()) return cmd_sweep(cfg, out_stem, jobs);
        if (timebin->parsed()) return cmd_timebin(cfg, out_stem);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cavmatch
