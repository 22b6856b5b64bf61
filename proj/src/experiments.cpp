#include "cavmatch/experiments.hpp"

#include "cavmatch/shapes.hpp"
#include "cavmatch/synthesis.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace cavmatch {

TimeGrid simulation_grid(const PhotonWaveform& w, int support_steps) {
    const int tail = support_steps / 4;
    const double dt = w.duration() / support_steps;
    return TimeGrid(w.t_start(), w.t_stop() + tail * dt, support_steps + tail);
}

ControlPulse zero_extend(const ControlPulse& pulse, const TimeGrid& grid) {
    const TimeGrid& src = pulse.grid;
    if (grid.t_start() != src.t_start() || grid.n_steps() < src.n_steps() ||
        std::abs(grid.dt() - src.dt()) > 1e-9 * src.dt()) {
        throw GridMismatch(
            "zero_extend needs a longer grid sharing t_start and dt");
    }
    ControlPulse out{grid, Eigen::ArrayXd::Zero(grid.n_points())};
    out.omega.head(src.n_points()) = pulse.omega;
    return out;
}

namespace {

AbsorptionReport empty_cavity_report(const EmptyCavityResponse& resp) {
    const double dt = resp.grid.dt();
    AbsorptionReport r{};
    r.reflection = trapezoid(resp.phi_out.square(), dt);
    r.spont_loss = 0.0;
    r.storage_efficiency = 0.0;
    const double end_pop = resp.c_cav[resp.grid.n_steps()] *
                           resp.c_cav[resp.grid.n_steps()];
    const double input_norm = trapezoid(resp.phi_in.square(), dt);
    r.conservation_residual = std::abs(end_pop + r.reflection - input_norm);
    return r;
}

// Run one synthesis + matched simulation for given params.
struct MatchedRun {
    ControlPulse pulse;      // support grid
    ControlPulse sim_pulse;  // zero-extended
    TimeGrid sim_grid;
    CaseRun seeded;
};

MatchedRun matched_run(const PhotonWaveform& w, const CavityParams& p,
                       int support_steps) {
    const TimeGrid support(w.t_start(), w.t_stop(), support_steps);
    ControlPulse pulse = synthesize_control(w, p, support);
    const TimeGrid sim_grid = simulation_grid(w, support_steps);
    ControlPulse sim_pulse = zero_extend(pulse, sim_grid);
    const InitialState seeded{std::sqrt(p.rho0), 0.0, 0.0};
    StateTrajectory traj = simulate(w, sim_pulse, p, seeded, sim_grid);
    AbsorptionReport report = excitation_ledger(traj, w, p, seeded);
    return MatchedRun{std::move(pulse), std::move(sim_pulse), sim_grid,
                      CaseRun{std::move(traj), report}};
}

}  // namespace

AbsorptionCases run_absorption_cases(const PhotonWaveform& w,
                                     const CavityParams& p, int support_steps) {
    MatchedRun run = matched_run(w, p, support_steps);

    EmptyCavityResponse empty = empty_cavity_response(w, p.kappa, run.sim_grid);
    const AbsorptionReport empty_report = empty_cavity_report(empty);

    const InitialState ground{};
    StateTrajectory ground_traj =
        simulate(w, run.sim_pulse, p, ground, run.sim_grid);
    const AbsorptionReport ground_report =
        excitation_ledger(ground_traj, w, p, ground);

    return AbsorptionCases{std::move(run.pulse), std::move(empty), empty_report,
                           CaseRun{std::move(ground_traj), ground_report},
                           std::move(run.seeded)};
}

namespace {

// Index-ordered parallel map: results land by index, so output is
// deterministic no matter how many workers run.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<Rho0Point> sweep_rho0(const PhotonWaveform& w, const CavityParams& p,
                                  const std::vector<double>& rho0_list,
                                  int support_steps, int jobs) {
    std::vector<Rho0Point> out(rho0_list.size());
    parallel_for(int(rho0_list.size()), jobs, [&](int i) {
        Rho0Point& pt = out[i];
        pt.rho0 = rho0_list[i];
        try {
            const CavityParams pi(p.g, p.kappa, p.gamma, pt.rho0);
            MatchedRun run = matched_run(w, pi, support_steps);
            pt.pulse = std::move(run.pulse);
            pt.peak_omega = pt.pulse->peak_abs();
            pt.roundtrip_reflection = run.seeded.report.reflection;
            pt.feasible = true;
        } catch (const Error& e) {
            pt.feasible = false;
            pt.error = std::string(e.kind()) + ": " + e.what();
        }
    });
    return out;
}

std::vector<CoopPoint> sweep_cooperativity(const PhotonWaveform& w, double kappa,
                                           double gamma,
                                           const std::vector<double>& c_list,
                                           double rho0, int support_steps,
                                           int jobs) {
    std::vector<CoopPoint> out(c_list.size());
    parallel_for(int(c_list.size()), jobs, [&](int i) {
        CoopPoint& pt = out[i];
        pt.cooperativity = c_list[i];
        pt.g = std::sqrt(2.0 * kappa * gamma * pt.cooperativity);
        try {
            const CavityParams pi(pt.g, kappa, gamma, rho0);
            MatchedRun run = matched_run(w, pi, support_steps);
            pt.efficiency = run.seeded.report.storage_efficiency;
            pt.mismatch = run.seeded.report.reflection;
            pt.feasible = true;
        } catch (const Error& e) {
            pt.feasible = false;
            pt.error = std::string(e.kind()) + ": " + e.what();
        }
    });
    return out;
}

TimeBinQubit::TimeBinQubit(PhotonWaveform phi1_, PhotonWaveform phi2_,
                           std::complex<double> alpha_,
                           std::complex<double> beta_)
    : phi1(std::move(phi1_)),
      phi2(std::move(phi2_)),
      alpha(alpha_),
      beta(beta_) {
    const double norm2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm2 - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "time-bin amplitudes need |alpha|^2 + |beta|^2 = 1, got " << norm2;
        throw InvalidParams(msg.str());
    }
    if (phi2.t_start() < phi1.t_stop()) {
        std::ostringstream msg;
        msg << "time bins overlap: bin 1 ends at " << s_to_us(phi1.t_stop())
            << " us, bin 2 starts at " << s_to_us(phi2.t_start()) << " us";
        throw OverlapError(msg.str());
    }
}

TimebinRun run_timebin(const TimeBinQubit& q, const CavityParams& p,
                       int support_steps) {
    // Each bin addresses its own three-level system; run both at unit
    // amplitude in the bin's local time frame (the dynamics are invariant
    // under time translation, and localizing makes equal-shaped bins produce
    // bitwise-identical pulses).  The pulses depend only on the bin shapes.
    MatchedRun run1 = matched_run(localize_support(q.phi1), p, support_steps);
    MatchedRun run2 = matched_run(localize_support(q.phi2), p, support_steps);

    const double eta1 = run1.seeded.report.storage_efficiency;
    const double eta2 = run2.seeded.report.storage_efficiency;

    TimebinRun out{{},
                   std::move(run1.pulse),
                   std::move(run2.pulse),
                   run1.seeded.report,
                   run2.seeded.report};

    // Transferred amplitudes: the input alpha*phi1 delivers alpha*sqrt(eta1)
    // into |m=-1>, likewise for bin 2 (linearity; the transfer amplitude is
    // real and positive under the resonant convention).
    const std::complex<double> a = q.alpha * std::sqrt(std::max(eta1, 0.0));
    const std::complex<double> b = q.beta * std::sqrt(std::max(eta2, 0.0));

    MappingReport& rep = out.report;
    rep.pop_minus = std::norm(a);
    rep.pop_plus = std::norm(b);
    rep.efficiency = rep.pop_minus + rep.pop_plus;

    Eigen::Vector2cd v;
    v << a, b;
    Eigen::Vector2cd target;
    target << q.alpha, q.beta;
    if (rep.efficiency > 0.0) {
        rep.density_matrix = (v * v.adjoint()) / rep.efficiency;
        rep.fidelity = std::norm(target.dot(v)) / rep.efficiency;
    } else {
        rep.density_matrix = Eigen::Matrix2cd::Zero();
        rep.fidelity = 0.0;
    }
    return out;
}

MappingReport timebin_map(const TimeBinQubit& q, const CavityParams& p,
                          int support_steps) {
    return run_timebin(q, p, support_steps).report;
}

}  // namespace cavmatch
