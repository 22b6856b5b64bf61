#pragma once

#include "cavmatch/dynamics.hpp"
#include "cavmatch/model.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace cavmatch {

inline constexpr int kDefaultSteps = 1 << 14;

// Simulation runs extend the photon support by a 25% drain tail at the same
// step size, so excitation still inside the cavity at the end of the photon
// has decayed out and the phi_out integral captures all reflected energy.
TimeGrid simulation_grid(const PhotonWaveform& w, int support_steps);

// Pad a pulse with zeros onto a longer grid sharing t_start and dt.
ControlPulse zero_extend(const ControlPulse& pulse, const TimeGrid& grid);

struct CaseRun {
    StateTrajectory traj;
    AbsorptionReport report;
};

// The canonical three-run comparison for one photon: (a) no atom,
// (b) atom starting in |g,0> with the matched pulse, (c) atom with the
// seeded initial population c_e = sqrt(rho0) the pulse was derived for.
struct AbsorptionCases {
    ControlPulse pulse;  // synthesized on the support grid
    EmptyCavityResponse empty;
    AbsorptionReport empty_report;
    CaseRun ground;
    CaseRun seeded;
};

AbsorptionCases run_absorption_cases(const PhotonWaveform& w,
                                     const CavityParams& p,
                                     int support_steps = kDefaultSteps);

struct Rho0Point {
    double rho0 = 0.0;
    bool feasible = false;
    std::string error;                  // empty when feasible
    std::optional<ControlPulse> pulse;  // support grid; absent when infeasible
    double peak_omega = 0.0;            // rad/s
    double roundtrip_reflection = 0.0;  // matched-init check
};

std::vector<Rho0Point> sweep_rho0(const PhotonWaveform& w, const CavityParams& p,
                                  const std::vector<double>& rho0_list,
                                  int support_steps = kDefaultSteps,
                                  int jobs = 1);

struct CoopPoint {
    double cooperativity = 0.0;
    double g = 0.0;  // rad/s, derived from C
    bool feasible = false;
    std::string error;
    double efficiency = 0.0;  // population transferred to |e,0>
    double mismatch = 0.0;    // reflection of the matched run
};

// Hold kappa and gamma fixed, derive g = sqrt(2 kappa gamma C) per point.
std::vector<CoopPoint> sweep_cooperativity(const PhotonWaveform& w, double kappa,
                                           double gamma,
                                           const std::vector<double>& c_list,
                                           double rho0,
                                           int support_steps = kDefaultSteps,
                                           int jobs = 1);

// A photonic qubit in two temporally disjoint wavepackets:
// phi(t) = alpha*phi1(t) + beta*phi2(t).
struct TimeBinQubit {
    PhotonWaveform phi1;
    PhotonWaveform phi2;
    std::complex<double> alpha;
    std::complex<double> beta;

    // Validates |alpha|^2 + |beta|^2 = 1 (to 1e-9) and disjoint supports
    // with phi1 first (OverlapError otherwise).
    TimeBinQubit(PhotonWaveform phi1_, PhotonWaveform phi2_,
                 std::complex<double> alpha_, std::complex<double> beta_);
};

// Outcome of mapping the time-bin qubit onto the two atomic target states:
// bin 1 -> |m=-1>, bin 2 -> |m=+1>.
struct MappingReport {
    double pop_minus = 0.0;   // |alpha|^2 * eta_1
    double pop_plus = 0.0;    // |beta|^2 * eta_2
    double efficiency = 0.0;  // pop_minus + pop_plus
    double fidelity = 0.0;    // overlap with the target, given success
    Eigen::Matrix2cd density_matrix;  // conditional atomic state
};

struct TimebinRun {
    MappingReport report;
    // Pulses in each bin's local time frame (support starting at t = 0);
    // they depend only on the bin shapes, not on alpha/beta, and two bins
    // with the same shape get bitwise-identical pulses.
    ControlPulse pulse1;
    ControlPulse pulse2;
    AbsorptionReport bin1;  // unit-amplitude single-bin reports
    AbsorptionReport bin2;
};

// The two bins address distinct three-level systems, so each is simulated as
// its own absorption problem at unit amplitude and the qubit amplitudes are
// attached afterwards (the equations are linear in the input).
TimebinRun run_timebin(const TimeBinQubit& q, const CavityParams& p,
                       int support_steps = kDefaultSteps);

MappingReport timebin_map(const TimeBinQubit& q, const CavityParams& p,
                          int support_steps = kDefaultSteps);

}  // namespace cavmatch
