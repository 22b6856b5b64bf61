#pragma once

#include "cavmatch/model.hpp"

namespace cavmatch {

// Initial amplitudes (real convention, c_x = i * cx_im0).
struct InitialState {
    double ce0 = 0.0;
    double cx_im0 = 0.0;
    double cg0 = 0.0;

    double norm2() const { return ce0 * ce0 + cx_im0 * cx_im0 + cg0 * cg0; }
};

struct SimOptions {
    // Scales the input amplitude: the integrator sees input_scale * phi_in.
    // The equations are linear, so trajectories scale exactly with it.
    double input_scale = 1.0;
};

// Integrate the coupled three-level equations with the control pulse:
//   c_e'   =  (Omega/2) cx_im
//   cx_im' = -(Omega/2) c_e - gamma cx_im - g c_g
//   c_g'   =  g cx_im - kappa c_g + sqrt(2 kappa) phi_in
//   phi_out = sqrt(2 kappa) c_g - phi_in
// Classical fixed-step RK4; phi_in is evaluated analytically at substep
// times, Omega at substep midpoints by averaging adjacent samples.
// pulse.grid must equal grid (GridMismatch otherwise).
StateTrajectory simulate(const PhotonWaveform& w, const ControlPulse& pulse,
                         const CavityParams& p, const InitialState& init,
                         const TimeGrid& grid, const SimOptions& opts = {});

// The same mirror with no atom: c_cav' = -kappa c_cav + sqrt(2 kappa) phi_in,
// phi_out = sqrt(2 kappa) c_cav - phi_in.  A lossless single-sided cavity
// reflects everything; the interest is in the phase flip of phi_out.
struct EmptyCavityResponse {
    TimeGrid grid;
    Eigen::ArrayXd c_cav;
    Eigen::ArrayXd phi_in;
    Eigen::ArrayXd phi_out;
};

EmptyCavityResponse empty_cavity_response(const PhotonWaveform& w, double kappa,
                                          const TimeGrid& grid);

// Trapezoidal integral of |phi_out|^2 over the trajectory grid.
double reflection_probability(const StateTrajectory& traj);
double reflection_probability(const EmptyCavityResponse& resp);

// Excitation bookkeeping for a finished run; see AbsorptionReport.
AbsorptionReport excitation_ledger(const StateTrajectory& traj,
                                   const PhotonWaveform& w,
                                   const CavityParams& p,
                                   const InitialState& init);

}  // namespace cavmatch
