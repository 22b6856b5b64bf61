#pragma once

#include "cavmatch/model.hpp"

namespace cavmatch {

// Population floor for Omega = zeta / sqrt(rho_ee).  Below this the pulse
// amplitude would exceed any realistic modulator bandwidth, so synthesis
// fails loudly instead of emitting a spike.
inline constexpr double kEpsDiv = 1e-12;

// Everything the inversion derives before dividing out sqrt(rho_ee):
//   cg     = phi_in / sqrt(2 kappa)                  (cavity amplitude)
//   cx_im  = (phi_in' - kappa phi_in)/(g sqrt(2 kappa))   (c_x = i cx_im)
//   zeta   = Omega * c_e = 2[-cx_im' - gamma cx_im - g cg]
//   rho_ee = rho0 - cg^2 - cx_im^2 + cumint(phi_in^2 - 2 gamma cx_im^2)
struct SynthesisIntermediates {
    TimeGrid grid;
    Eigen::ArrayXd cg;
    Eigen::ArrayXd cx_im;
    Eigen::ArrayXd zeta;
    Eigen::ArrayXd rho_ee;
};

struct SynthesisOptions {
    // Optional cap on |Omega| in rad/s; exceeding it raises DivergentPulse.
    // 0 disables the cap.
    double omega_max = 0.0;
};

// Pointwise pieces of the chain; t must be inside the photon support.
double amplitude_cg(const PhotonWaveform& w, const CavityParams& p, double t);
double amplitude_cx(const PhotonWaveform& w, const CavityParams& p, double t);
double coupling_product_zeta(const PhotonWaveform& w, const CavityParams& p,
                             double t);

// rho_ee series over the grid; throws InfeasibleCoupling if it dips below
// zero anywhere (the photon cannot be absorbed without over-drawing the
// excited population).
Eigen::ArrayXd population_ee(const PhotonWaveform& w, const CavityParams& p,
                             const TimeGrid& grid);

SynthesisIntermediates synthesis_intermediates(const PhotonWaveform& w,
                                               const CavityParams& p,
                                               const TimeGrid& grid);

// The impedance-matching control pulse Omega(t) = zeta(t)/sqrt(rho_ee(t)).
// Requires rho0 > 0 and cooperativity > 1/2.
ControlPulse synthesize_control(const PhotonWaveform& w, const CavityParams& p,
                                const TimeGrid& grid,
                                const SynthesisOptions& opts = {});

}  // namespace cavmatch
