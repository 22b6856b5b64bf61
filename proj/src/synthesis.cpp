#include "cavmatch/synthesis.hpp"

#include <cmath>
#include <sstream>

namespace cavmatch {

namespace {

void require_in_support(const PhotonWaveform& w, double t) {
    if (!w.in_support(t)) {
        std::ostringstream msg;
        msg << "t=" << t << " s outside photon support [" << w.t_start() << ", "
            << w.t_stop() << "] s";
        throw SupportError(msg.str());
    }
}

}  // namespace

double amplitude_cg(const PhotonWaveform& w, const CavityParams& p, double t) {
    require_in_support(w, t);
    return w.value(t) / std::sqrt(2.0 * p.kappa);
}

double amplitude_cx(const PhotonWaveform& w, const CavityParams& p, double t) {
    require_in_support(w, t);
    return (w.d1(t) - p.kappa * w.value(t)) / (p.g * std::sqrt(2.0 * p.kappa));
}

double coupling_product_zeta(const PhotonWaveform& w, const CavityParams& p,
                             double t) {
    require_in_support(w, t);
    const double s2k = std::sqrt(2.0 * p.kappa);
    const double cg = w.value(t) / s2k;
    const double cx = (w.d1(t) - p.kappa * w.value(t)) / (p.g * s2k);
    // d/dt cx_im, using the waveform's own second derivative rather than a
    // difference of cx samples: differentiation error would feed straight
    // into Omega.
    const double cx_dot = (w.d2(t) - p.kappa * w.d1(t)) / (p.g * s2k);
    return 2.0 * (-cx_dot - p.gamma * cx - p.g * cg);
}

SynthesisIntermediates synthesis_intermediates(const PhotonWaveform& w,
                                               const CavityParams& p,
                                               const TimeGrid& grid) {
    const int n = grid.n_points();
    const double s2k = std::sqrt(2.0 * p.kappa);

    Eigen::ArrayXd phi(n), d1(n), d2(n);
    for (int k = 0; k < n; ++k) {
        const double t = grid.t(k);
        phi[k] = w.value(t);
        d1[k] = w.d1(t);
        d2[k] = w.d2(t);
    }

    SynthesisIntermediates out{grid, {}, {}, {}, {}};
    out.cg = phi / s2k;
    out.cx_im = (d1 - p.kappa * phi) / (p.g * s2k);
    const Eigen::ArrayXd cx_dot = (d2 - p.kappa * d1) / (p.g * s2k);
    out.zeta = 2.0 * (-cx_dot - p.gamma * out.cx_im - p.g * out.cg);

    // Continuity balance: whatever the input delivered and spontaneous decay
    // has not eaten, minus what sits in |g,1> and |x,0>, must be in |e,0>.
    const Eigen::ArrayXd gain = phi.square() - 2.0 * p.gamma * out.cx_im.square();
    out.rho_ee = p.rho0 - out.cg.square() - out.cx_im.square() +
                 cumulative_trapezoid(gain, grid.dt());
    return out;
}

namespace {

void check_feasible(const SynthesisIntermediates& s) {
    int k_min = 0;
    const double min_rho = s.rho_ee.minCoeff(&k_min);
    if (min_rho < 0.0) {
        std::ostringstream msg;
        msg << "rho_ee dips to " << min_rho << " at t=" << s.grid.t(int(k_min))
            << " s: photon cannot be absorbed with these parameters";
        throw InfeasibleCoupling(msg.str());
    }
}

}  // namespace

Eigen::ArrayXd population_ee(const PhotonWaveform& w, const CavityParams& p,
                             const TimeGrid& grid) {
    SynthesisIntermediates s = synthesis_intermediates(w, p, grid);
    check_feasible(s);
    return s.rho_ee;
}

ControlPulse synthesize_control(const PhotonWaveform& w, const CavityParams& p,
                                const TimeGrid& grid,
                                const SynthesisOptions& opts) {
    if (p.rho0 == 0.0) {
        throw ZeroRho0(
            "rho0 = 0: the control pulse does not converge to a finite "
            "function; seed a small initial |e,0> population");
    }
    const double coop = p.cooperativity();
    if (coop <= 0.5) {
        std::ostringstream msg;
        msg << "cooperativity C = " << coop
            << " <= 1/2: impedance matching is impossible (need g^2 > kappa*gamma)";
        throw InfeasibleCoupling(msg.str());
    }

    SynthesisIntermediates s = synthesis_intermediates(w, p, grid);
    check_feasible(s);

    ControlPulse pulse{grid, Eigen::ArrayXd::Zero(grid.n_points())};
    for (int k = 0; k < grid.n_points(); ++k) {
        if (s.rho_ee[k] < kEpsDiv) {
            if (s.zeta[k] != 0.0) {
                std::ostringstream msg;
                msg << "rho_ee = " << s.rho_ee[k] << " below " << kEpsDiv
                    << " at t=" << grid.t(k)
                    << " s while zeta != 0: Omega diverges";
                throw DivergentPulse(msg.str());
            }
            pulse.omega[k] = 0.0;
        } else {
            pulse.omega[k] = s.zeta[k] / std::sqrt(s.rho_ee[k]);
        }
        if (!std::isfinite(pulse.omega[k])) {
            std::ostringstream msg;
            msg << "Omega not finite at t=" << grid.t(k) << " s";
            throw DivergentPulse(msg.str());
        }
    }

    if (opts.omega_max > 0.0) {
        const double peak = pulse.peak_abs();
        if (peak > opts.omega_max) {
            std::ostringstream msg;
            msg << "|Omega| peaks at " << rad_to_mhz(peak) << " MHz, above the "
                << rad_to_mhz(opts.omega_max) << " MHz cap";
            throw DivergentPulse(msg.str());
        }
    }
    return pulse;
}

}  // namespace cavmatch
