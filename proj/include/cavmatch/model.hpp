#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>

namespace cavmatch {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Unit convention: all rates are stored internally as angular frequencies in
// rad/s and all times in seconds.  A quoted rate of "nu MHz" means
// 2*pi*nu*1e6 rad/s, so kappa_mhz = 3 is a cavity field decay of
// 1.885e7 rad/s.  Config files and CSV output use MHz / microseconds.
inline double mhz_to_rad(double nu_mhz) { return kTwoPi * nu_mhz * 1e6; }
inline double rad_to_mhz(double omega) { return omega / (kTwoPi * 1e6); }
inline double us_to_s(double t_us) { return t_us * 1e-6; }
inline double s_to_us(double t_s) { return t_s * 1e6; }

// Error hierarchy.  kind() gives a stable machine-matchable name that the
// CLI prints in diagnostics.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const { return "Error"; }
};

#define CAVMATCH_ERROR_TYPE(NAME)                      \
    class NAME : public Error {                        \
    public:                                            \
        using Error::Error;                            \
        const char* kind() const override { return #NAME; } \
    }

CAVMATCH_ERROR_TYPE(InvalidParams);      // bad construction arguments
CAVMATCH_ERROR_TYPE(SupportError);       // time outside a waveform's support
CAVMATCH_ERROR_TYPE(InfeasibleCoupling); // rho_ee < 0 or cooperativity <= 1/2
CAVMATCH_ERROR_TYPE(ZeroRho0);           // control pulse undefined at rho0 = 0
CAVMATCH_ERROR_TYPE(DivergentPulse);     // |Omega| not finite / above the cap
CAVMATCH_ERROR_TYPE(GridMismatch);       // pulse grid != simulation grid
CAVMATCH_ERROR_TYPE(OverlapError);       // time-bin supports overlap
CAVMATCH_ERROR_TYPE(ParseError);         // config / data file problems

#undef CAVMATCH_ERROR_TYPE

// Atom-cavity parameters.  g couples |e,0> <-> |x,0> via the cavity photon,
// kappa is the cavity field decay through the coupling mirror, gamma the
// atomic polarization decay of |x>.  rho0 seeds a small initial population
// in |e,0> so the synthesized control pulse stays finite at the start.
struct CavityParams {
    double g;      // rad/s
    double kappa;  // rad/s
    double gamma;  // rad/s
    double rho0;   // dimensionless, in [0, 1)

    CavityParams(double g_, double kappa_, double gamma_, double rho0_ = 0.005);

    double cooperativity() const { return g * g / (2.0 * kappa * gamma); }
};

double cooperativity(const CavityParams& p);

// Uniform time grid.  Node times come from the index formula
// t_k = t_start + k*dt with the final node pinned to t_stop, so there is no
// accumulated drift and grids sharing (t_start, dt) agree bitwise on their
// common prefix.
class TimeGrid {
public:
    TimeGrid(double t_start, double t_stop, int n_steps);

    double t_start() const { return t_start_; }
    double t_stop() const { return t_stop_; }
    double dt() const { return dt_; }
    int n_steps() const { return n_steps_; }
    int n_points() const { return n_steps_ + 1; }

    double t(int k) const {
        return k == n_steps_ ? t_stop_ : t_start_ + k * dt_;
    }
    Eigen::ArrayXd times() const;

    bool operator==(const TimeGrid& o) const {
        return t_start_ == o.t_start_ && t_stop_ == o.t_stop_ &&
               n_steps_ == o.n_steps_;
    }
    bool operator!=(const TimeGrid& o) const { return !(*this == o); }

private:
    double t_start_;
    double t_stop_;
    double dt_;
    int n_steps_;
};

// Trapezoidal rule on a uniform grid (y sampled at the nodes).
double trapezoid(const Eigen::ArrayXd& y, double dt);
// Running trapezoidal integral; out[0] = 0, out has y.size() entries.
Eigen::ArrayXd cumulative_trapezoid(const Eigen::ArrayXd& y, double dt);

// Shape implementation behind PhotonWaveform: the amplitude and its first
// two time derivatives over the finite support [t_start, t_stop].  value/d1/d2
// are only called with t inside the support.
class WaveformProfile {
public:
    WaveformProfile(double t_start, double t_stop);
    virtual ~WaveformProfile() = default;

    double t_start() const { return t_start_; }
    double t_stop() const { return t_stop_; }

    virtual double value(double t) const = 0;
    virtual double d1(double t) const = 0;
    virtual double d2(double t) const = 0;
    virtual std::string label() const = 0;

private:
    double t_start_;
    double t_stop_;
};

// Real running-wave probability amplitude phi_in(t): unit L2 norm over a
// finite support, zero outside it, and a smooth start
// (value(t_start) = d1(t_start) = 0).  Construction verifies all three.
class PhotonWaveform {
public:
    explicit PhotonWaveform(std::shared_ptr<const WaveformProfile> profile);

    double t_start() const { return profile_->t_start(); }
    double t_stop() const { return profile_->t_stop(); }
    double duration() const { return t_stop() - t_start(); }
    bool in_support(double t) const { return t >= t_start() && t <= t_stop(); }

    // Zero outside the support; s^(-1/2), s^(-3/2), s^(-5/2) respectively.
    double value(double t) const { return in_support(t) ? profile_->value(t) : 0.0; }
    double d1(double t) const { return in_support(t) ? profile_->d1(t) : 0.0; }
    double d2(double t) const { return in_support(t) ? profile_->d2(t) : 0.0; }

    std::string label() const { return profile_->label(); }
    const std::shared_ptr<const WaveformProfile>& profile() const { return profile_; }

private:
    std::shared_ptr<const WaveformProfile> profile_;
};

// Real signed Rabi frequency Omega(t) sampled on a uniform grid.
struct ControlPulse {
    TimeGrid grid;
    Eigen::ArrayXd omega;  // rad/s, grid.n_points() samples

    double peak_abs() const { return omega.abs().maxCoeff(); }
};

// Result of integrating the coupled atom-cavity equations.  All amplitudes
// are real: on resonance c_e and c_g stay real and c_x = i * c_x_im.
struct StateTrajectory {
    TimeGrid grid;
    Eigen::ArrayXd c_e;      // |e,0> amplitude
    Eigen::ArrayXd c_x_im;   // Im c_x
    Eigen::ArrayXd c_g;      // |g,1> amplitude (= the cavity amplitude)
    Eigen::ArrayXd phi_in;   // input as seen by the integrator, s^(-1/2)
    Eigen::ArrayXd phi_out;  // sqrt(2 kappa) c_g - phi_in

    Eigen::ArrayXd rho_ee() const { return c_e.square(); }
    Eigen::ArrayXd rho_gg() const { return c_g.square(); }
    Eigen::ArrayXd rho_xx() const { return c_x_im.square(); }
};

// Excitation bookkeeping for one simulation.  storage_efficiency is the
// population gained by |e,0> over the run (final rho_ee minus the initial
// excited population), so the conservation identity
//   reflection + spont_loss + storage_efficiency + rho_gg(end) + rho_xx(end)
//     = integral |phi_in|^2 dt
// closes for any initial state; conservation_residual is its defect.
struct AbsorptionReport {
    double reflection;             // integral |phi_out|^2 dt
    double spont_loss;             // integral 2 gamma rho_xx dt
    double storage_efficiency;
    double conservation_residual;
};

}  // namespace cavmatch
