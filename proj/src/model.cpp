#include "cavmatch/model.hpp"

#include <cmath>
#include <sstream>

namespace cavmatch {

CavityParams::CavityParams(double g_, double kappa_, double gamma_, double rho0_)
    : g(g_), kappa(kappa_), gamma(gamma_), rho0(rho0_) {
    if (!(g > 0.0) || !(kappa > 0.0) || !(gamma > 0.0)) {
        std::ostringstream msg;
        msg << "cavity rates must be positive: g=" << g << " kappa=" << kappa
            << " gamma=" << gamma << " rad/s";
        throw InvalidParams(msg.str());
    }
    if (!(rho0 >= 0.0) || !(rho0 < 1.0)) {
        std::ostringstream msg;
        msg << "rho0 must lie in [0, 1), got " << rho0;
        throw InvalidParams(msg.str());
    }
}

double cooperativity(const CavityParams& p) { return p.cooperativity(); }

TimeGrid::TimeGrid(double t_start, double t_stop, int n_steps)
    : t_start_(t_start), t_stop_(t_stop), n_steps_(n_steps) {
    if (!(t_stop > t_start)) {
        throw InvalidParams("time grid needs t_stop > t_start");
    }
    if (n_steps < 2) {
        throw InvalidParams("time grid needs at least 2 steps");
    }
    dt_ = (t_stop_ - t_start_) / n_steps_;
}

Eigen::ArrayXd TimeGrid::times() const {
    Eigen::ArrayXd out(n_points());
    for (int k = 0; k < n_points(); ++k) out[k] = t(k);
    return out;
}

double trapezoid(const Eigen::ArrayXd& y, double dt) {
    const Eigen::Index n = y.size();
    if (n < 2) return 0.0;
    return dt * (y.sum() - 0.5 * (y[0] + y[n - 1]));
}

Eigen::ArrayXd cumulative_trapezoid(const Eigen::ArrayXd& y, double dt) {
    Eigen::ArrayXd out(y.size());
    if (y.size() == 0) return out;
    out[0] = 0.0;
    for (Eigen::Index k = 1; k < y.size(); ++k) {
        out[k] = out[k - 1] + 0.5 * dt * (y[k - 1] + y[k]);
    }
    return out;
}

WaveformProfile::WaveformProfile(double t_start, double t_stop)
    : t_start_(t_start), t_stop_(t_stop) {
    if (!(t_stop > t_start)) {
        throw InvalidParams("waveform support needs t_stop > t_start");
    }
}

namespace {

// Composite Simpson over the support; also records the sup of |value| and
// |d1| at the scan nodes for the scale-aware start checks.
struct NormScan {
    double norm2 = 0.0;
    double vmax = 0.0;
    double d1max = 0.0;
};

NormScan scan_profile(const WaveformProfile& p) {
    constexpr int kIntervals = 1 << 12;  // even, error ~ h^4
    const double a = p.t_start();
    const double b = p.t_stop();
    const double h = (b - a) / kIntervals;
    NormScan s;
    double acc = 0.0;
    for (int k = 0; k <= kIntervals; ++k) {
        const double t = (k == kIntervals) ? b : a + k * h;
        const double v = p.value(t);
        s.vmax = std::max(s.vmax, std::abs(v));
        s.d1max = std::max(s.d1max, std::abs(p.d1(t)));
        const double w = (k == 0 || k == kIntervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * v * v;
    }
    s.norm2 = acc * h / 3.0;
    return s;
}

}  // namespace

PhotonWaveform::PhotonWaveform(std::shared_ptr<const WaveformProfile> profile)
    : profile_(std::move(profile)) {
    if (!profile_) throw InvalidParams("null waveform profile");
    const NormScan s = scan_profile(*profile_);
    if (std::abs(s.norm2 - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "waveform '" << profile_->label()
            << "' is not normalized: integral |phi|^2 dt = " << s.norm2;
        throw InvalidParams(msg.str());
    }
    // Smooth start: the synthesis chain assumes value and d1 vanish at
    // t_start (otherwise c_g or c_x would have to jump).
    if (std::abs(profile_->value(profile_->t_start())) > 1e-6 * s.vmax) {
        throw InvalidParams("waveform '" + profile_->label() +
                            "' has nonzero value at t_start");
    }
    if (std::abs(profile_->d1(profile_->t_start())) > 1e-6 * s.d1max) {
        throw InvalidParams("waveform '" + profile_->label() +
                            "' has nonzero slope at t_start");
    }
}

}  // namespace cavmatch
