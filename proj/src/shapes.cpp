#include "cavmatch/shapes.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cavmatch {

const char* shape_name(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::sin2: return "sin2";
        case ShapeKind::twin_peak: return "twin_peak";
        case ShapeKind::tabulated: return "tabulated";
    }
    return "?";
}

ShapeKind shape_from_name(const std::string& name) {
    if (name == "sin2") return ShapeKind::sin2;
    if (name == "twin_peak") return ShapeKind::twin_peak;
    if (name == "tabulated") return ShapeKind::tabulated;
    throw InvalidParams("unknown shape '" + name +
                        "' (expected sin2, twin_peak or tabulated)");
}

namespace {

class Sin2Profile : public WaveformProfile {
public:
    explicit Sin2Profile(double tau)
        : WaveformProfile(0.0, tau),
          tau_(tau),
          a_(std::sqrt(8.0 / (3.0 * tau))),
          w_(M_PI / tau) {}

    double value(double t) const override {
        const double s = std::sin(w_ * t);
        return a_ * s * s;
    }
    double d1(double t) const override { return a_ * w_ * std::sin(2.0 * w_ * t); }
    double d2(double t) const override {
        return 2.0 * a_ * w_ * w_ * std::cos(2.0 * w_ * t);
    }
    std::string label() const override {
        std::ostringstream s;
        s << "sin2(tau_us=" << s_to_us(tau_) << ")";
        return s.str();
    }

private:
    double tau_;
    double a_;  // sqrt(8/(3 tau))
    double w_;  // pi/tau
};

// f(t) = B sin^2(a t) cos(b (tau - t)) with a = 2 pi/tau, b = pi/(2 tau).
// The cos factor equals cos((pi/2)(1 - t/tau)); it vanishes at t = 0, which
// kills the curvature there (d2(0) = 0 exactly).
class TwinPeakProfile : public WaveformProfile {
public:
    explicit TwinPeakProfile(double tau)
        : WaveformProfile(0.0, tau),
          tau_(tau),
          b_(4.0 / std::sqrt(3.0 * tau)),
          a_(2.0 * M_PI / tau),
          c_(M_PI / (2.0 * tau)) {}

    double value(double t) const override {
        const double s = std::sin(a_ * t);
        return b_ * s * s * env(t);
    }
    double d1(double t) const override {
        const double s = std::sin(a_ * t);
        const double u = s * s;
        const double u1 = a_ * std::sin(2.0 * a_ * t);
        return b_ * (u1 * env(t) + u * env1(t));
    }
    double d2(double t) const override {
        const double s = std::sin(a_ * t);
        const double u = s * s;
        const double u1 = a_ * std::sin(2.0 * a_ * t);
        const double u2 = 2.0 * a_ * a_ * std::cos(2.0 * a_ * t);
        return b_ * (u2 * env(t) + 2.0 * u1 * env1(t) - c_ * c_ * u * env(t));
    }
    std::string label() const override {
        std::ostringstream s;
        s << "twin_peak(tau_us=" << s_to_us(tau_) << ")";
        return s.str();
    }

private:
    double env(double t) const { return std::cos(c_ * (tau_ - t)); }
    double env1(double t) const { return c_ * std::sin(c_ * (tau_ - t)); }

    double tau_;
    double b_;  // 4/sqrt(3 tau)
    double a_;  // 2 pi/tau
    double c_;  // pi/(2 tau)
};

class ShiftedProfile : public WaveformProfile {
public:
    ShiftedProfile(std::shared_ptr<const WaveformProfile> base, double offset)
        : WaveformProfile(base->t_start() + offset, base->t_stop() + offset),
          base_(std::move(base)),
          offset_(offset) {}

    double value(double t) const override { return base_->value(t - offset_); }
    double d1(double t) const override { return base_->d1(t - offset_); }
    double d2(double t) const override { return base_->d2(t - offset_); }
    std::string label() const override {
        std::ostringstream s;
        s << base_->label() << "+shift_us=" << s_to_us(offset_);
        return s.str();
    }

    const std::shared_ptr<const WaveformProfile>& base() const { return base_; }

private:
    std::shared_ptr<const WaveformProfile> base_;
    double offset_;
};

// Cubic spline in moments form: on [x_i, x_{i+1}] the curve is determined by
// the node values y and second derivatives (moments) M.
class SplineProfile : public WaveformProfile {
public:
    SplineProfile(Eigen::ArrayXd x, Eigen::ArrayXd y, Eigen::ArrayXd m)
        : WaveformProfile(x[0], x[x.size() - 1]),
          x_(std::move(x)),
          y_(std::move(y)),
          m_(std::move(m)) {}

    double value(double t) const override {
        const int i = interval(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }
    double d1(double t) const override {
        const int i = interval(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
    }
    double d2(double t) const override {
        const int i = interval(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return a * m_[i] + b * m_[i + 1];
    }
    std::string label() const override {
        std::ostringstream s;
        s << "tabulated(n=" << x_.size() << ")";
        return s.str();
    }

    const Eigen::ArrayXd& x() const { return x_; }
    const Eigen::ArrayXd& y() const { return y_; }
    const Eigen::ArrayXd& m() const { return m_; }

private:
    int interval(double t) const {
        const double* begin = x_.data();
        const double* end = begin + x_.size();
        int i = int(std::upper_bound(begin, end, t) - begin) - 1;
        return std::clamp(i, 0, int(x_.size()) - 2);
    }

    Eigen::ArrayXd x_, y_, m_;
};

// Solve for the spline moments with a zero-slope clamp at the left end and
// a not-a-knot condition (continuous third derivative) at the right.  The
// left clamp enforces the smooth-start requirement exactly; not-a-knot
// avoids parking a spurious zero curvature on the final node.
Eigen::ArrayXd spline_moments(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    const int n = int(x.size()) - 1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * (n + 1));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);

    const auto h = [&](int i) { return x[i + 1] - x[i]; };

    trip.emplace_back(0, 0, h(0) / 3.0);
    trip.emplace_back(0, 1, h(0) / 6.0);
    rhs[0] = (y[1] - y[0]) / h(0);  // minus the clamped slope, which is 0

    for (int i = 1; i < n; ++i) {
        trip.emplace_back(i, i - 1, h(i - 1) / 6.0);
        trip.emplace_back(i, i, (h(i - 1) + h(i)) / 3.0);
        trip.emplace_back(i, i + 1, h(i) / 6.0);
        rhs[i] = (y[i + 1] - y[i]) / h(i) - (y[i] - y[i - 1]) / h(i - 1);
    }

    trip.emplace_back(n, n - 2, h(n - 1));
    trip.emplace_back(n, n - 1, -(h(n - 2) + h(n - 1)));
    trip.emplace_back(n, n, h(n - 2));

    Eigen::SparseMatrix<double> a(n + 1, n + 1);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        throw InvalidParams("tabulated waveform: spline system is singular");
    }
    return lu.solve(rhs).array();
}

// Exact L2 norm of the spline via 4-point Gauss-Legendre per interval
// (degree-6 polynomial integrand, rule is exact to degree 7).
double spline_norm2(const SplineProfile& sp) {
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    const Eigen::ArrayXd& x = sp.x();
    double acc = 0.0;
    for (int i = 0; i + 1 < x.size(); ++i) {
        const double mid = 0.5 * (x[i] + x[i + 1]);
        const double half = 0.5 * (x[i + 1] - x[i]);
        for (int q = 0; q < 4; ++q) {
            const double v = sp.value(mid + half * gx[q]);
            acc += half * gw[q] * v * v;
        }
    }
    return acc;
}

}  // namespace

PhotonWaveform make_sin2(double tau_photon) {
    if (!(tau_photon > 0.0)) throw InvalidParams("tau_photon must be positive");
    return PhotonWaveform(std::make_shared<Sin2Profile>(tau_photon));
}

PhotonWaveform make_twin_peak(double tau_photon) {
    if (!(tau_photon > 0.0)) throw InvalidParams("tau_photon must be positive");
    return PhotonWaveform(std::make_shared<TwinPeakProfile>(tau_photon));
}

PhotonWaveform from_samples(const ShapeSpec& spec) {
    const auto& samples = spec.samples;
    if (samples.size() < 8) {
        throw InvalidParams("tabulated waveform needs at least 8 samples, got " +
                            std::to_string(samples.size()));
    }
    for (size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].first > samples[i - 1].first)) {
            std::ostringstream msg;
            msg << "tabulated sample times must be strictly increasing "
                << "(violated at index " << i << ", t=" << samples[i].first << " s)";
            throw InvalidParams(msg.str());
        }
    }
    if (samples.front().second != 0.0) {
        throw InvalidParams("tabulated waveform must start at zero amplitude");
    }

    const int n = int(samples.size());
    Eigen::ArrayXd x(n), y(n);
    const double t0 = samples.front().first;
    for (int i = 0; i < n; ++i) {
        x[i] = samples[i].first - t0;  // support convention: starts at 0
        y[i] = samples[i].second;
    }

    Eigen::ArrayXd m = spline_moments(x, y);
    auto sp = std::make_shared<SplineProfile>(x, y, m);
    const double norm2 = spline_norm2(*sp);
    if (!(norm2 > 0.0)) {
        throw InvalidParams("tabulated waveform has zero norm; cannot normalize");
    }
    const double scale = 1.0 / std::sqrt(norm2);
    // Scaling node values and moments scales value/d1/d2 coherently.
    sp = std::make_shared<SplineProfile>(x, y * scale, m * scale);
    return PhotonWaveform(sp);
}

PhotonWaveform make_waveform(const ShapeSpec& spec) {
    switch (spec.kind) {
        case ShapeKind::sin2: return make_sin2(spec.tau_photon);
        case ShapeKind::twin_peak: return make_twin_peak(spec.tau_photon);
        case ShapeKind::tabulated: return from_samples(spec);
    }
    throw InvalidParams("unknown shape kind");
}

PhotonWaveform shift_support(const PhotonWaveform& w, double offset) {
    return PhotonWaveform(std::make_shared<ShiftedProfile>(w.profile(), offset));
}

PhotonWaveform localize_support(const PhotonWaveform& w) {
    std::shared_ptr<const WaveformProfile> cur = w.profile();
    // Peel translation views instead of stacking another shift on top:
    // evaluating the base directly avoids the rounding noise of a
    // subtract-then-evaluate chain, so waveforms that are shifted copies of
    // the same base localize to bitwise-identical functions.
    while (auto shifted = std::dynamic_pointer_cast<const ShiftedProfile>(cur)) {
        cur = shifted->base();
    }
    if (cur->t_start() == 0.0) return PhotonWaveform(cur);
    return PhotonWaveform(
        std::make_shared<ShiftedProfile>(cur, -cur->t_start()));
}

std::vector<std::pair<double, double>> load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open photon samples file '" + path + "'");

    std::vector<std::pair<double, double>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double t_us, amp;
        if (!(ls >> t_us)) continue;  // blank / comment-only line
        if (!(ls >> amp)) {
            std::ostringstream msg;
            msg << "photon samples file '" << path << "' line " << lineno
                << ": expected two columns (time_us amplitude)";
            throw ParseError(msg.str());
        }
        std::string extra;
        if (ls >> extra) {
            std::ostringstream msg;
            msg << "photon samples file '" << path << "' line " << lineno
                << ": trailing data '" << extra << "'";
            throw ParseError(msg.str());
        }
        out.emplace_back(us_to_s(t_us), amp);
    }
    return out;
}

}  // namespace cavmatch
