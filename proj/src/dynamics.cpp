#include "cavmatch/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace cavmatch {

StateTrajectory simulate(const PhotonWaveform& w, const ControlPulse& pulse,
                         const CavityParams& p, const InitialState& init,
                         const TimeGrid& grid, const SimOptions& opts) {
    if (pulse.grid != grid) {
        std::ostringstream msg;
        msg << "pulse grid [" << pulse.grid.t_start() << ", " << pulse.grid.t_stop()
            << "] s / " << pulse.grid.n_steps() << " steps does not match the "
            << "simulation grid [" << grid.t_start() << ", " << grid.t_stop()
            << "] s / " << grid.n_steps() << " steps";
        throw GridMismatch(msg.str());
    }
    if (init.norm2() > 1.0 + 1e-12) {
        throw InvalidParams("initial state norm exceeds 1");
    }

    const int n = grid.n_steps();
    const double dt = grid.dt();
    const double s2k = std::sqrt(2.0 * p.kappa);
    const double scale = opts.input_scale;

    StateTrajectory traj{grid,
                         Eigen::ArrayXd(n + 1), Eigen::ArrayXd(n + 1),
                         Eigen::ArrayXd(n + 1), Eigen::ArrayXd(n + 1),
                         Eigen::ArrayXd(n + 1)};

    using Vec3 = Eigen::Vector3d;
    const auto rhs = [&](double t, const Vec3& y, double om) -> Vec3 {
        const double phi = scale * w.value(t);
        return Vec3(0.5 * om * y[1],
                    -0.5 * om * y[0] - p.gamma * y[1] - p.g * y[2],
                    p.g * y[1] - p.kappa * y[2] + s2k * phi);
    };

    Vec3 y(init.ce0, init.cx_im0, init.cg0);
    const auto record = [&](int k, const Vec3& state) {
        traj.c_e[k] = state[0];
        traj.c_x_im[k] = state[1];
        traj.c_g[k] = state[2];
        traj.phi_in[k] = scale * w.value(grid.t(k));
        traj.phi_out[k] = s2k * state[2] - traj.phi_in[k];
    };
    record(0, y);

    for (int k = 0; k < n; ++k) {
        const double t = grid.t(k);
        const double om0 = pulse.omega[k];
        const double om1 = pulse.omega[k + 1];
        const double omm = 0.5 * (om0 + om1);

        const Vec3 k1 = rhs(t, y, om0);
        const Vec3 k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1, omm);
        const Vec3 k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2, omm);
        const Vec3 k4 = rhs(t + dt, y + dt * k3, om1);
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        record(k + 1, y);
    }
    return traj;
}

EmptyCavityResponse empty_cavity_response(const PhotonWaveform& w, double kappa,
                                          const TimeGrid& grid) {
    if (!(kappa > 0.0)) throw InvalidParams("kappa must be positive");

    const int n = grid.n_steps();
    const double dt = grid.dt();
    const double s2k = std::sqrt(2.0 * kappa);

    EmptyCavityResponse resp{grid, Eigen::ArrayXd(n + 1), Eigen::ArrayXd(n + 1),
                             Eigen::ArrayXd(n + 1)};

    const auto rhs = [&](double t, double c) {
        return -kappa * c + s2k * w.value(t);
    };

    double c = 0.0;
    const auto record = [&](int k, double state) {
        resp.c_cav[k] = state;
        resp.phi_in[k] = w.value(grid.t(k));
        resp.phi_out[k] = s2k * state - resp.phi_in[k];
    };
    record(0, c);

    for (int k = 0; k < n; ++k) {
        const double t = grid.t(k);
        const double k1 = rhs(t, c);
        const double k2 = rhs(t + 0.5 * dt, c + 0.5 * dt * k1);
        const double k3 = rhs(t + 0.5 * dt, c + 0.5 * dt * k2);
        const double k4 = rhs(t + dt, c + dt * k3);
        c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        record(k + 1, c);
    }
    return resp;
}

double reflection_probability(const StateTrajectory& traj) {
    return trapezoid(traj.phi_out.square(), traj.grid.dt());
}

double reflection_probability(const EmptyCavityResponse& resp) {
    return trapezoid(resp.phi_out.square(), resp.grid.dt());
}

AbsorptionReport excitation_ledger(const StateTrajectory& traj,
                                   const PhotonWaveform& /*w*/,
                                   const CavityParams& p,
                                   const InitialState& init) {
    const double dt = traj.grid.dt();
    const int last = traj.grid.n_steps();

    AbsorptionReport r{};
    r.reflection = trapezoid(traj.phi_out.square(), dt);
    r.spont_loss = 2.0 * p.gamma * trapezoid(traj.c_x_im.square(), dt);
    r.storage_efficiency = traj.c_e[last] * traj.c_e[last] - init.ce0 * init.ce0;

    const double input_norm = trapezoid(traj.phi_in.square(), dt);
    const double end_pop = traj.c_e[last] * traj.c_e[last] +
                           traj.c_g[last] * traj.c_g[last] +
                           traj.c_x_im[last] * traj.c_x_im[last];
    r.conservation_residual = std::abs(end_pop + r.reflection + r.spont_loss -
                                       init.norm2() - input_norm);
    return r;
}

}  // namespace cavmatch
