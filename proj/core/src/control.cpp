#include "lugre/control.hpp"

#include <cmath>
#include <stdexcept>

#include "lugre/friction.hpp"

namespace lugre {

void PidConfig::validate() const {
    if (!(Kp >= 0.0)) throw std::invalid_argument("controller.Kp must be >= 0");
    if (!(Ki >= 0.0)) throw std::invalid_argument("controller.Ki must be >= 0");
    if (!(Kd >= 0.0)) throw std::invalid_argument("controller.Kd must be >= 0");
    if (!(tau >= 0.0)) throw std::invalid_argument("controller.tau must be >= 0");
}

void PrefilterConfig::validate() const {
    if (enabled && !(pole > 0.0)) throw std::invalid_argument("prefilter.pole must be > 0");
}

PidStepResult pid_step(const PidConfig& cfg, const ControllerState& cs, double e, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be > 0");
    PidStepResult out;
    out.state = cs;
    // Integrator ramps linearly under held e; the filter sees that ramp and
    // is advanced by its exact solution.
    const double x1_prev = cs.integrator;
    out.state.integrator = x1_prev + e * dt;
    if (cfg.tau > 0.0) {
        const double decay = std::exp(-dt / cfg.tau);
        out.state.filter_state = x1_prev + e * (dt - cfg.tau) +
                                 (cs.filter_state - x1_prev + e * cfg.tau) * decay;
    } else {
        out.state.filter_state = out.state.integrator;
    }
    double de = 0.0;
    if (cs.has_prev_error) de = (e - cs.prev_error) / dt;
    out.state.prev_error = e;
    out.state.has_prev_error = true;
    const double integral_path = cfg.tau > 0.0 ? out.state.filter_state : out.state.integrator;
    out.v = cfg.Kp * e + cfg.Kd * de + cfg.Ki * integral_path;
    return out;
}

PrefilterStepResult prefilter_step(const PrefilterConfig& cfg, double state, double r, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("prefilter_step: dt must be > 0");
    if (!cfg.enabled) return {r, state};
    const double decay = std::exp(-cfg.pole * dt);
    const double next = decay * state + (1.0 - decay) * r;
    return {next, next};
}

double feedforward_term(double ref_accel, const PlantParams& jp) { return jp.J * ref_accel; }

}  // namespace lugre
