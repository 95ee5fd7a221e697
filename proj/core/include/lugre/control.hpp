#pragma once

namespace lugre {

struct PlantParams;

/// PID with an optionally filtered integral path. The controller acts on
/// e = reference - measurement. The integral path is Ki/s for tau = 0 and
/// Ki/(s (tau s + 1)) for tau > 0, so the filtered mode converges to the pure
/// integrator as tau -> 0.
struct PidConfig {
    double Kp = 0.0;
    double Ki = 0.0;
    double Kd = 0.0;
    double tau = 0.0;  ///< integral-filter time constant, s (0 = pure integrator)

    void validate() const;
};

/// First-order reference shaping a/(s+a) with unity DC gain.
struct PrefilterConfig {
    double pole = 0.0;  ///< cutoff a, rad/s
    bool enabled = false;

    void validate() const;
};

/// Discrete controller memory. Value type; step functions return the updated
/// copy rather than mutating shared state.
struct ControllerState {
    double integrator = 0.0;    ///< accumulated integral of e
    double filter_state = 0.0;  ///< filtered-integral internal state
    double prefilter_state = 0.0;
    double prev_error = 0.0;
    bool has_prev_error = false;
};

struct PidStepResult {
    double v = 0.0;  ///< control output
    ControllerState state;
};

/// Advances the controller one fixed step with e held over the step (exact
/// discretization of the integral and filter paths) and returns the output
///   v = Kp e + Kd de + Ki * (integral path).
/// The derivative term is a backward difference on e; it is zero on the
/// first step.
PidStepResult pid_step(const PidConfig& cfg, const ControllerState& cs, double e, double dt);

struct PrefilterStepResult {
    double filtered = 0.0;
    double state = 0.0;
};

/// Exact zero-order-hold step of a/(s+a); identity passthrough when disabled.
PrefilterStepResult prefilter_step(const PrefilterConfig& cfg, double state, double r, double dt);

/// Feed-forward torque J * ref_accel.
double feedforward_term(double ref_accel, const PlantParams& jp);

}  // namespace lugre
