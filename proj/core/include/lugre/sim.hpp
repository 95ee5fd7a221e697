#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lugre/control.hpp"
#include "lugre/friction.hpp"
#include "lugre/observers.hpp"
#include "lugre/signals.hpp"

namespace lugre {

enum class LoopKind { velocity, position, open_loop_observer };

enum class Compensation {
    off,
    observer,       ///< u = v + F_hat from the configured observer
    true_friction,  ///< u = v + plant friction (oracle cancellation)
};

struct InitialConditions {
    double theta = 0.0;
    double w = 0.0;
    double z = 0.0;
    double z_hat = 0.0;
    double w_hat = 0.0;
    double integrator = 0.0;
    double filter_state = 0.0;
    double prefilter_state = 0.0;
};

struct ScenarioConfig {
    std::string name;
    LoopKind loop_kind = LoopKind::velocity;
    ReferenceSignal reference = ConstantSignal{0.0};
    PlantParams plant{};
    FrictionParams friction{};
    std::optional<GainSchedule> observer;
    /// Observer-side friction coefficients; defaults to the plant's when unset,
    /// which is the setting every stability result assumes.
    std::optional<FrictionParams> observer_friction;
    PidConfig controller{};
    PrefilterConfig prefilter{};
    bool feedforward = false;
    Compensation compensation = Compensation::off;
    bool friction_enabled = true;
    double dt = 1e-5;
    double duration = 1.0;
    InitialConditions initial{};

    const FrictionParams& observer_params() const {
        return observer_friction ? *observer_friction : friction;
    }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Uniformly sampled record of every loop signal. Channels that the active
/// variant does not define hold quiet NaN and render as empty CSV cells.
struct Trajectory {
    std::vector<double> t;
    std::vector<double> theta, w, z, z_hat, w_hat;
    std::vector<double> F, F_hat, u, v;
    std::vector<double> e_z, e_w, e_f;
    std::vector<double> ref_raw, ref_filtered, track_err;
    std::vector<double> V, V_dot;

    std::size_t size() const { return t.size(); }
};

/// Raised when a state leaves the admissible range (non-finite or |x| > 1e9).
class SimDivergenceError : public std::runtime_error {
public:
    SimDivergenceError(double time, std::vector<double> state, const std::string& what_arg);

    double time() const { return time_; }
    const std::vector<double>& state() const { return state_; }

private:
    double time_;
    std::vector<double> state_;
};

/// One classical 4th-order Runge-Kutta step of dx/dt = f(t, x), advancing x
/// in place. The workspace avoids per-step allocation.
struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, tmp;
    void resize(std::size_t n);
};

template <class F>
void rk4_step(F&& f, double t, std::span<double> x, double dt, Rk4Workspace& ws) {
    const std::size_t n = x.size();
    ws.resize(n);
    f(t, std::span<const double>(x), std::span<double>(ws.k1));
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = x[i] + 0.5 * dt * ws.k1[i];
    f(t + 0.5 * dt, std::span<const double>(ws.tmp), std::span<double>(ws.k2));
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = x[i] + 0.5 * dt * ws.k2[i];
    f(t + 0.5 * dt, std::span<const double>(ws.tmp), std::span<double>(ws.k3));
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = x[i] + dt * ws.k3[i];
    f(t + dt, std::span<const double>(ws.tmp), std::span<double>(ws.k4));
    for (std::size_t i = 0; i < n; ++i)
        x[i] += dt / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
}

using DerivativeMap = std::function<void(double, std::span<const double>, std::span<double>)>;

/// Type-erased single step; throws SimDivergenceError if the updated state is
/// not finite.
void integrate_step_rk4(const DerivativeMap& f, double t, std::span<double> state, double dt);

/// Closed-loop run per the configured topology: reference (optionally
/// pre-filtered) -> PID error on w or theta -> v; u = v + compensation +
/// feed-forward; plant, observer, and controller states advance together in
/// one RK4 state vector.
Trajectory run_closed_loop(const ScenarioConfig& cfg);

struct OpenLoopOptions {
    ReferenceSignal w_signal;  ///< prescribed plant velocity
    /// Prescribed input torque; when unset, u is the torque balancing the
    /// prescribed trajectory, u = J dw_signal + F, so the observer error
    /// dynamics match the closed-form analysis exactly.
    std::optional<ReferenceSignal> input_torque;
    GainSchedule observer = NaturalGains{};
    FrictionParams friction{};
    std::optional<FrictionParams> observer_friction;
    PlantParams plant{};
    double duration = 1.0;
    double dt = 1e-5;
    InitialConditions initial{};
};

/// Bristle dynamics under a prescribed velocity together with the chosen
/// observer driven by the same velocity; returns all error channels.
Trajectory run_open_loop_observer(const OpenLoopOptions& opt);

/// Dispatches on loop_kind; open_loop_observer interprets `reference` as the
/// prescribed velocity.
Trajectory run_scenario(const ScenarioConfig& cfg);

}  // namespace lugre
