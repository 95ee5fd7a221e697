#include "lugre/sim.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "lugre/analysis.hpp"

namespace lugre {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDivergenceBound = 1e9;

std::string format_state(double t, std::span<const double> x) {
    std::ostringstream os;
    os << "t=" << t << " state=[";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << "]";
    return os.str();
}

void check_state(double t, std::span<const double> x) {
    for (double xi : x) {
        if (!std::isfinite(xi))
            throw SimDivergenceError(t, {x.begin(), x.end()},
                                     "non-finite state at " + format_state(t, x));
        if (std::abs(xi) > kDivergenceBound)
            throw SimDivergenceError(t, {x.begin(), x.end()},
                                     "state diverged (|x| > 1e9) at " + format_state(t, x));
    }
}

std::size_t step_count(double duration, double dt) {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

// Signal channels derived from the state at one instant.
struct Channels {
    double F = kNaN, F_hat = kNaN, u = kNaN, v = kNaN;
    double e_z = kNaN, e_w = kNaN, e_f = kNaN;
    double ref_raw = kNaN, ref_filtered = kNaN, track_err = kNaN;
    double V = kNaN, V_dot = kNaN;
};

void append_record(Trajectory& traj, double t, double theta, double w, double z, double z_hat,
                   double w_hat, const Channels& c) {
    traj.t.push_back(t);
    traj.theta.push_back(theta);
    traj.w.push_back(w);
    traj.z.push_back(z);
    traj.z_hat.push_back(z_hat);
    traj.w_hat.push_back(w_hat);
    traj.F.push_back(c.F);
    traj.F_hat.push_back(c.F_hat);
    traj.u.push_back(c.u);
    traj.v.push_back(c.v);
    traj.e_z.push_back(c.e_z);
    traj.e_w.push_back(c.e_w);
    traj.e_f.push_back(c.e_f);
    traj.ref_raw.push_back(c.ref_raw);
    traj.ref_filtered.push_back(c.ref_filtered);
    traj.track_err.push_back(c.track_err);
    traj.V.push_back(c.V);
    traj.V_dot.push_back(c.V_dot);
}

void reserve_all(Trajectory& traj, std::size_t n) {
    for (auto* col : {&traj.t, &traj.theta, &traj.w, &traj.z, &traj.z_hat, &traj.w_hat, &traj.F,
                      &traj.F_hat, &traj.u, &traj.v, &traj.e_z, &traj.e_w, &traj.e_f, &traj.ref_raw,
                      &traj.ref_filtered, &traj.track_err, &traj.V, &traj.V_dot})
        col->reserve(n);
}

// Quadratic-form value and its analytic derivative along the error dynamics
//   de_z = -sigma0 phi e_z - K1 e_w
//   de_w = -(sigma0/J) e_z + (sigma0 sigma1 / J) phi e_z - K3 e_w
double error_vdot(const LyapunovSpec& s, double e_z, double e_w, double phi, double K1, double K2,
                  const FrictionParams& p, const PlantParams& jp) {
    const double K3 = (K2 - p.sigma1 * K1) / jp.J;
    const double de_z = -p.sigma0 * phi * e_z - K1 * e_w;
    const double de_w = -(p.sigma0 / jp.J) * e_z + (p.sigma0 * p.sigma1 / jp.J) * phi * e_z -
                        K3 * e_w;
    return 2.0 * s.A * e_z * de_z + s.B * (de_z * e_w + e_z * de_w) + 2.0 * s.C * e_w * de_w;
}

enum class ObserverKind { none, natural, corrected, two_state };

ObserverKind observer_kind(const std::optional<GainSchedule>& g) {
    if (!g) return ObserverKind::none;
    if (std::holds_alternative<NaturalGains>(*g)) return ObserverKind::natural;
    if (std::holds_alternative<CorrectedGains>(*g)) return ObserverKind::corrected;
    return ObserverKind::two_state;
}

// State-vector layout shared by the closed-loop model; -1 marks an absent
// component.
struct Layout {
    int theta = -1, w = -1, z = -1, z_hat = -1, w_hat = -1;
    int integ = -1, filt = -1, pref = -1;
    std::size_t n = 0;

    int add() { return static_cast<int>(n++); }
};

class ClosedLoopModel {
public:
    explicit ClosedLoopModel(const ScenarioConfig& cfg)
        : cfg_(cfg),
          p_(cfg.friction),
          p_obs_(cfg.observer_params()),
          jp_(cfg.plant),
          kind_(observer_kind(cfg.observer)) {
        lay_.theta = lay_.add();
        lay_.w = lay_.add();
        if (cfg.friction_enabled) lay_.z = lay_.add();
        if (kind_ != ObserverKind::none) lay_.z_hat = lay_.add();
        if (kind_ == ObserverKind::two_state) lay_.w_hat = lay_.add();
        lay_.integ = lay_.add();
        if (cfg.controller.tau > 0.0) lay_.filt = lay_.add();
        if (cfg.prefilter.enabled) lay_.pref = lay_.add();
        if (cfg.observer) lyap_ = lyapunov_spec_for(*cfg.observer, p_obs_, jp_);
    }

    std::size_t size() const { return lay_.n; }

    std::vector<double> initial_state() const {
        std::vector<double> x(lay_.n, 0.0);
        const InitialConditions& ic = cfg_.initial;
        x[lay_.theta] = ic.theta;
        x[lay_.w] = ic.w;
        if (lay_.z >= 0) x[lay_.z] = ic.z;
        if (lay_.z_hat >= 0) x[lay_.z_hat] = ic.z_hat;
        if (lay_.w_hat >= 0) x[lay_.w_hat] = ic.w_hat;
        x[lay_.integ] = ic.integrator;
        if (lay_.filt >= 0) x[lay_.filt] = ic.filter_state;
        if (lay_.pref >= 0) x[lay_.pref] = ic.prefilter_state;
        return x;
    }

    void operator()(double t, std::span<const double> x, std::span<double> dx) const {
        eval(t, x, &dx, nullptr);
    }

    Channels probe(double t, std::span<const double> x) const {
        Channels c;
        eval(t, x, nullptr, &c);
        return c;
    }

    const Layout& layout() const { return lay_; }

private:
    void eval(double t, std::span<const double> x, std::span<double>* dx, Channels* ch) const {
        const double theta = x[lay_.theta];
        const double w = x[lay_.w];
        const double z = lay_.z >= 0 ? x[lay_.z] : 0.0;

        // Reference path
        const double r_raw = signal_value(cfg_.reference, t);
        const double r_f = lay_.pref >= 0 ? x[lay_.pref] : r_raw;
        const double meas = cfg_.loop_kind == LoopKind::velocity ? w : theta;
        const double e = r_f - meas;

        // Controller output (integral path state is continuous)
        const double integral_path = lay_.filt >= 0 ? x[lay_.filt] : x[lay_.integ];
        const double v = cfg_.controller.Kp * e + cfg_.controller.Ki * integral_path;

        // Plant friction (z-dynamics independent of u)
        double dz = 0.0, F = 0.0;
        if (cfg_.friction_enabled) {
            dz = w - p_.sigma0 * std::abs(w) * z / stribeck_h(w, p_);
            F = friction_estimate(z, dz, w, p_);
        }

        // Observer z-path and friction estimate (independent of u)
        double dz_hat = 0.0, F_hat = kNaN, e_w = kNaN;
        double K1 = 0.0, K2 = 0.0;
        const double z_hat = lay_.z_hat >= 0 ? x[lay_.z_hat] : 0.0;
        switch (kind_) {
            case ObserverKind::none:
                break;
            case ObserverKind::natural:
                dz_hat = natural_observer_derivative(z_hat, w, p_obs_);
                F_hat = friction_estimate(z_hat, dz_hat, w, p_obs_);
                break;
            case ObserverKind::corrected: {
                const double k = std::get<CorrectedGains>(*cfg_.observer).k;
                dz_hat = corrected_observer_derivative(z_hat, w, meas - r_f, k, p_obs_);
                F_hat = friction_estimate(z_hat, dz_hat, w, p_obs_);
                break;
            }
            case ObserverKind::two_state: {
                const GainPair g = resolve_two_state_gains(*cfg_.observer, w, p_obs_, jp_);
                K1 = g.K1;
                K2 = g.K2;
                e_w = w - x[lay_.w_hat];
                dz_hat = natural_observer_derivative(z_hat, w, p_obs_) + K1 * e_w;
                F_hat = friction_estimate(z_hat, dz_hat, w, p_obs_);
                break;
            }
        }

        // Input composition
        double comp = 0.0;
        if (cfg_.compensation == Compensation::observer) comp = F_hat;
        else if (cfg_.compensation == Compensation::true_friction) comp = F;
        double ff = 0.0;
        if (cfg_.feedforward) {
            const double ref_accel = cfg_.loop_kind == LoopKind::velocity
                                         ? signal_derivative(cfg_.reference, t)
                                         : signal_second_derivative(cfg_.reference, t);
            ff = feedforward_term(ref_accel, jp_);
        }
        const double u = v + comp + ff;

        if (dx) {
            std::span<double>& d = *dx;
            d[lay_.theta] = w;
            d[lay_.w] = (-F + u) / jp_.J;
            if (lay_.z >= 0) d[lay_.z] = dz;
            if (lay_.z_hat >= 0) d[lay_.z_hat] = dz_hat;
            if (lay_.w_hat >= 0) d[lay_.w_hat] = (-F_hat + u + K2 * e_w) / jp_.J;
            d[lay_.integ] = e;
            if (lay_.filt >= 0)
                d[lay_.filt] = (x[lay_.integ] - x[lay_.filt]) / cfg_.controller.tau;
            if (lay_.pref >= 0) d[lay_.pref] = cfg_.prefilter.pole * (r_raw - x[lay_.pref]);
        }

        if (ch) {
            ch->F = cfg_.friction_enabled ? F : 0.0;
            ch->F_hat = F_hat;
            ch->u = u;
            ch->v = v;
            ch->ref_raw = r_raw;
            ch->ref_filtered = lay_.pref >= 0 ? r_f : kNaN;
            ch->track_err = e;
            if (lay_.z_hat >= 0 && lay_.z >= 0) {
                ch->e_z = z - z_hat;
                ch->e_f = F - F_hat;
            }
            if (lay_.w_hat >= 0) ch->e_w = e_w;
            if (lyap_ && lay_.w_hat >= 0 && lay_.z >= 0) {
                const double ez = z - z_hat;
                ch->V = lyap_->A * ez * ez + lyap_->B * ez * e_w + lyap_->C * e_w * e_w;
                const double phi = std::abs(w) / stribeck_h(w, p_obs_);
                ch->V_dot = error_vdot(*lyap_, ez, e_w, phi, K1, K2, p_obs_, jp_);
            }
        }
    }

    const ScenarioConfig& cfg_;
    FrictionParams p_;
    FrictionParams p_obs_;
    PlantParams jp_;
    ObserverKind kind_;
    Layout lay_;
    std::optional<LyapunovSpec> lyap_;
};

// Open-loop model: prescribed velocity, bristle state, observer states.
class OpenLoopModel {
public:
    explicit OpenLoopModel(const OpenLoopOptions& opt)
        : opt_(opt),
          p_(opt.friction),
          p_obs_(opt.observer_friction ? *opt.observer_friction : opt.friction),
          jp_(opt.plant),
          two_state_(is_two_state(opt.observer)) {
        lay_.theta = lay_.add();
        lay_.z = lay_.add();
        lay_.z_hat = lay_.add();
        if (two_state_) lay_.w_hat = lay_.add();
        lyap_ = lyapunov_spec_for(opt.observer, p_obs_, jp_);
    }

    std::size_t size() const { return lay_.n; }

    std::vector<double> initial_state() const {
        std::vector<double> x(lay_.n, 0.0);
        x[lay_.theta] = opt_.initial.theta;
        x[lay_.z] = opt_.initial.z;
        x[lay_.z_hat] = opt_.initial.z_hat;
        if (lay_.w_hat >= 0) x[lay_.w_hat] = opt_.initial.w_hat;
        return x;
    }

    void operator()(double t, std::span<const double> x, std::span<double> dx) const {
        eval(t, x, &dx, nullptr);
    }

    Channels probe(double t, std::span<const double> x) const {
        Channels c;
        eval(t, x, nullptr, &c);
        return c;
    }

    double prescribed_w(double t) const { return signal_value(opt_.w_signal, t); }

private:
    void eval(double t, std::span<const double> x, std::span<double>* dx, Channels* ch) const {
        const double w = prescribed_w(t);
        const double z = x[lay_.z];
        const double z_hat = x[lay_.z_hat];

        const double dz = w - p_.sigma0 * std::abs(w) * z / stribeck_h(w, p_);
        const double F = friction_estimate(z, dz, w, p_);

        // Input torque balancing the prescribed trajectory unless prescribed.
        const double u = opt_.input_torque
                             ? signal_value(*opt_.input_torque, t)
                             : jp_.J * signal_derivative(opt_.w_signal, t) + F;

        double dz_hat = 0.0, F_hat = 0.0, e_w = kNaN;
        double K1 = 0.0, K2 = 0.0;
        if (two_state_) {
            const GainPair g = resolve_two_state_gains(opt_.observer, w, p_obs_, jp_);
            K1 = g.K1;
            K2 = g.K2;
            e_w = w - x[lay_.w_hat];
            dz_hat = natural_observer_derivative(z_hat, w, p_obs_) + K1 * e_w;
        } else if (std::holds_alternative<CorrectedGains>(opt_.observer)) {
            // No reference exists here; the correction term is driven by a
            // zero tracking error and the observer reduces to the natural one.
            dz_hat = natural_observer_derivative(z_hat, w, p_obs_);
        } else {
            dz_hat = natural_observer_derivative(z_hat, w, p_obs_);
        }
        F_hat = friction_estimate(z_hat, dz_hat, w, p_obs_);

        if (dx) {
            std::span<double>& d = *dx;
            d[lay_.theta] = w;
            d[lay_.z] = dz;
            d[lay_.z_hat] = dz_hat;
            if (lay_.w_hat >= 0) d[lay_.w_hat] = (-F_hat + u + K2 * e_w) / jp_.J;
        }
        if (ch) {
            ch->F = F;
            ch->F_hat = F_hat;
            ch->u = u;
            ch->e_z = z - z_hat;
            ch->e_f = F - F_hat;
            ch->ref_raw = w;
            if (two_state_) {
                ch->e_w = e_w;
                if (lyap_) {
                    const double ez = z - z_hat;
                    ch->V = lyap_->A * ez * ez + lyap_->B * ez * e_w + lyap_->C * e_w * e_w;
                    const double phi = std::abs(w) / stribeck_h(w, p_obs_);
                    ch->V_dot = error_vdot(*lyap_, ez, e_w, phi, K1, K2, p_obs_, jp_);
                }
            }
        }
    }

    const OpenLoopOptions& opt_;
    FrictionParams p_;
    FrictionParams p_obs_;
    PlantParams jp_;
    bool two_state_;
    Layout lay_;
    std::optional<LyapunovSpec> lyap_;
};

template <class Model>
Trajectory integrate_model(const Model& model, double duration, double dt) {
    const std::size_t n_steps = step_count(duration, dt);
    Trajectory traj;
    reserve_all(traj, n_steps + 1);
    std::vector<double> x = model.initial_state();
    Rk4Workspace ws;
    ws.resize(x.size());
    double t = 0.0;
    for (std::size_t k = 0;; ++k) {
        model.record(traj, t, x);
        if (k == n_steps) break;
        rk4_step(model, t, std::span<double>(x), dt, ws);
        t = static_cast<double>(k + 1) * dt;
        check_state(t, x);
    }
    return traj;
}

}  // namespace

SimDivergenceError::SimDivergenceError(double time, std::vector<double> state,
                                       const std::string& what_arg)
    : std::runtime_error(what_arg), time_(time), state_(std::move(state)) {}

void Rk4Workspace::resize(std::size_t n) {
    if (k1.size() == n) return;
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    tmp.resize(n);
}

void integrate_step_rk4(const DerivativeMap& f, double t, std::span<double> state, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_step_rk4: dt must be > 0");
    Rk4Workspace ws;
    rk4_step(f, t, state, dt, ws);
    check_state(t + dt, state);
}

void ScenarioConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(duration >= dt)) throw std::invalid_argument("duration must be >= dt");
    if (friction_enabled && dt > 1e-4)
        throw std::invalid_argument("dt must be <= 1e-4 when friction_enabled (stiffness guard)");
    plant.validate();
    friction.validate();
    if (observer_friction) observer_friction->validate();
    controller.validate();
    prefilter.validate();
    lugre::validate(reference);
    if (observer) lugre::validate(*observer, observer_params());
    if (loop_kind == LoopKind::open_loop_observer) {
        if (!observer)
            throw std::invalid_argument("observer is required for loop_kind=open_loop_observer");
        if (!friction_enabled)
            throw std::invalid_argument(
                "friction_enabled must be true for loop_kind=open_loop_observer");
        if (compensation != Compensation::off)
            throw std::invalid_argument(
                "compensation must be \"off\" for loop_kind=open_loop_observer");
    } else {
        if (compensation == Compensation::observer && !observer)
            throw std::invalid_argument("compensation=\"observer\" requires an observer");
        if (controller.Kd != 0.0)
            throw std::invalid_argument(
                "controller.Kd must be 0 in closed-loop runs (derivative action is only "
                "available in the discrete pid_step)");
    }
}

Trajectory run_closed_loop(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.loop_kind == LoopKind::open_loop_observer)
        throw std::invalid_argument("run_closed_loop: loop_kind must be velocity or position");

    struct RecordingModel : ClosedLoopModel {
        using ClosedLoopModel::ClosedLoopModel;
        void record(Trajectory& traj, double t, const std::vector<double>& x) const {
            const Layout& l = layout();
            const Channels c = probe(t, x);
            append_record(traj, t, x[l.theta], x[l.w], l.z >= 0 ? x[l.z] : kNaN,
                          l.z_hat >= 0 ? x[l.z_hat] : kNaN, l.w_hat >= 0 ? x[l.w_hat] : kNaN, c);
        }
    };

    const RecordingModel model(cfg);
    return integrate_model(model, cfg.duration, cfg.dt);
}

Trajectory run_open_loop_observer(const OpenLoopOptions& opt) {
    if (!(opt.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(opt.duration >= opt.dt)) throw std::invalid_argument("duration must be >= dt");
    opt.plant.validate();
    opt.friction.validate();
    if (opt.observer_friction) opt.observer_friction->validate();
    lugre::validate(opt.w_signal);
    lugre::validate(opt.observer, opt.observer_friction ? *opt.observer_friction : opt.friction);

    struct RecordingModel : OpenLoopModel {
        using OpenLoopModel::OpenLoopModel;
        void record(Trajectory& traj, double t, const std::vector<double>& x) const {
            const Channels c = probe(t, x);
            // Layout here is fixed: theta, z, z_hat, [w_hat].
            const double w_hat = x.size() > 3 ? x[3] : kNaN;
            append_record(traj, t, x[0], prescribed_w(t), x[1], x[2], w_hat, c);
        }
    };

    const RecordingModel model(opt);
    return integrate_model(model, opt.duration, opt.dt);
}

Trajectory run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.loop_kind != LoopKind::open_loop_observer) return run_closed_loop(cfg);
    OpenLoopOptions opt;
    opt.w_signal = cfg.reference;
    opt.observer = *cfg.observer;
    opt.friction = cfg.friction;
    opt.observer_friction = cfg.observer_friction;
    opt.plant = cfg.plant;
    opt.duration = cfg.duration;
    opt.dt = cfg.dt;
    opt.initial = cfg.initial;
    return run_open_loop_observer(opt);
}

}  // namespace lugre
