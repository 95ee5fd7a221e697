#include "lugre/observers.hpp"

#include <stdexcept>

namespace lugre {

bool is_two_state(const GainSchedule& g) {
    return !std::holds_alternative<NaturalGains>(g) && !std::holds_alternative<CorrectedGains>(g);
}

void validate(const GainSchedule& g, const FrictionParams& p) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, CorrectedGains>) {
                if (!(v.k > 0.0)) throw std::invalid_argument("observer.k must be > 0");
            } else if constexpr (std::is_same_v<T, TimeVaryingGains>) {
                if (!(v.A > 0.0)) throw std::invalid_argument("observer.A must be > 0");
                if (!(v.C > 0.0)) throw std::invalid_argument("observer.C must be > 0");
                if (!(v.alpha > 0.0)) throw std::invalid_argument("observer.alpha must be > 0");
            } else if constexpr (std::is_same_v<T, BoundedGains>) {
                if (!(v.A > 0.0)) throw std::invalid_argument("observer.A must be > 0");
                if (!(v.C > 0.0)) throw std::invalid_argument("observer.C must be > 0");
                if (!(v.alpha > 0.0)) throw std::invalid_argument("observer.alpha must be > 0");
                if (!(v.M > 0.0)) throw std::invalid_argument("observer.M must be > 0");
                if (!(p.c1() > 0.0))
                    throw std::invalid_argument(
                        "observer: bounded gain rule requires min{Fs, Fc} > 0");
            } else if constexpr (std::is_same_v<T, ExponentialGains>) {
                if (!(v.C > 0.0)) throw std::invalid_argument("observer.C must be > 0");
                if (!(v.alpha > 0.0)) throw std::invalid_argument("observer.alpha must be > 0");
                if (!(v.beta > 0.0)) throw std::invalid_argument("observer.beta must be > 0");
            } else if constexpr (std::is_same_v<T, ManualGains>) {
                if (!std::isfinite(v.K1) || !std::isfinite(v.K2))
                    throw std::invalid_argument("observer.K1/K2 must be finite");
            }
        },
        g);
}

GainPair time_varying_gains(double w, double A, double C, double alpha, const FrictionParams& p,
                            const PlantParams& jp) {
    GainPair out;
    out.K1 = C * p.sigma0 / (A * jp.J) * (p.sigma1 * std::abs(w) / stribeck_h(w, p) - 1.0);
    out.K2 = alpha + p.sigma1 * out.K1;
    return out;
}

double bounded_gain_k2(double A, double C, double alpha, double M, const FrictionParams& p,
                       const PlantParams& jp) {
    const double c1 = p.c1();
    if (!(c1 > 0.0))
        throw std::invalid_argument("observer: bounded gain rule requires min{Fs, Fc} > 0");
    return alpha + C / (A * jp.J) * p.sigma0 * p.sigma1 * (M / c1 - 1.0);
}

ExponentialGainSet exponential_gain_set(double C, double alpha, double beta,
                                        const FrictionParams& p, const PlantParams& jp) {
    ExponentialGainSet g;
    g.B = 2.0 * C * p.sigma1 / jp.J;
    g.A = g.B * p.sigma1 / (2.0 * jp.J) + beta / 2.0;
    g.K1 = -2.0 * C * (p.sigma1 * alpha + p.sigma0) / (beta * jp.J);
    g.K3 = -p.sigma1 * g.K1 / jp.J + alpha;
    g.K2 = jp.J * g.K3 + p.sigma1 * g.K1;
    return g;
}

GainPair resolve_two_state_gains(const GainSchedule& g, double w, const FrictionParams& p,
                                 const PlantParams& jp) {
    return std::visit(
        [&](const auto& v) -> GainPair {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, TimeVaryingGains>) {
                return time_varying_gains(w, v.A, v.C, v.alpha, p, jp);
            } else if constexpr (std::is_same_v<T, BoundedGains>) {
                GainPair out = time_varying_gains(w, v.A, v.C, v.alpha, p, jp);
                out.K2 = bounded_gain_k2(v.A, v.C, v.alpha, v.M, p, jp);
                return out;
            } else if constexpr (std::is_same_v<T, ExponentialGains>) {
                const ExponentialGainSet s = exponential_gain_set(v.C, v.alpha, v.beta, p, jp);
                return {s.K1, s.K2};
            } else if constexpr (std::is_same_v<T, ManualGains>) {
                return {v.K1, v.K2};
            } else {
                throw std::logic_error("resolve_two_state_gains: single-state observer variant");
            }
        },
        g);
}

double natural_observer_derivative(double z_hat, double w, const FrictionParams& p) {
    return w - p.sigma0 * std::abs(w) * z_hat / stribeck_h(w, p);
}

double corrected_observer_derivative(double z_hat, double w, double ctrl_error, double k,
                                     const FrictionParams& p) {
    return natural_observer_derivative(z_hat, w, p) - k * ctrl_error;
}

double compensated_control_input(double controller_output, double F_hat, double ref_accel,
                                 const PlantParams& jp) {
    return controller_output + F_hat + jp.J * ref_accel;
}

double friction_estimate(double z_hat, double dz_hat_dt, double w, const FrictionParams& p) {
    return p.sigma0 * z_hat + p.sigma1 * dz_hat_dt + p.Fv * w;
}

TwoStateRates two_state_observer_derivatives(const ObserverState& s, double w, double u, double K1,
                                             double K2, const FrictionParams& p,
                                             const PlantParams& jp) {
    TwoStateRates out;
    const double e_w = w - s.w_hat;
    out.dz_hat = natural_observer_derivative(s.z_hat, w, p) + K1 * e_w;
    out.F_hat = friction_estimate(s.z_hat, out.dz_hat, w, p);
    out.dw_hat = (-out.F_hat + u + K2 * e_w) / jp.J;
    return out;
}

}  // namespace lugre
