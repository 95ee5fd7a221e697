#pragma once

#include <variant>

#include "lugre/friction.hpp"

namespace lugre {

/// Observer state. w_hat is only propagated by the two-state observer family;
/// the single-state observers leave it untouched.
struct ObserverState {
    double z_hat = 0.0;  ///< estimated bristle deflection, rad
    double w_hat = 0.0;  ///< estimated velocity, rad/s
};

struct ObserverErrors {
    double e_z = 0.0;  ///< z - z_hat
    double e_w = 0.0;  ///< w - w_hat
    double e_f = 0.0;  ///< F - F_hat
};

// ---------------------------------------------------------------------------
// Gain schedules
// ---------------------------------------------------------------------------

/// Exact copy of the bristle dynamics driven by the measured velocity.
struct NaturalGains {};

/// Single-state observer corrected by the tracking error: dz_hat gains a
/// -k e term, where e = measurement - reference.
struct CorrectedGains {
    double k = 0.0;
};

/// Two-state observer, K1 and K2 recomputed from the current velocity:
///   K1 = (C sigma0 / (A J)) (sigma1 |w| / h(w) - 1),   K2 = alpha + sigma1 K1
/// which gives K3 = alpha / J.
struct TimeVaryingGains {
    double A = 1.0;
    double C = 1.0;
    double alpha = 1.0;
};

/// Two-state observer for |w| <= M: K1 as in the time-varying rule, K2 held
/// constant at its worst-case value over the velocity bound, so J K3 >= alpha
/// along any admissible trajectory.
struct BoundedGains {
    double A = 1.0;
    double C = 1.0;
    double alpha = 1.0;
    double M = 1.0;  ///< known velocity bound, rad/s
};

/// Two-state observer with constant gains constructed from (C, alpha, beta)
/// so that the quadratic form V = A e_z^2 + B e_z e_w + C e_w^2 has a
/// negative-definite derivative; the error dynamics are exponentially stable
/// for any bounded velocity, including w = 0.
struct ExponentialGains {
    double C = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
};

/// Two-state observer with user-fixed constant gains.
struct ManualGains {
    double K1 = 0.0;
    double K2 = 0.0;
};

using GainSchedule = std::variant<NaturalGains, CorrectedGains, TimeVaryingGains, BoundedGains,
                                  ExponentialGains, ManualGains>;

/// True for the variants that propagate a velocity estimate.
bool is_two_state(const GainSchedule& g);

/// Throws std::invalid_argument on non-positive design constants.
void validate(const GainSchedule& g, const FrictionParams& p);

struct GainPair {
    double K1 = 0.0;
    double K2 = 0.0;
};

/// Velocity-dependent gain rule of the time-varying regime.
GainPair time_varying_gains(double w, double A, double C, double alpha, const FrictionParams& p,
                            const PlantParams& jp);

/// Constant K2 of the bounded regime:
///   K2 = alpha + (C/(A J)) sigma0 sigma1 (M / C1 - 1).
/// Requires C1 = min{Fs, Fc} > 0.
double bounded_gain_k2(double A, double C, double alpha, double M, const FrictionParams& p,
                       const PlantParams& jp);

/// Constant-gain construction for the exponentially stable regime, with the
/// quadratic-form coefficients A, B kept for Lyapunov evaluation:
///   B = 2 C sigma1 / J            A = B sigma1 / (2J) + beta / 2
///   K1 = -2 C (sigma1 alpha + sigma0) / (beta J)
///   K3 = -sigma1 K1 / J + alpha   K2 = J K3 + sigma1 K1 = J alpha
struct ExponentialGainSet {
    double K1 = 0.0;
    double K2 = 0.0;
    double K3 = 0.0;
    double A = 0.0;
    double B = 0.0;
};

ExponentialGainSet exponential_gain_set(double C, double alpha, double beta,
                                        const FrictionParams& p, const PlantParams& jp);

/// Resolves the (K1, K2) used by the two-state observer at velocity w.
/// Must not be called for the single-state variants.
GainPair resolve_two_state_gains(const GainSchedule& g, double w, const FrictionParams& p,
                                 const PlantParams& jp);

// ---------------------------------------------------------------------------
// Observer dynamics
// ---------------------------------------------------------------------------

/// dz_hat = w - sigma0 |w| z_hat / h(w)
double natural_observer_derivative(double z_hat, double w, const FrictionParams& p);

/// dz_hat = w - sigma0 |w| z_hat / h(w) - k e, with e = measurement - reference.
double corrected_observer_derivative(double z_hat, double w, double ctrl_error, double k,
                                     const FrictionParams& p);

/// Control input of the observer-controller scheme that pairs with the
/// corrected observer: u = controller_output + F_hat + J ref_accel. The
/// feed-forward term is part of the law, not optional here.
double compensated_control_input(double controller_output, double F_hat, double ref_accel,
                                 const PlantParams& jp);

/// F_hat = sigma0 z_hat + sigma1 dz_hat + Fv w
double friction_estimate(double z_hat, double dz_hat_dt, double w, const FrictionParams& p);

struct TwoStateRates {
    double dz_hat = 0.0;
    double dw_hat = 0.0;
    double F_hat = 0.0;
};

/// Two-state observer dynamics:
///   dz_hat   = w - sigma0 |w| z_hat / h(w) + K1 (w - w_hat)
///   J dw_hat = -F_hat + u + K2 (w - w_hat)
/// with F_hat = sigma0 z_hat + sigma1 dz_hat + Fv w, dz_hat substituted
/// directly (no numerical differentiation).
TwoStateRates two_state_observer_derivatives(const ObserverState& s, double w, double u, double K1,
                                             double K2, const FrictionParams& p,
                                             const PlantParams& jp);

}  // namespace lugre
