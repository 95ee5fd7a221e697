#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lugre/control.hpp"
#include "lugre/friction.hpp"
#include "lugre/observers.hpp"
#include "lugre/signals.hpp"
#include "lugre/sim.hpp"

namespace lugre {

/// Quadratic form V = A e_z^2 + B e_z e_w + C e_w^2.
struct LyapunovSpec {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;

    /// Positive definite iff A > 0, C > 0, B^2 - 4AC < 0; throws otherwise.
    void validate() const;
};

/// Quadratic form attached to a gain regime: {A, 0, C} for the time-varying
/// and bounded rules, the constructed {A, B, C} for the exponential rule,
/// nothing for the single-state and manual variants.
std::optional<LyapunovSpec> lyapunov_spec_for(const GainSchedule& g, const FrictionParams& p,
                                              const PlantParams& jp);

struct DecayFit {
    double rate = 0.0;       ///< fitted exponential rate, 1/s (rate = -slope of log|e|)
    double r_squared = 0.0;  ///< fit quality on log|e|
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t n_samples = 0;
};

/// Natural-observer error solution e_z(t) = e_z(0) exp(-sigma0 Int |w|/h dtau)
/// evaluated by composite Simpson quadrature with `refine` panels per grid
/// interval; the velocity is evaluated analytically from the signal.
std::vector<double> closed_form_error_oracle(const ReferenceSignal& w_signal, double e_z0,
                                             const FrictionParams& p,
                                             std::span<const double> t_grid, int refine = 10);

/// Same closed form from a sampled velocity series (linear interpolation of w
/// on the refined grid).
std::vector<double> closed_form_error_oracle(std::span<const double> t,
                                             std::span<const double> w_series, double e_z0,
                                             const FrictionParams& p, int refine = 10);

/// Cumulative exponent Lambda(t) = sigma0 Int_0^t |w|/h dtau on the grid; the
/// log-domain form of the closed-form solution, usable far below the range
/// where exp(-Lambda) is representable.
std::vector<double> error_decay_exponent(const ReferenceSignal& w_signal, const FrictionParams& p,
                                         std::span<const double> t_grid, int refine = 10);

/// min over window starts of Int_t^{t+T} |w| dtau (trapezoidal). The
/// persistent-excitation hypothesis holds iff the result is positive.
double pe_window_integral(std::span<const double> t, std::span<const double> w, double T_window);

/// Least-squares line through (t, log|e|) over [t_start, t_end], using samples
/// with |e| above `floor`. Throws std::runtime_error when fewer than 10
/// samples qualify.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> e, double t_start,
                        double t_end, double floor = 1e-14);

/// Same fit on already-logged magnitudes (no floor; every sample is used).
DecayFit fit_decay_rate_log(std::span<const double> t, std::span<const double> log_e);

/// Default fit window: the span where |e| is within [1e-10, 0.5 |e(0)|].
struct FitWindow {
    double t_start = 0.0;
    double t_end = 0.0;
};
FitWindow default_fit_window(std::span<const double> t, std::span<const double> e);

struct LyapunovTrace {
    std::vector<double> V;
    std::vector<double> V_dot;  ///< analytic, from the error dynamics
};

/// V along a trajectory and its analytic derivative obtained by substituting
/// the error dynamics (gains resolved from the schedule at each sample).
LyapunovTrace lyapunov_trace(const Trajectory& traj, const LyapunovSpec& spec,
                             const GainSchedule& gains, const FrictionParams& p,
                             const PlantParams& jp);

/// Closed-form dV/dt of the exponential regime,
///   -sigma0 beta (|w|/h) e_z^2 - (B sigma0 / J) e_z^2 - 2 C alpha e_w^2,
/// kept as an independent route against lyapunov_trace.
double exponential_regime_vdot(double e_z, double e_w, double w, const ExponentialGainSet& g,
                               double C, double alpha, double beta, const FrictionParams& p,
                               const PlantParams& jp);

/// Residuals of the constant-gain construction. All are exactly zero in real
/// arithmetic; `max_relative` normalizes each by the magnitude of its terms.
struct GainIdentityResiduals {
    double slack_pos_def = 0.0;     ///< 2A - B sigma1 / J, must be >= 0
    double r_cross_ew = 0.0;        ///< B K1 + 2 C K3 - 2 C alpha
    double r_b_choice = 0.0;        ///< 2 C sigma1 / J - B
    double r_cross_ezew = 0.0;      ///< B K3 + 2 C sigma0 / J + 2 A K1
    double r_discriminant = 0.0;    ///< B^2 - 4AC + 2 beta C
    double r_k2 = 0.0;              ///< K2 - J alpha
    double max_relative = 0.0;
    bool slack_ok = false;
};

GainIdentityResiduals gain_identity_residuals(const ExponentialGainSet& g, double C, double alpha,
                                              double beta, const FrictionParams& p,
                                              const PlantParams& jp);

struct SprMargin {
    double min_real = 0.0;
    double argmin_hz = 0.0;
    int pole_hits = 0;  ///< grid points with |denominator| < 1e-12, skipped
};

/// Minimum over the grid of Re T(j 2 pi f) with T(s) = (sigma1 s + sigma0) /
/// (J s^2 + C(s)); a negative result means the strict-positive-real condition
/// fails on the grid.
SprMargin spr_margin(const PidConfig& controller, const PlantParams& jp, const FrictionParams& p,
                     std::span<const double> freq_grid_hz);

/// 1000 logarithmically spaced points over [1e-2, 1e5] Hz.
std::vector<double> default_spr_grid();

struct TrackingMetrics {
    double rmse = 0.0;
    double steady_state_error = 0.0;  ///< mean |track_err| over the final 10%
    double overshoot = 0.0;           ///< fraction of the commanded change, 0 if none
    double settling_time = 0.0;       ///< first entry into the +-2% band it never leaves
};

TrackingMetrics tracking_metrics(const Trajectory& traj);

}  // namespace lugre
