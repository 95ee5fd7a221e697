#include "lugre/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lugre {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double phi_of(double w, const FrictionParams& p) { return std::abs(w) / stribeck_h(w, p); }

// Composite Simpson over one interval with an even panel count.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int j = 1; j < panels; ++j) acc += (j % 2 ? 4.0 : 2.0) * f(a + j * h);
    return acc * h / 3.0;
}

struct LineFit {
    double slope = 0.0;
    double r_squared = 1.0;
};

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit out;
    out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    if (syy > 0.0) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double resid = (y[i] - my) - out.slope * (x[i] - mx);
            ssr += resid * resid;
        }
        out.r_squared = 1.0 - ssr / syy;
    }
    return out;
}

}  // namespace

void LyapunovSpec::validate() const {
    if (!(A > 0.0) || !(C > 0.0) || !(B * B - 4.0 * A * C < 0.0))
        throw std::invalid_argument(
            "LyapunovSpec must satisfy A > 0, C > 0, B^2 - 4AC < 0 (positive definiteness)");
}

std::optional<LyapunovSpec> lyapunov_spec_for(const GainSchedule& g, const FrictionParams& p,
                                              const PlantParams& jp) {
    if (const auto* tv = std::get_if<TimeVaryingGains>(&g))
        return LyapunovSpec{tv->A, 0.0, tv->C};
    if (const auto* b = std::get_if<BoundedGains>(&g)) return LyapunovSpec{b->A, 0.0, b->C};
    if (const auto* e = std::get_if<ExponentialGains>(&g)) {
        const ExponentialGainSet s = exponential_gain_set(e->C, e->alpha, e->beta, p, jp);
        return LyapunovSpec{s.A, s.B, e->C};
    }
    return std::nullopt;
}

std::vector<double> error_decay_exponent(const ReferenceSignal& w_signal, const FrictionParams& p,
                                         std::span<const double> t_grid, int refine) {
    if (t_grid.empty()) return {};
    const auto integrand = [&](double tau) {
        const double w = signal_value(w_signal, tau);
        return p.sigma0 * phi_of(w, p);
    };
    std::vector<double> lambda(t_grid.size(), 0.0);
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        lambda[k] = lambda[k - 1] + simpson(integrand, t_grid[k - 1], t_grid[k], refine);
    return lambda;
}

std::vector<double> closed_form_error_oracle(const ReferenceSignal& w_signal, double e_z0,
                                             const FrictionParams& p,
                                             std::span<const double> t_grid, int refine) {
    std::vector<double> out = error_decay_exponent(w_signal, p, t_grid, refine);
    for (double& v : out) v = e_z0 * std::exp(-v);
    return out;
}

std::vector<double> closed_form_error_oracle(std::span<const double> t,
                                             std::span<const double> w_series, double e_z0,
                                             const FrictionParams& p, int refine) {
    if (t.size() != w_series.size()) throw std::invalid_argument("t and w series sizes differ");
    std::vector<double> out(t.size());
    if (t.empty()) return out;
    double lambda = 0.0;
    out[0] = e_z0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double w0 = w_series[k - 1], w1 = w_series[k];
        const double t0 = t[k - 1], t1 = t[k];
        const auto integrand = [&](double tau) {
            const double a = t1 > t0 ? (tau - t0) / (t1 - t0) : 0.0;
            const double w = w0 + (w1 - w0) * a;
            return p.sigma0 * phi_of(w, p);
        };
        lambda += simpson(integrand, t0, t1, refine);
        out[k] = e_z0 * std::exp(-lambda);
    }
    return out;
}

double pe_window_integral(std::span<const double> t, std::span<const double> w, double T_window) {
    const std::size_t n = t.size();
    if (n != w.size()) throw std::invalid_argument("t and w series sizes differ");
    if (n < 2) throw std::invalid_argument("series too short");
    if (!(T_window > 0.0)) throw std::invalid_argument("window must be > 0");
    const double span = t[n - 1] - t[0];
    if (T_window > span + 1e-12) throw std::invalid_argument("window exceeds series span");
    const double dtg = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
    const auto wlen = static_cast<std::size_t>(std::llround(T_window / dtg));
    if (wlen < 1 || wlen > n - 1) throw std::invalid_argument("window exceeds series span");

    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        cum[i] = cum[i - 1] + 0.5 * (std::abs(w[i - 1]) + std::abs(w[i])) * (t[i] - t[i - 1]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + wlen < n; ++i) best = std::min(best, cum[i + wlen] - cum[i]);
    return best;
}

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> e, double t_start,
                        double t_end, double floor) {
    std::vector<double> xs, ys;
    xs.reserve(t.size());
    ys.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_start || t[i] > t_end) continue;
        const double mag = std::abs(e[i]);
        if (mag <= floor) continue;
        xs.push_back(t[i]);
        ys.push_back(std::log(mag));
    }
    if (xs.size() < 10)
        throw std::runtime_error("fit_decay_rate: fewer than 10 samples above floor in window");
    const LineFit fit = least_squares_line(xs, ys);
    return DecayFit{-fit.slope, fit.r_squared, xs.front(), xs.back(), xs.size()};
}

DecayFit fit_decay_rate_log(std::span<const double> t, std::span<const double> log_e) {
    if (t.size() != log_e.size()) throw std::invalid_argument("t and log_e sizes differ");
    if (t.size() < 3) throw std::runtime_error("fit_decay_rate_log: need at least 3 samples");
    const LineFit fit = least_squares_line(t, log_e);
    return DecayFit{-fit.slope, fit.r_squared, t.front(), t.back(), t.size()};
}

FitWindow default_fit_window(std::span<const double> t, std::span<const double> e) {
    if (t.empty()) return {};
    const double hi = 0.5 * std::abs(e[0]);
    const double lo = 1e-10;
    double t_start = t.front(), t_end = t.back();
    bool started = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double mag = std::abs(e[i]);
        if (!started && mag <= hi) {
            t_start = t[i];
            started = true;
        }
        if (mag >= lo) t_end = t[i];
    }
    return {t_start, t_end};
}

LyapunovTrace lyapunov_trace(const Trajectory& traj, const LyapunovSpec& spec,
                             const GainSchedule& gains, const FrictionParams& p,
                             const PlantParams& jp) {
    spec.validate();
    if (!is_two_state(gains))
        throw std::invalid_argument("lyapunov_trace: gains must be a two-state observer variant");
    LyapunovTrace out;
    out.V.resize(traj.size());
    out.V_dot.resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double e_z = traj.e_z[i];
        const double e_w = traj.e_w[i];
        const double w = traj.w[i];
        if (!std::isfinite(e_z) || !std::isfinite(e_w))
            throw std::invalid_argument("lyapunov_trace: trajectory lacks error channels");
        out.V[i] = spec.A * e_z * e_z + spec.B * e_z * e_w + spec.C * e_w * e_w;
        const GainPair g = resolve_two_state_gains(gains, w, p, jp);
        const double K3 = (g.K2 - p.sigma1 * g.K1) / jp.J;
        const double phi = phi_of(w, p);
        const double de_z = -p.sigma0 * phi * e_z - g.K1 * e_w;
        const double de_w =
            -(p.sigma0 / jp.J) * e_z + (p.sigma0 * p.sigma1 / jp.J) * phi * e_z - K3 * e_w;
        out.V_dot[i] = 2.0 * spec.A * e_z * de_z + spec.B * (de_z * e_w + e_z * de_w) +
                       2.0 * spec.C * e_w * de_w;
    }
    return out;
}

double exponential_regime_vdot(double e_z, double e_w, double w, const ExponentialGainSet& g,
                               double C, double alpha, double beta, const FrictionParams& p,
                               const PlantParams& jp) {
    const double phi = phi_of(w, p);
    return -p.sigma0 * beta * phi * e_z * e_z - g.B * p.sigma0 / jp.J * e_z * e_z -
           2.0 * C * alpha * e_w * e_w;
}

GainIdentityResiduals gain_identity_residuals(const ExponentialGainSet& g, double C, double alpha,
                                              double beta, const FrictionParams& p,
                                              const PlantParams& jp) {
    const double J = jp.J;
    GainIdentityResiduals r;
    r.slack_pos_def = 2.0 * g.A - g.B * p.sigma1 / J;
    r.slack_ok = r.slack_pos_def >= 0.0 && g.B > 0.0;
    r.r_cross_ew = g.B * g.K1 + 2.0 * C * g.K3 - 2.0 * C * alpha;
    r.r_b_choice = 2.0 * C * p.sigma1 / J - g.B;
    r.r_cross_ezew = g.B * g.K3 + 2.0 * C * p.sigma0 / J + 2.0 * g.A * g.K1;
    r.r_discriminant = g.B * g.B - 4.0 * g.A * C + 2.0 * beta * C;
    r.r_k2 = g.K2 - J * alpha;

    const auto rel = [](double resid, double scale) {
        return scale > 0.0 ? std::abs(resid) / scale : std::abs(resid);
    };
    double m = 0.0;
    m = std::max(m, rel(r.r_cross_ew, std::abs(g.B * g.K1) + std::abs(2.0 * C * g.K3) +
                                          std::abs(2.0 * C * alpha)));
    m = std::max(m, rel(r.r_b_choice, std::abs(2.0 * C * p.sigma1 / J) + std::abs(g.B)));
    m = std::max(m, rel(r.r_cross_ezew, std::abs(g.B * g.K3) + std::abs(2.0 * C * p.sigma0 / J) +
                                            std::abs(2.0 * g.A * g.K1)));
    m = std::max(m, rel(r.r_discriminant, g.B * g.B + std::abs(4.0 * g.A * C) +
                                              std::abs(2.0 * beta * C)));
    m = std::max(m, rel(r.r_k2, std::abs(g.K2) + std::abs(J * alpha)));
    r.max_relative = m;
    return r;
}

SprMargin spr_margin(const PidConfig& controller, const PlantParams& jp, const FrictionParams& p,
                     std::span<const double> freq_grid_hz) {
    if (freq_grid_hz.empty()) throw std::invalid_argument("spr_margin: empty frequency grid");
    using cd = std::complex<double>;
    SprMargin out;
    out.min_real = std::numeric_limits<double>::infinity();
    for (double f : freq_grid_hz) {
        if (!(f > 0.0)) throw std::invalid_argument("spr_margin: frequencies must be > 0");
        const cd s(0.0, 2.0 * std::numbers::pi_v<double> * f);
        cd ctrl = controller.Kp + controller.Kd * s;
        if (controller.Ki != 0.0) {
            if (controller.tau > 0.0)
                ctrl += controller.Ki / (s * (controller.tau * s + 1.0));
            else
                ctrl += controller.Ki / s;
        }
        const cd den = jp.J * s * s + ctrl;
        if (std::abs(den) < 1e-12) {
            ++out.pole_hits;
            continue;
        }
        const cd T = (p.sigma1 * s + p.sigma0) / den;
        if (T.real() < out.min_real) {
            out.min_real = T.real();
            out.argmin_hz = f;
        }
    }
    return out;
}

std::vector<double> default_spr_grid() {
    std::vector<double> f(1000);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = std::pow(10.0, -2.0 + 7.0 * static_cast<double>(i) / 999.0);
    return f;
}

TrackingMetrics tracking_metrics(const Trajectory& traj) {
    const std::size_t n = traj.size();
    if (n == 0) throw std::invalid_argument("tracking_metrics: empty trajectory");
    if (!std::isfinite(traj.track_err[0]))
        throw std::invalid_argument("tracking_metrics: trajectory has no tracking channel");

    TrackingMetrics m;
    double acc = 0.0;
    for (double e : traj.track_err) acc += e * e;
    m.rmse = std::sqrt(acc / static_cast<double>(n));

    const double t_end = traj.t.back();
    const double t_tail = t_end - 0.1 * (t_end - traj.t.front());
    double tail_acc = 0.0;
    std::size_t tail_n = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (traj.t[i] >= t_tail) {
            tail_acc += std::abs(traj.track_err[i]);
            ++tail_n;
        }
    }
    m.steady_state_error = tail_n ? tail_acc / static_cast<double>(tail_n) : 0.0;

    const auto ref_at = [&](std::size_t i) {
        return std::isfinite(traj.ref_filtered[i]) ? traj.ref_filtered[i] : traj.ref_raw[i];
    };
    const double r_final = ref_at(n - 1);
    const double y0 = ref_at(0) - traj.track_err[0];
    const double change = r_final - y0;
    const double dir = sgn(change);
    if (dir != 0.0) {
        double peak = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = ref_at(i) - traj.track_err[i];
            peak = std::max(peak, (y - r_final) * dir);
        }
        m.overshoot = peak / std::abs(change);
    }

    const double band = 0.02 * std::abs(change);
    std::size_t settle_idx = n;
    for (std::size_t i = n; i-- > 0;) {
        if (std::abs(traj.track_err[i]) <= band)
            settle_idx = i;
        else
            break;
    }
    m.settling_time = settle_idx < n ? traj.t[settle_idx] : t_end;
    return m;
}

}  // namespace lugre
