#pragma once

#include <algorithm>
#include <cmath>

namespace lugre {

/// Signum with sgn(0) = 0, which keeps the static friction law continuous
/// through rest.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

/// LuGre bristle-model coefficients. All quantities are SI (torque in N·m,
/// angles in rad).
struct FrictionParams {
    double sigma0 = 0.0;  ///< bristle stiffness, N·m/rad
    double sigma1 = 0.0;  ///< bristle damping, N·m·s/rad
    double Fc = 0.0;      ///< Coulomb friction level, N·m
    double Fs = 0.0;      ///< stiction level, N·m
    double Fv = 0.0;      ///< viscous coefficient, N·m·s/rad
    double ws = 0.0;      ///< Stribeck velocity, rad/s

    /// Lower bound of the Stribeck curve, min{Fs, Fc}.
    double c1() const { return std::min(Fs, Fc); }
    /// Upper bound of the Stribeck curve, max{Fs, Fc}.
    double c2() const { return std::max(Fs, Fc); }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct PlantParams {
    double J = 0.0;  ///< total inertia, kg·m²

    void validate() const;
};

/// Mechanical state: position, velocity and the internal bristle deflection.
struct PlantState {
    double theta = 0.0;  ///< rad
    double w = 0.0;      ///< rad/s
    double z = 0.0;      ///< rad
};

/// Stribeck curve h(w) = Fc + (Fs - Fc) exp(-(w/ws)^2).
/// Bounded in [c1, c2] for all finite w, so divisions by h are safe.
double stribeck_h(double w, const FrictionParams& p);

struct LugreRates {
    double dtheta = 0.0;
    double dw = 0.0;
    double dz = 0.0;
    double friction = 0.0;  ///< friction torque, derived output (not a state)
};

/// Plant and bristle dynamics:
///   dz = w - sigma0 |w| z / h(w)
///   F  = sigma0 z + sigma1 dz + Fv w
///   J dw = -F + u
LugreRates lugre_derivatives(const PlantState& s, double u, const FrictionParams& p,
                             const PlantParams& jp);

/// Classical static (sliding-phase) friction law; odd in w, zero at rest.
double static_friction(double w, const FrictionParams& p);

/// Bristle deflection with dz = 0 at constant velocity: h(w) sgn(w) / sigma0.
double steady_state_deflection(double w, const FrictionParams& p);

}  // namespace lugre
