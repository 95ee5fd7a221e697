#include "lugre/friction.hpp"

#include <stdexcept>

namespace lugre {

void FrictionParams::validate() const {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("friction.sigma0 must be > 0");
    if (!(sigma1 >= 0.0)) throw std::invalid_argument("friction.sigma1 must be >= 0");
    if (!(Fc >= 0.0)) throw std::invalid_argument("friction.Fc must be >= 0");
    if (!(Fs >= 0.0)) throw std::invalid_argument("friction.Fs must be >= 0");
    if (!(Fv >= 0.0)) throw std::invalid_argument("friction.Fv must be >= 0");
    if (!(ws > 0.0)) throw std::invalid_argument("friction.ws must be > 0");
    // c2 = max{Fs, Fc} > 0 keeps h(w) bounded away from zero everywhere.
    if (!(c2() > 0.0)) throw std::invalid_argument("friction.Fc and friction.Fs cannot both be 0");
}

void PlantParams::validate() const {
    if (!(J > 0.0)) throw std::invalid_argument("plant.J must be > 0");
}

double stribeck_h(double w, const FrictionParams& p) {
    const double r = w / p.ws;
    return p.Fc + (p.Fs - p.Fc) * std::exp(-r * r);
}

LugreRates lugre_derivatives(const PlantState& s, double u, const FrictionParams& p,
                             const PlantParams& jp) {
    LugreRates out;
    out.dz = s.w - p.sigma0 * std::abs(s.w) * s.z / stribeck_h(s.w, p);
    out.friction = p.sigma0 * s.z + p.sigma1 * out.dz + p.Fv * s.w;
    out.dw = (-out.friction + u) / jp.J;
    out.dtheta = s.w;
    return out;
}

double static_friction(double w, const FrictionParams& p) {
    return stribeck_h(w, p) * sgn(w) + p.Fv * w;
}

double steady_state_deflection(double w, const FrictionParams& p) {
    return stribeck_h(w, p) * sgn(w) / p.sigma0;
}

}  // namespace lugre
