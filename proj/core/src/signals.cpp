#include "lugre/signals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lugre {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void validate(const ReferenceSignal& s) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SinusoidSignal>) {
                if (!(v.frequency_hz > 0.0))
                    throw std::invalid_argument("reference.frequency_hz must be > 0");
            } else if constexpr (std::is_same_v<T, DecayingExpSignal>) {
                if (!(v.rate > 0.0)) throw std::invalid_argument("reference.rate must be > 0");
            }
        },
        s);
}

double signal_value(const ReferenceSignal& s, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StepSignal>) {
                return t >= v.start_time ? v.amplitude : 0.0;
            } else if constexpr (std::is_same_v<T, SinusoidSignal>) {
                return v.amplitude * std::sin(kTwoPi * v.frequency_hz * t + v.phase);
            } else if constexpr (std::is_same_v<T, RampSignal>) {
                return v.slope * t;
            } else if constexpr (std::is_same_v<T, ConstantSignal>) {
                return v.value;
            } else {
                return v.amplitude * std::exp(-v.rate * t);
            }
        },
        s);
}

double signal_derivative(const ReferenceSignal& s, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StepSignal>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, SinusoidSignal>) {
                const double om = kTwoPi * v.frequency_hz;
                return v.amplitude * om * std::cos(om * t + v.phase);
            } else if constexpr (std::is_same_v<T, RampSignal>) {
                return v.slope;
            } else if constexpr (std::is_same_v<T, ConstantSignal>) {
                return 0.0;
            } else {
                return -v.rate * v.amplitude * std::exp(-v.rate * t);
            }
        },
        s);
}

double signal_second_derivative(const ReferenceSignal& s, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SinusoidSignal>) {
                const double om = kTwoPi * v.frequency_hz;
                return -v.amplitude * om * om * std::sin(om * t + v.phase);
            } else if constexpr (std::is_same_v<T, DecayingExpSignal>) {
                return v.rate * v.rate * v.amplitude * std::exp(-v.rate * t);
            } else {
                return 0.0;
            }
        },
        s);
}

}  // namespace lugre
