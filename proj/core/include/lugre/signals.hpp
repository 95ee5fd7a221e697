#pragma once

#include <variant>

namespace lugre {

struct StepSignal {
    double amplitude = 0.0;
    double start_time = 0.0;
};

struct SinusoidSignal {
    double amplitude = 0.0;
    double frequency_hz = 1.0;
    double phase = 0.0;  ///< rad
};

struct RampSignal {
    double slope = 0.0;
};

struct ConstantSignal {
    double value = 0.0;
};

/// amplitude * exp(-rate t); an L1 signal, used to exercise observers whose
/// error decay needs persistent excitation.
struct DecayingExpSignal {
    double amplitude = 0.0;
    double rate = 1.0;
};

using ReferenceSignal =
    std::variant<StepSignal, SinusoidSignal, RampSignal, ConstantSignal, DecayingExpSignal>;

void validate(const ReferenceSignal& s);

double signal_value(const ReferenceSignal& s, double t);

/// Analytic first derivative; steps and ramps use their a.e. value (the jump
/// itself carries no representable derivative).
double signal_derivative(const ReferenceSignal& s, double t);

double signal_second_derivative(const ReferenceSignal& s, double t);

}  // namespace lugre
