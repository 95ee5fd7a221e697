#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lugre/analysis.hpp"
#include "lugre/friction.hpp"

namespace lugre {

/// One verification check: the measured value, the threshold it was held to,
/// and the comparison outcome.
struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Benchmark servo parameter set used by the shipped presets and suites.
FrictionParams benchmark_friction();
PlantParams benchmark_plant();

/// Identity residuals of the constant-gain construction over random
/// (C, alpha, beta) draws in (0, 100]^3, on the benchmark parameters and on
/// the unit toy set, plus the hand-checked toy instance.
std::vector<CheckResult> verify_gain_identities(std::uint64_t seed, int draws = 1000);

/// Simulated natural-observer error against the closed-form solution for
/// constant, step, sinusoid and decaying-exponential velocities.
std::vector<CheckResult> verify_oracle_equivalence();

/// Empirical stability checks: constant-velocity decay-rate bounds,
/// persistent-excitation window integrals and envelope decay, the
/// L1-velocity counterexample, the frozen-plant contrast, and the
/// quadratic-form monotonicity and error decay of the two-state regimes.
std::vector<CheckResult> verify_lemma_suite(std::uint64_t seed);

/// Runs a named suite: "gains", "oracle", "lemmas" or "all".
std::vector<CheckResult> run_verification_suite(const std::string& suite, std::uint64_t seed);

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace lugre
