#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace risopt {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

// Independent-oracle suites behind the `verify` subcommand. Each check is
// deterministic given the seed and self-contained.

// Closed-form receive beamformer vs the principal generalized eigenvector of
// (signal, interference) and vs 1000 random unit combiners per instance.
CheckResult check_beamforming_optimality(std::uint64_t seed);

// Analytic SINR vs Monte-Carlo received-signal simulation (1e6 samples).
CheckResult check_sinr_consistency(std::uint64_t seed);

// Antenna sweep trend: optimal min-rate non-decreasing in M, above random
// beamforming everywhere, with a widening optimal/random ratio.
CheckResult check_antenna_trend(std::uint64_t seed);

// Empirical per-entry second moment of each channel type vs eta * d^-zeta.
CheckResult check_channel_moments(std::uint64_t seed);

// Backpropagation vs central finite differences over 50 network shapes
// including every shape the agents instantiate.
CheckResult check_gradients(std::uint64_t seed);

// Unit beamformer norm, power box, and amplitude cap over 1e4 random steps.
CheckResult check_constraints(std::uint64_t seed);

// Squashed-Gaussian density integrates to 1 (quadrature) and matches 1e6
// samples (Kolmogorov-Smirnov).
CheckResult check_squashed_gaussian(std::uint64_t seed);

// Replay sampling frequency uniformity.
CheckResult check_buffer_uniformity(std::uint64_t seed);

// Identical config + seed reproduce byte-identical metrics CSV text.
CheckResult check_determinism(std::uint64_t seed);

std::vector<CheckResult> run_verification(std::uint64_t seed);

}  // namespace risopt
