#pragma once

#include <cstdint>

// Pinned values of the fixed experimental protocol (default seed, recorded
// oracle outputs). Regenerating any of these requires rerunning the
// corresponding oracle and updating the constant next to it.
namespace illposed::golden {

// Default noise seed of the CLI protocol; every golden value below that
// depends on a noise draw was recorded with it.
inline constexpr std::uint64_t kSeed = 4;

// svd oracle, problem generators
inline constexpr double kShaw32Sigma1 = 2.9933281475861055;
inline constexpr double kWing32Sigma8Ratio = 7.9977990834144116e-13;
inline constexpr double kHeat64Sigma1 = 0.35662662555404306;
inline constexpr double kDeriv2_64Sigma1 = 0.10130084104163178;
inline constexpr double kPhillips64RhsGap = 0.0009705449103633813;
inline constexpr double kWing64RhsGap = 0.030539260440855621;
inline constexpr double kDeriv2_64RhsGap = 0.00020224585288469536;

// noise draws (explicit seeds recorded in the tests)
inline constexpr double kShawNoiseMeanSeed7 = 0.0017406560313119835;
inline constexpr double kShaw64Alpha1Seed7 = 2.8818001869004806;

// protocol results at kSeed, n = 1024 (filled from the pipeline oracle)
inline constexpr int kShawK0Eps2 = 7;        // transition_k0 at eps = 1e-2
inline constexpr int kShawK0Eps3 = 7;        // transition_k0 at eps = 1e-3
inline constexpr int kShawK0Eps4 = 9;        // transition_k0 at eps = 1e-4
inline constexpr int kDeriv2LsqrBestK = 7;   // argmin_k at eps = 1e-3
inline constexpr double kHeatGammaRatioMax = 1.9709659223849676;  // eps = 1e-3, reliable rows

}  // namespace illposed::golden
