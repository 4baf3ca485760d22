#pragma once

// Pass/fail thresholds of every verification suite. Suites and the
// acceptance run read them from here and nowhere else.
//
// Drifts are relative changes |r_fine / r_coarse - 1| between a run and the
// same run at twice the length or on the refined grid.

#include "besovop/schur.hpp"
#include "json.hpp"

namespace besovop::cli::thresholds {

// mu(2n) sqrt(n) <= e(n): exact, no tolerance.
inline constexpr double kMuEstimateMax = 1.0;

// l_{p,q} equivalence ratio band and drift per doubling of the length.
inline constexpr double kLpqBandLow = 0.05;
inline constexpr double kLpqBandHigh = 20.0;
inline constexpr double kLpqDoublingDrift = 0.25;

// A-quasinorm / (||k||_2 + seminorm) for synthesized kernels.
inline constexpr double kNonlinearBandLow = 0.1;
inline constexpr double kNonlinearBandHigh = 10.0;
inline constexpr double kNonlinearRefinementDrift = 0.30;

// Schatten embedding: refinement drift of the max ratio, and the fitted
// decay exponent for planted alpha = 1 (predicted -3/2).
inline constexpr double kEmbeddingRefinementDrift = 0.30;
inline constexpr double kDecayExponentMax = -1.35;

// Schur multipliers.
inline constexpr double kSchurSoundness = kSchurSoundnessTolerance;
inline constexpr double kSchurConstantLowerMin = 0.999;
inline constexpr double kSchurConstantRhsTolerance = 1e-12;
inline constexpr double kSchurOracleAgreement = 0.05;

// Hardy transfer ratio drift per doubling of the profile length.
inline constexpr double kHardyDoublingDrift = 0.20;

inline nlohmann::json table() {
  return {
      {"mu_estimate_max", kMuEstimateMax},
      {"lpq_band", {kLpqBandLow, kLpqBandHigh}},
      {"lpq_doubling_drift", kLpqDoublingDrift},
      {"nonlinear_band", {kNonlinearBandLow, kNonlinearBandHigh}},
      {"nonlinear_refinement_drift", kNonlinearRefinementDrift},
      {"embedding_refinement_drift", kEmbeddingRefinementDrift},
      {"decay_exponent_max", kDecayExponentMax},
      {"schur_soundness", kSchurSoundness},
      {"schur_constant_lower_min", kSchurConstantLowerMin},
      {"schur_constant_rhs_tolerance", kSchurConstantRhsTolerance},
      {"schur_oracle_agreement", kSchurOracleAgreement},
      {"hardy_doubling_drift", kHardyDoublingDrift},
  };
}

}  // namespace besovop::cli::thresholds
