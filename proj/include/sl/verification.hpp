#pragma once

// Evidence-space oracles and seeded opinion generators for cross-checking
// the closed-form fusion operators.

#include <cstdint>
#include <vector>

#include "sl/core.hpp"

namespace sl::verification {

struct RandomOpinionSpec {
  std::uint64_t seed = 0;
  std::size_t k = 2;
  std::size_t n_actors = 2;
  bool hyper = false;
  double dogmatic_probability = 0.0;
  double vacuous_probability = 0.0;
  /// Draw a separate random base rate per opinion instead of a shared uniform one.
  bool distinct_base_rates = false;
  /// Upper bound on the number of belief keys per hyper opinion.
  std::size_t max_hyper_support = 5;
};

/// Deterministic for a fixed spec. Draws come straight from std::mt19937_64
/// (no std distributions), so sequences are identical on every platform.
std::vector<Opinion> generate_opinions(const RandomOpinionSpec& spec);

/// Maps each opinion to evidence (W = 2), sums the evidence and maps back.
/// Throws Error(DogmaticInput) for u = 0.
Opinion cbf_evidence_oracle(const std::vector<Opinion>& ops);

/// As cbf_evidence_oracle with the arithmetic mean of the evidence.
Opinion abf_evidence_oracle(const std::vector<Opinion>& ops);

/// Confidence-weighted mean of the evidence, mapped back.
/// Throws Error(DogmaticInput) and Error(AllVacuous).
Opinion wbf_evidence_oracle(const std::vector<Opinion>& ops);

/// The two-actor consensus & compromise formulas evaluated literally over
/// every pair of reduced-power-set keys. Throws Error(BaseRateMismatch).
Opinion ccf_binary_oracle(const Opinion& first, const Opinion& second);

/// Largest absolute difference over belief keys, uncertainty and base rate.
double max_abs_difference(const Opinion& a, const Opinion& b);

}  // namespace sl::verification
