#pragma once

// Mapping between opinions and Dirichlet evidence (H)PDFs.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "sl/core.hpp"

namespace sl {

/// Non-informative prior weight used by every fusion operator.
inline constexpr double kDefaultPriorWeight = 2.0;

/// Dirichlet evidence parameters r over the reduced power set, with the base
/// rate and prior weight W. The Dirichlet strength of x is r(x) + a(x) W.
class EvidenceRecord {
 public:
  /// Throws Error(NegativeMass) for negative or non-finite evidence,
  /// Error(InvalidKey) for keys outside the reduced power set and
  /// Error(DomainViolation) for W <= 0.
  EvidenceRecord(Domain domain, BeliefMap evidence, BaseRate base_rate, double prior_weight = kDefaultPriorWeight);

  const Domain& domain() const { return domain_; }
  const BeliefMap& evidence() const { return evidence_; }
  double evidence(ValueSet set) const;
  const BaseRate& base_rate() const { return base_rate_; }
  double prior_weight() const { return prior_weight_; }

  /// Sum of r over all keys.
  double total() const;

 private:
  Domain domain_;
  BeliefMap evidence_;
  BaseRate base_rate_;
  double prior_weight_;
};

/// Relative degrees of infinity among dogmatic opinions, keyed by the
/// opinion's position in the input list.
struct DogmaticLimit {
  std::map<std::size_t, double> weights;
};

/// r(x) = W b(x) / u. Throws Error(DogmaticOpinion) for u = 0.
EvidenceRecord opinion_to_evidence(const Opinion& op, double prior_weight = kDefaultPriorWeight);

/// b(x) = r(x) / (W + S), u = W / (W + S) with S the total evidence.
Opinion evidence_to_opinion(const EvidenceRecord& ev);

/// Dirichlet density over singleton probabilities. Requires singleton-only
/// evidence; throws Error(DomainViolation) if p is not a distribution or has a
/// zero where the Dirichlet strength is below 1.
double dirichlet_pdf(const EvidenceRecord& ev, const ProjectedDistribution& p);

/// Hyper-Dirichlet density over a distribution on the reduced power set.
/// The prior weight sits on singletons (composite strength = composite
/// evidence), so singleton-only evidence gives exactly dirichlet_pdf.
/// Missing keys in `p` are 0.
double hyper_dirichlet_pdf(const EvidenceRecord& ev, const BeliefMap& p);

/// Weights for the dogmatic members of `ops`: the override restricted to the
/// dogmatic subset and renormalized, or equal weights without an override.
/// Throws Error(NoDogmaticOpinion) and Error(BadOverride).
DogmaticLimit dogmatic_weights(const std::vector<Opinion>& ops, const std::optional<DogmaticLimit>& override_weights);

}  // namespace sl
