#pragma once

// Multi-source belief fusion operators.

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "sl/core.hpp"
#include "sl/dirichlet.hpp"

namespace sl {

struct FusionOptions {
  /// Relative weights among dogmatic inputs; equal weights when unset.
  std::optional<DogmaticLimit> dogmatic_weights;
};

/// Dempster-Shafer basic belief assignment. Keys are non-empty subsets of the
/// domain; the full domain is allowed.
class MassFunction {
 public:
  /// Throws Error(InvalidKey), Error(NegativeMass) or Error(AdditivityViolation).
  MassFunction(Domain domain, BeliefMap mass);

  /// Belief masses plus u as mass on the full domain.
  static MassFunction from_opinion(const Opinion& op);

  const Domain& domain() const { return domain_; }
  const BeliefMap& mass() const { return mass_; }
  double mass(ValueSet set) const;

 private:
  Domain domain_;
  BeliefMap mass_;
};

struct DempsterResult {
  MassFunction combined;
  double conflict;
};

/// Dempster's rule of combination. Throws Error(TotalConflict) when the
/// conflict K is 1 within 1e-12, Error(DomainMismatch) for different domains.
DempsterResult dempster_combine(const MassFunction& m1, const MassFunction& m2);

/// Aleatory cumulative fusion: evidence addition. With dogmatic inputs only
/// those are combined, weighted by the dogmatic weights.
Opinion fuse_cumulative(const std::vector<Opinion>& ops, const FusionOptions& opts = {});

/// Averaging fusion: arithmetic mean of evidence; dogmatic case as cumulative.
Opinion fuse_averaging(const std::vector<Opinion>& ops, const FusionOptions& opts = {});

/// Cumulative fusion of all inputs followed by uncertainty maximization.
/// Multinomial inputs only.
Opinion fuse_epistemic_cumulative(const std::vector<Opinion>& ops, const FusionOptions& opts = {});

/// Weighted fusion: confidence-weighted mean of evidence.
Opinion fuse_weighted(const std::vector<Opinion>& ops, const FusionOptions& opts = {});

/// Belief constraint fusion: Dempster's rule over the opinions' mass
/// functions, with confidence-weighted base rates.
Opinion fuse_constraint(const std::vector<Opinion>& ops, const FusionOptions& opts = {});

/// Intermediate quantities of consensus & compromise fusion.
struct CcfTrace {
  BeliefMap consensus;
  double consensus_total = 0.0;
  std::vector<BeliefMap> residues;
  /// Compromise belief over the power set; may hold the full domain.
  BeliefMap compromise;
  double compromise_total = 0.0;
  double preliminary_uncertainty = 0.0;
  /// Normalization factor; 0 when the compromise is empty.
  double eta = 0.0;
};

/// Consensus & compromise fusion. All inputs must share one base rate
/// (Error(BaseRateMismatch) otherwise).
std::pair<Opinion, CcfTrace> fuse_consensus_compromise_traced(const std::vector<Opinion>& ops,
                                                              const FusionOptions& opts = {});
Opinion fuse_consensus_compromise(const std::vector<Opinion>& ops, const FusionOptions& opts = {});

enum class FusionOperator { Cumulative, EpistemicCumulative, Averaging, Weighted, Constraint, ConsensusCompromise };

/// Parses cbf, ecbf, abf, wbf, bcf or ccf. Throws Error(UnknownOperator).
FusionOperator parse_operator(std::string_view tag);
std::string_view to_string(FusionOperator op) noexcept;

Opinion fuse(FusionOperator op, const std::vector<Opinion>& ops, const FusionOptions& opts = {});
Opinion fuse(std::string_view tag, const std::vector<Opinion>& ops, const FusionOptions& opts = {});

}  // namespace sl
