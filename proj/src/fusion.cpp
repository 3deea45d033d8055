#include "sl/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace sl {

// MassFunction

MassFunction::MassFunction(Domain domain, BeliefMap mass) : domain_(std::move(domain)) {
  const auto full = domain_.full_set();
  double sum = 0.0;
  for (const auto& [set, m] : mass) {
    if (set.empty() || !set.is_subset_of(full)) {
      throw Error(Errc::InvalidKey, "mass key " + domain_.format(set) + " is not a non-empty subset");
    }
    const double value = (m < 0.0 && m >= -kClampTolerance) ? 0.0 : m;
    if (!std::isfinite(value) || value < 0.0) throw Error(Errc::NegativeMass, "negative mass");
    sum += value;
    if (value > 0.0) mass_.emplace(set, value);
  }
  if (std::abs(sum - 1.0) > kAdditivityTolerance) throw Error(Errc::AdditivityViolation, "masses do not sum to 1");
}

MassFunction MassFunction::from_opinion(const Opinion& op) {
  BeliefMap m = op.belief();
  if (op.uncertainty() > 0.0) m.emplace(op.domain().full_set(), op.uncertainty());
  return MassFunction(op.domain(), std::move(m));
}

double MassFunction::mass(ValueSet set) const {
  auto it = mass_.find(set);
  return it == mass_.end() ? 0.0 : it->second;
}

DempsterResult dempster_combine(const MassFunction& m1, const MassFunction& m2) {
  if (m1.domain() != m2.domain()) throw Error(Errc::DomainMismatch, "mass functions over different domains");
  BeliefMap joint;
  double conflict = 0.0;
  for (const auto& [y, my] : m1.mass()) {
    for (const auto& [z, mz] : m2.mass()) {
      const auto x = y & z;
      if (x.empty()) {
        conflict += my * mz;
      } else {
        joint[x] += my * mz;
      }
    }
  }
  const double norm = 1.0 - conflict;
  if (norm <= 1e-12) throw Error(Errc::TotalConflict, "the combined masses are in total conflict");
  for (auto& [x, m] : joint) m /= norm;
  return {MassFunction(m1.domain(), std::move(joint)), conflict};
}

namespace {

// Product of all uncertainties except the one at `skip`.
double product_except(const std::vector<Opinion>& ops, std::size_t skip) {
  double p = 1.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i != skip) p *= ops[i].uncertainty();
  }
  return p;
}

double product_all(const std::vector<Opinion>& ops) {
  double p = 1.0;
  for (const auto& op : ops) p *= op.uncertainty();
  return p;
}

bool any_dogmatic(const std::vector<Opinion>& ops) {
  return std::any_of(ops.begin(), ops.end(), [](const Opinion& op) { return op.is_dogmatic(); });
}

BaseRate average_base_rate(const std::vector<Opinion>& ops) {
  const auto k = ops.front().domain().size();
  std::vector<double> a(k, 0.0);
  for (const auto& op : ops) {
    for (std::size_t i = 0; i < k; ++i) a[i] += op.base_rate()[i];
  }
  for (auto& v : a) v /= static_cast<double>(ops.size());
  return BaseRate(std::move(a));
}

// Sum of a^A (1 - u^A) over sum of (1 - u^A); plain average when every input is vacuous.
BaseRate confidence_weighted_base_rate(const std::vector<Opinion>& ops) {
  const auto k = ops.front().domain().size();
  std::vector<double> a(k, 0.0);
  double confidence = 0.0;
  for (const auto& op : ops) {
    const double c = 1.0 - op.uncertainty();
    confidence += c;
    for (std::size_t i = 0; i < k; ++i) a[i] += op.base_rate()[i] * c;
  }
  if (confidence <= 0.0) return average_base_rate(ops);
  for (auto& v : a) v /= confidence;
  return BaseRate(std::move(a));
}

// Weighted sum of the dogmatic inputs' beliefs, u = 0.
BeliefMap dogmatic_belief(const std::vector<Opinion>& ops, const DogmaticLimit& limit) {
  BeliefMap b;
  for (const auto& [index, gamma] : limit.weights) {
    for (const auto& [set, mass] : ops[index].belief()) b[set] += gamma * mass;
  }
  return b;
}

// Sum over A of b^A(x) * weight_A for every key x.
BeliefMap weighted_belief_sum(const std::vector<Opinion>& ops, const std::vector<double>& weights) {
  BeliefMap b;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (const auto& [set, mass] : ops[i].belief()) b[set] += mass * weights[i];
  }
  return b;
}

std::vector<double> products_except_each(const std::vector<Opinion>& ops) {
  std::vector<double> p(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) p[i] = product_except(ops, i);
  return p;
}

Opinion fuse_dogmatic(const std::vector<Opinion>& ops, const FusionOptions& opts) {
  const auto limit = dogmatic_weights(ops, opts.dogmatic_weights);
  return Opinion(ops.front().domain(), dogmatic_belief(ops, limit), 0.0, confidence_weighted_base_rate(ops));
}

}  // namespace

Opinion fuse_cumulative(const std::vector<Opinion>& ops, const FusionOptions& opts) {
  require_common_domain(ops);
  if (any_dogmatic(ops)) return fuse_dogmatic(ops, opts);

  // D = sum_A prod_{A' != A} u - (n - 1) prod u, written as sum_A (1 - u^A) prod_{A' != A} u + prod u.
  const auto others = products_except_each(ops);
  const double all = product_all(ops);
  double denom = all;
  for (std::size_t i = 0; i < ops.size(); ++i) denom += (1.0 - ops[i].uncertainty()) * others[i];

  auto b = weighted_belief_sum(ops, others);
  for (auto& [set, mass] : b) mass /= denom;
  return Opinion(ops.front().domain(), std::move(b), all / denom, confidence_weighted_base_rate(ops));
}

Opinion fuse_averaging(const std::vector<Opinion>& ops, const FusionOptions& opts) {
  require_common_domain(ops);
  if (any_dogmatic(ops)) return fuse_dogmatic(ops, opts);

  const auto others = products_except_each(ops);
  double denom = 0.0;
  for (double p : others) denom += p;

  auto b = weighted_belief_sum(ops, others);
  for (auto& [set, mass] : b) mass /= denom;
  const double u = static_cast<double>(ops.size()) * product_all(ops) / denom;
  return Opinion(ops.front().domain(), std::move(b), u, confidence_weighted_base_rate(ops));
}

Opinion fuse_epistemic_cumulative(const std::vector<Opinion>& ops, const FusionOptions& opts) {
  require_common_domain(ops);
  for (const auto& op : ops) {
    if (!op.is_multinomial()) throw Error(Errc::HyperInputUnsupported, "epistemic fusion needs multinomial opinions");
  }
  return uncertainty_maximize(fuse_cumulative(ops, opts));
}

Opinion fuse_weighted(const std::vector<Opinion>& ops, const FusionOptions& opts) {
  require_common_domain(ops);
  const auto& domain = ops.front().domain();

  if (any_dogmatic(ops)) {
    const auto limit = dogmatic_weights(ops, opts.dogmatic_weights);
    std::vector<double> a(domain.size(), 0.0);
    for (const auto& [index, gamma] : limit.weights) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += gamma * ops[index].base_rate()[i];
    }
    return Opinion(domain, dogmatic_belief(ops, limit), 0.0, BaseRate(std::move(a)));
  }

  const bool all_vacuous = std::all_of(ops.begin(), ops.end(), [](const Opinion& op) { return op.is_vacuous(); });
  if (all_vacuous) return Opinion::vacuous(domain, average_base_rate(ops));

  // Denominator sum_A prod_{A' != A} u - n prod u, written as sum_A (1 - u^A) prod_{A' != A} u.
  const auto others = products_except_each(ops);
  std::vector<double> weights(ops.size());
  double denom = 0.0;
  double confidence = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double c = 1.0 - ops[i].uncertainty();
    weights[i] = c * others[i];
    denom += weights[i];
    confidence += c;
  }

  auto b = weighted_belief_sum(ops, weights);
  for (auto& [set, mass] : b) mass /= denom;
  const double u = confidence * product_all(ops) / denom;
  return Opinion(domain, std::move(b), u, confidence_weighted_base_rate(ops));
}

Opinion fuse_constraint(const std::vector<Opinion>& ops, const FusionOptions&) {
  require_common_domain(ops);
  const auto& domain = ops.front().domain();

  auto combined = MassFunction::from_opinion(ops.front());
  for (std::size_t i = 1; i < ops.size(); ++i) {
    combined = dempster_combine(combined, MassFunction::from_opinion(ops[i])).combined;
  }

  const auto full = domain.full_set();
  BeliefMap b;
  for (const auto& [set, m] : combined.mass()) {
    if (set != full) b.emplace(set, m);
  }

  // The confidence-weighted case applies whenever some input has u < 1.
  return Opinion(domain, std::move(b), combined.mass(full), confidence_weighted_base_rate(ops));
}

namespace {

using Support = std::vector<std::pair<ValueSet, double>>;

// Adds the intersection/union terms of the compromise belief for every tuple
// drawn from the residual supports.
void add_tuple_terms(const std::vector<Support>& supports, const BaseRate& a, BeliefMap& compromise) {
  const auto n = supports.size();
  for (const auto& s : supports) {
    if (s.empty()) return;
  }

  std::vector<std::size_t> pick(n, 0);
  std::vector<ValueSet> prefix(n + 1), suffix(n + 1);
  std::vector<ValueSet> others(1);
  const ValueSet all_bits(~ValueSet::mask_type{0});

  while (true) {
    double product = 1.0;
    ValueSet intersection = all_bits;
    ValueSet set_union;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& [y, mass] = supports[i][pick[i]];
      product *= mass;
      intersection = intersection & y;
      set_union = set_union | y;
    }

    if (intersection.empty()) {
      compromise[set_union] += product;
    } else {
      // Relative base rate of y_i given the intersection of all other y_j.
      prefix[0] = all_bits;
      for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] & supports[i][pick[i]].first;
      suffix[n] = all_bits;
      for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] & supports[i][pick[i]].first;

      double relative = 1.0;
      for (std::size_t i = 0; i < n && relative != 0.0; ++i) {
        others[0] = prefix[i] & suffix[i + 1];
        relative *= relative_base_rate(a, supports[i][pick[i]].first, others);
      }
      compromise[intersection] += product * relative;
      compromise[set_union] += product * (1.0 - relative);
    }

    std::size_t i = 0;
    while (i < n && ++pick[i] == supports[i].size()) pick[i++] = 0;
    if (i == n) break;
  }
}

}  // namespace

std::pair<Opinion, CcfTrace> fuse_consensus_compromise_traced(const std::vector<Opinion>& ops, const FusionOptions&) {
  require_common_domain(ops);
  const auto& domain = ops.front().domain();
  const auto& a = ops.front().base_rate();
  for (const auto& op : ops) {
    if (!approx_equal(op.base_rate(), a, 1e-12)) {
      throw Error(Errc::BaseRateMismatch, "consensus & compromise fusion needs a shared base rate");
    }
  }

  CcfTrace trace;

  // Consensus phase.
  std::set<ValueSet> keys;
  for (const auto& op : ops) {
    for (const auto& [set, mass] : op.belief()) keys.insert(set);
  }
  for (auto set : keys) {
    double lowest = ops.front().belief(set);
    for (const auto& op : ops) lowest = std::min(lowest, op.belief(set));
    if (lowest > 0.0) {
      trace.consensus.emplace(set, lowest);
      trace.consensus_total += lowest;
    }
  }

  std::vector<Support> supports(ops.size());
  trace.residues.resize(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (const auto& [set, mass] : ops[i].belief()) {
      auto it = trace.consensus.find(set);
      const double residue = mass - (it == trace.consensus.end() ? 0.0 : it->second);
      if (residue > 0.0) {
        trace.residues[i].emplace(set, residue);
        supports[i].emplace_back(set, residue);
      }
    }
  }

  // Compromise phase.
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double others = product_except(ops, i);
    if (others == 0.0) continue;
    for (const auto& [set, residue] : trace.residues[i]) trace.compromise[set] += residue * others;
  }
  if (ops.size() > 1) add_tuple_terms(supports, a, trace.compromise);

  trace.preliminary_uncertainty = product_all(ops);
  for (const auto& [set, mass] : trace.compromise) trace.compromise_total += mass;

  // Normalization phase.
  const auto full = domain.full_set();
  BeliefMap b = trace.consensus;
  double u = 0.0;
  if (trace.compromise_total > 0.0) {
    trace.eta = std::max(0.0, 1.0 - trace.consensus_total - trace.preliminary_uncertainty) / trace.compromise_total;
    u = trace.preliminary_uncertainty;
    for (const auto& [set, mass] : trace.compromise) {
      if (set == full) {
        u += trace.eta * mass;
      } else {
        b[set] += trace.eta * mass;
      }
    }
  } else {
    // Nothing to compromise on: the residual mass is uncertainty.
    u = 1.0 - trace.consensus_total;
  }

  return {Opinion(domain, std::move(b), u, a), std::move(trace)};
}

Opinion fuse_consensus_compromise(const std::vector<Opinion>& ops, const FusionOptions& opts) {
  return fuse_consensus_compromise_traced(ops, opts).first;
}

FusionOperator parse_operator(std::string_view tag) {
  if (tag == "cbf") return FusionOperator::Cumulative;
  if (tag == "ecbf") return FusionOperator::EpistemicCumulative;
  if (tag == "abf") return FusionOperator::Averaging;
  if (tag == "wbf") return FusionOperator::Weighted;
  if (tag == "bcf") return FusionOperator::Constraint;
  if (tag == "ccf") return FusionOperator::ConsensusCompromise;
  throw Error(Errc::UnknownOperator, "unknown fusion operator '" + std::string(tag) + "'");
}

std::string_view to_string(FusionOperator op) noexcept {
  switch (op) {
    case FusionOperator::Cumulative: return "cbf";
    case FusionOperator::EpistemicCumulative: return "ecbf";
    case FusionOperator::Averaging: return "abf";
    case FusionOperator::Weighted: return "wbf";
    case FusionOperator::Constraint: return "bcf";
    case FusionOperator::ConsensusCompromise: return "ccf";
  }
  return "unknown";
}

Opinion fuse(FusionOperator op, const std::vector<Opinion>& ops, const FusionOptions& opts) {
  switch (op) {
    case FusionOperator::Cumulative: return fuse_cumulative(ops, opts);
    case FusionOperator::EpistemicCumulative: return fuse_epistemic_cumulative(ops, opts);
    case FusionOperator::Averaging: return fuse_averaging(ops, opts);
    case FusionOperator::Weighted: return fuse_weighted(ops, opts);
    case FusionOperator::Constraint: return fuse_constraint(ops, opts);
    case FusionOperator::ConsensusCompromise: return fuse_consensus_compromise(ops, opts);
  }
  throw Error(Errc::UnknownOperator, "unknown fusion operator");
}

Opinion fuse(std::string_view tag, const std::vector<Opinion>& ops, const FusionOptions& opts) {
  return fuse(parse_operator(tag), ops, opts);
}

}  // namespace sl
