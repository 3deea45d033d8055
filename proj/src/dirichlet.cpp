#include "sl/dirichlet.hpp"

#include <cmath>
#include <numeric>

namespace sl {

EvidenceRecord::EvidenceRecord(Domain domain, BeliefMap evidence, BaseRate base_rate, double prior_weight)
    : domain_(std::move(domain)), base_rate_(std::move(base_rate)), prior_weight_(prior_weight) {
  if (base_rate_.size() != domain_.size()) {
    throw Error(Errc::BaseRateNotNormalized, "base rate size does not match the domain");
  }
  if (!std::isfinite(prior_weight_) || prior_weight_ <= 0.0) {
    throw Error(Errc::DomainViolation, "prior weight must be positive");
  }
  for (const auto& [set, r] : evidence) {
    if (!domain_.is_reduced_key(set)) {
      throw Error(Errc::InvalidKey, "evidence key " + domain_.format(set) + " is not a non-empty proper subset");
    }
    if (!std::isfinite(r) || r < 0.0) throw Error(Errc::NegativeMass, "evidence must be finite and non-negative");
    if (r > 0.0) evidence_.emplace(set, r);
  }
}

double EvidenceRecord::evidence(ValueSet set) const {
  auto it = evidence_.find(set);
  return it == evidence_.end() ? 0.0 : it->second;
}

double EvidenceRecord::total() const {
  double s = 0.0;
  for (const auto& [set, r] : evidence_) s += r;
  return s;
}

EvidenceRecord opinion_to_evidence(const Opinion& op, double prior_weight) {
  if (op.is_dogmatic()) throw Error(Errc::DogmaticOpinion, "a dogmatic opinion has infinite evidence");
  BeliefMap r;
  for (const auto& [set, b] : op.belief()) r.emplace(set, prior_weight * b / op.uncertainty());
  return EvidenceRecord(op.domain(), std::move(r), op.base_rate(), prior_weight);
}

Opinion evidence_to_opinion(const EvidenceRecord& ev) {
  const double strength = ev.prior_weight() + ev.total();
  BeliefMap b;
  for (const auto& [set, r] : ev.evidence()) b.emplace(set, r / strength);
  return Opinion(ev.domain(), std::move(b), ev.prior_weight() / strength, ev.base_rate());
}

namespace {

struct Term {
  double alpha;
  double p;
};

// Gamma(sum alpha) / prod Gamma(alpha) * prod p^(alpha - 1), evaluated in log space.
// Terms with zero strength carry no mass: they drop out, and the density is 0
// wherever such a term has p > 0.
double dirichlet_density(const std::vector<Term>& terms) {
  double alpha_sum = 0.0;
  double log_density = 0.0;
  for (const auto& t : terms) {
    if (t.alpha < 0.0) throw Error(Errc::DomainViolation, "negative Dirichlet strength");
    if (t.p < 0.0) throw Error(Errc::DomainViolation, "negative probability");
    if (t.alpha == 0.0) {
      if (t.p > 0.0) return 0.0;
      continue;
    }
    if (t.p == 0.0) {
      if (t.alpha < 1.0) throw Error(Errc::DomainViolation, "zero probability where the strength is below 1");
      if (t.alpha > 1.0) return 0.0;
    } else {
      log_density += (t.alpha - 1.0) * std::log(t.p);
    }
    alpha_sum += t.alpha;
    log_density -= std::lgamma(t.alpha);
  }
  log_density += std::lgamma(alpha_sum);
  return std::exp(log_density);
}

void require_distribution(double sum) {
  if (std::abs(sum - 1.0) > kAdditivityTolerance) {
    throw Error(Errc::DomainViolation, "argument is not a probability distribution");
  }
}

}  // namespace

double dirichlet_pdf(const EvidenceRecord& ev, const ProjectedDistribution& p) {
  const auto k = ev.domain().size();
  if (p.size() != k) throw Error(Errc::DomainViolation, "distribution size does not match the domain");
  for (const auto& [set, r] : ev.evidence()) {
    if (!set.is_singleton()) throw Error(Errc::HyperInputUnsupported, "composite evidence in a Dirichlet PDF");
  }
  require_distribution(std::accumulate(p.begin(), p.end(), 0.0));

  std::vector<Term> terms;
  terms.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto x = ValueSet::singleton(i);
    terms.push_back({ev.evidence(x) + ev.base_rate()[i] * ev.prior_weight(), p[i]});
  }
  return dirichlet_density(terms);
}

double hyper_dirichlet_pdf(const EvidenceRecord& ev, const BeliefMap& p) {
  double sum = 0.0;
  for (const auto& [set, value] : p) {
    if (!ev.domain().is_reduced_key(set)) throw Error(Errc::InvalidKey, "distribution key outside the reduced power set");
    sum += value;
  }
  require_distribution(sum);

  // The prior weight is spread over singletons only, so the total strength is
  // W + S as in the opinion mapping; composite strengths are their evidence.
  std::vector<Term> terms;
  for (auto x : ev.domain().reduced_powerset()) {
    auto it = p.find(x);
    const double px = it == p.end() ? 0.0 : it->second;
    const double prior = x.is_singleton() ? ev.base_rate()[x.first()] * ev.prior_weight() : 0.0;
    terms.push_back({ev.evidence(x) + prior, px});
  }
  return dirichlet_density(terms);
}

DogmaticLimit dogmatic_weights(const std::vector<Opinion>& ops, const std::optional<DogmaticLimit>& override_weights) {
  std::vector<std::size_t> dogmatic;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].is_dogmatic()) dogmatic.push_back(i);
  }
  if (dogmatic.empty()) throw Error(Errc::NoDogmaticOpinion, "no input has zero uncertainty");

  DogmaticLimit limit;
  if (!override_weights) {
    const double w = 1.0 / static_cast<double>(dogmatic.size());
    for (auto i : dogmatic) limit.weights.emplace(i, w);
    return limit;
  }

  double total = 0.0;
  for (auto i : dogmatic) {
    auto it = override_weights->weights.find(i);
    const double w = it == override_weights->weights.end() ? 0.0 : it->second;
    if (!std::isfinite(w) || w < 0.0) throw Error(Errc::BadOverride, "dogmatic weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw Error(Errc::BadOverride, "override weights on the dogmatic inputs sum to zero");
  for (auto i : dogmatic) {
    auto it = override_weights->weights.find(i);
    const double w = it == override_weights->weights.end() ? 0.0 : it->second;
    limit.weights.emplace(i, w / total);
  }
  return limit;
}

}  // namespace sl
