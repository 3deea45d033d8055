#include "sl/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "sl/dirichlet.hpp"

namespace sl::verification {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound).
  std::size_t below(std::size_t bound) { return static_cast<std::size_t>(uniform() * static_cast<double>(bound)); }

 private:
  std::mt19937_64 engine_;
};

std::vector<double> random_simplex(Draw& draw, std::size_t n) {
  std::vector<double> w(n);
  for (auto& v : w) v = 0.05 + draw.uniform();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

std::vector<Opinion> generate_opinions(const RandomOpinionSpec& spec) {
  Domain domain = [&] {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < spec.k; ++i) labels.push_back("x" + std::to_string(i + 1));
    return Domain(std::move(labels));
  }();

  std::vector<ValueSet> candidates;
  if (spec.hyper) {
    candidates = domain.reduced_powerset();
  } else {
    for (std::size_t i = 0; i < spec.k; ++i) candidates.push_back(ValueSet::singleton(i));
  }
  const std::size_t max_support =
      spec.hyper ? std::min(candidates.size(), std::max<std::size_t>(1, spec.max_hyper_support)) : candidates.size();

  Draw draw(spec.seed);
  std::vector<Opinion> out;
  out.reserve(spec.n_actors);
  for (std::size_t actor = 0; actor < spec.n_actors; ++actor) {
    const double kind = draw.uniform();
    double u;
    if (kind < spec.dogmatic_probability) {
      u = 0.0;
    } else if (kind < spec.dogmatic_probability + spec.vacuous_probability) {
      u = 1.0;
    } else {
      u = 0.02 + 0.96 * draw.uniform();
    }

    BaseRate a = spec.distinct_base_rates ? BaseRate(random_simplex(draw, spec.k)) : BaseRate::uniform(spec.k);

    BeliefMap belief;
    if (u < 1.0) {
      // Partial Fisher-Yates to pick a random support.
      auto pool = candidates;
      const std::size_t size = 1 + draw.below(max_support);
      for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + draw.below(pool.size() - i)]);
      const auto masses = random_simplex(draw, size);
      for (std::size_t i = 0; i < size; ++i) belief.emplace(pool[i], masses[i] * (1.0 - u));
    }
    out.emplace_back(domain, std::move(belief), u, std::move(a));
  }
  return out;
}

namespace {

void require_finite_evidence(const std::vector<Opinion>& ops) {
  require_common_domain(ops);
  for (const auto& op : ops) {
    if (op.uncertainty() == 0.0) throw Error(Errc::DogmaticInput, "oracle needs finite evidence");
  }
}

BaseRate oracle_base_rate(const std::vector<Opinion>& ops) {
  const auto k = ops.front().domain().size();
  std::vector<double> weighted(k, 0.0), plain(k, 0.0);
  double confidence = 0.0;
  for (const auto& op : ops) {
    confidence += 1.0 - op.uncertainty();
    for (std::size_t i = 0; i < k; ++i) {
      weighted[i] += op.base_rate()[i] * (1.0 - op.uncertainty());
      plain[i] += op.base_rate()[i];
    }
  }
  if (confidence > 0.0) {
    for (auto& v : weighted) v /= confidence;
    return BaseRate(weighted);
  }
  for (auto& v : plain) v /= static_cast<double>(ops.size());
  return BaseRate(plain);
}

// Maps the weighted evidence sum back to an opinion with the oracle base rate.
Opinion combine_evidence(const std::vector<Opinion>& ops, const std::vector<double>& weights) {
  BeliefMap total;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto ev = opinion_to_evidence(ops[i], kDefaultPriorWeight);
    for (const auto& [set, r] : ev.evidence()) total[set] += r * weights[i];
  }
  const auto base_rate = oracle_base_rate(ops);
  const auto fused = evidence_to_opinion(EvidenceRecord(ops.front().domain(), std::move(total), base_rate));
  return fused;
}

}  // namespace

Opinion cbf_evidence_oracle(const std::vector<Opinion>& ops) {
  require_finite_evidence(ops);
  return combine_evidence(ops, std::vector<double>(ops.size(), 1.0));
}

Opinion abf_evidence_oracle(const std::vector<Opinion>& ops) {
  require_finite_evidence(ops);
  return combine_evidence(ops, std::vector<double>(ops.size(), 1.0 / static_cast<double>(ops.size())));
}

Opinion wbf_evidence_oracle(const std::vector<Opinion>& ops) {
  require_finite_evidence(ops);
  double confidence = 0.0;
  for (const auto& op : ops) confidence += 1.0 - op.uncertainty();
  if (confidence <= 0.0) throw Error(Errc::AllVacuous, "no input carries evidence");
  std::vector<double> weights;
  for (const auto& op : ops) weights.push_back((1.0 - op.uncertainty()) / confidence);
  return combine_evidence(ops, weights);
}

Opinion ccf_binary_oracle(const Opinion& first, const Opinion& second) {
  require_common_domain({first, second});
  const auto& a = first.base_rate();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - second.base_rate()[i]) > 1e-12) {
      throw Error(Errc::BaseRateMismatch, "binary consensus & compromise needs a shared base rate");
    }
  }

  const auto& domain = first.domain();
  const auto keys = domain.reduced_powerset();
  const auto full = domain.full_set();
  const double uA = first.uncertainty();
  const double uB = second.uncertainty();

  auto rate = [&](ValueSet s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (s.contains(i)) sum += a[i];
    }
    return sum;
  };
  // a(y | z) = a(y & z) / a(z)
  auto conditional = [&](ValueSet y, ValueSet z) {
    const double az = rate(z);
    return az == 0.0 ? 0.0 : rate(y & z) / az;
  };

  BeliefMap cons, resA, resB;
  double cons_total = 0.0;
  for (auto x : keys) {
    const double c = std::min(first.belief(x), second.belief(x));
    cons[x] = c;
    cons_total += c;
    resA[x] = first.belief(x) - c;
    resB[x] = second.belief(x) - c;
  }

  BeliefMap comp;
  for (auto x : keys) comp[x] = resA[x] * uB + resB[x] * uA;
  comp[full] = 0.0;
  for (auto y1 : keys) {
    for (auto y2 : keys) {
      const double product = resA[y1] * resB[y2];
      if (product == 0.0) continue;
      const auto meet = y1 & y2;
      const auto join = y1 | y2;
      if (meet.empty()) {
        comp[join] += product;
      } else {
        const double relative = conditional(y1, y2) * conditional(y2, y1);
        comp[meet] += product * relative;
        comp[join] += (1.0 - relative) * product;
      }
    }
  }

  const double u_pre = uA * uB;
  double comp_total = 0.0;
  for (const auto& [x, m] : comp) comp_total += m;

  BeliefMap b;
  double u;
  if (comp_total > 0.0) {
    const double eta = (1.0 - cons_total - u_pre) / comp_total;
    u = u_pre + eta * comp[full];
    for (auto x : keys) b[x] = cons[x] + eta * comp[x];
  } else {
    u = 1.0 - cons_total;
    b = cons;
  }
  return Opinion(domain, std::move(b), u, a);
}

double max_abs_difference(const Opinion& a, const Opinion& b) {
  double diff = std::abs(a.uncertainty() - b.uncertainty());
  std::set<ValueSet> keys;
  for (const auto& [set, m] : a.belief()) keys.insert(set);
  for (const auto& [set, m] : b.belief()) keys.insert(set);
  for (auto set : keys) diff = std::max(diff, std::abs(a.belief(set) - b.belief(set)));
  const auto n = std::min(a.base_rate().size(), b.base_rate().size());
  for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(a.base_rate()[i] - b.base_rate()[i]));
  if (a.base_rate().size() != b.base_rate().size()) diff = std::max(diff, 1.0);
  return diff;
}

}  // namespace sl::verification
