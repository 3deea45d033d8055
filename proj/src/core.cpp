#include "sl/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace sl {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidDomain: return "InvalidDomain";
    case Errc::AdditivityViolation: return "AdditivityViolation";
    case Errc::NegativeMass: return "NegativeMass";
    case Errc::InvalidKey: return "InvalidKey";
    case Errc::BaseRateNotNormalized: return "BaseRateNotNormalized";
    case Errc::ZeroBaseRateSet: return "ZeroBaseRateSet";
    case Errc::EmptySet: return "EmptySet";
    case Errc::DogmaticOpinion: return "DogmaticOpinion";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::NoDogmaticOpinion: return "NoDogmaticOpinion";
    case Errc::BadOverride: return "BadOverride";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::HyperInputUnsupported: return "HyperInputUnsupported";
    case Errc::TotalConflict: return "TotalConflict";
    case Errc::BaseRateMismatch: return "BaseRateMismatch";
    case Errc::UnknownOperator: return "UnknownOperator";
    case Errc::DogmaticInput: return "DogmaticInput";
    case Errc::AllVacuous: return "AllVacuous";
  }
  return "Unknown";
}

namespace {

std::string describe(Errc code, const std::string& detail) {
  std::string text(to_string(code));
  if (!detail.empty()) {
    text += ": ";
    text += detail;
  }
  return text;
}

double clamp_mass(double value) {
  if (value < 0.0 && value >= -kClampTolerance) return 0.0;
  return value;
}

}  // namespace

Error::Error(Errc code, const std::string& detail) : std::runtime_error(describe(code, detail)), code_(code) {}

// ValueSet

int ValueSet::size() const { return std::popcount(bits_); }

std::size_t ValueSet::first() const { return static_cast<std::size_t>(std::countr_zero(bits_)); }

std::vector<std::size_t> ValueSet::members() const {
  std::vector<std::size_t> out;
  for (mask_type rest = bits_; rest != 0; rest &= rest - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
  }
  return out;
}

// Domain

Domain::Domain(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2 || labels_.size() > kMaxDomainSize) {
    throw Error(Errc::InvalidDomain, "domain must have between 2 and 16 values, got " + std::to_string(labels_.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw Error(Errc::InvalidDomain, "empty label");
    if (!seen.insert(label).second) throw Error(Errc::InvalidDomain, "duplicate label '" + label + "'");
  }
}

std::optional<std::size_t> Domain::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<ValueSet> Domain::reduced_powerset() const {
  std::vector<ValueSet> out;
  const auto full = full_set().bits();
  out.reserve(full - 1);
  for (ValueSet::mask_type bits = 1; bits < full; ++bits) out.emplace_back(bits);
  return out;
}

std::string Domain::format(ValueSet set) const {
  std::string out = "{";
  bool first = true;
  for (auto index : set.members()) {
    if (!first) out += ",";
    out += index < size() ? labels_[index] : "#" + std::to_string(index);
    first = false;
  }
  return out + "}";
}

// BaseRate

namespace {

std::optional<Error> check_base_rate(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      return Error(Errc::BaseRateNotNormalized, "base rate entry outside [0,1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kAdditivityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "base rate sums to " << sum;
    return Error(Errc::BaseRateNotNormalized, msg.str());
  }
  return std::nullopt;
}

}  // namespace

BaseRate::BaseRate(std::vector<double> values) : values_(std::move(values)) {
  for (auto& v : values_) v = clamp_mass(v);
  if (auto err = check_base_rate(values_)) throw *err;
}

BaseRate BaseRate::uniform(std::size_t k) { return BaseRate(std::vector<double>(k, 1.0 / static_cast<double>(k))); }

bool approx_equal(const BaseRate& a, const BaseRate& b, double tolerance) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tolerance) return false;
  }
  return true;
}

double base_rate_of_set(const BaseRate& a, ValueSet set) {
  if (set.empty()) throw Error(Errc::EmptySet, "base rate of the empty set");
  double sum = 0.0;
  for (auto index : set.members()) sum += a[index];
  return sum;
}

double relative_base_rate(const BaseRate& a, ValueSet y, const std::vector<ValueSet>& others) {
  if (others.empty()) return 0.0;
  ValueSet common = others.front();
  for (auto s : others) common = common & s;
  if (common.empty()) return 0.0;
  const ValueSet joint = y & common;
  if (joint.empty()) return 0.0;
  const double denom = base_rate_of_set(a, common);
  if (denom == 0.0) return 0.0;
  return base_rate_of_set(a, joint) / denom;
}

// Opinion

std::optional<Error> validate(const Domain& domain, const BeliefMap& belief, double uncertainty,
                              const std::vector<double>& base_rate) {
  if (base_rate.size() != domain.size()) {
    return Error(Errc::BaseRateNotNormalized, "base rate has " + std::to_string(base_rate.size()) +
                                                  " entries for a domain of " + std::to_string(domain.size()));
  }
  std::vector<double> rates = base_rate;
  for (auto& v : rates) v = clamp_mass(v);
  if (auto err = check_base_rate(rates)) return err;

  const double u = clamp_mass(uncertainty);
  if (!std::isfinite(u)) return Error(Errc::AdditivityViolation, "uncertainty is not finite");
  if (u < 0.0) return Error(Errc::NegativeMass, "negative uncertainty");

  double sum = u;
  for (const auto& [set, mass] : belief) {
    if (!domain.is_reduced_key(set)) {
      return Error(Errc::InvalidKey, "belief key " + domain.format(set) + " is not a non-empty proper subset");
    }
    const double m = clamp_mass(mass);
    if (!std::isfinite(m)) return Error(Errc::AdditivityViolation, "belief mass is not finite");
    if (m < 0.0) return Error(Errc::NegativeMass, "negative belief on " + domain.format(set));
    sum += m;
  }
  if (std::abs(sum - 1.0) > kAdditivityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "belief plus uncertainty sums to " << sum;
    return Error(Errc::AdditivityViolation, msg.str());
  }
  return std::nullopt;
}

Opinion::Opinion(Domain domain, BeliefMap belief, double uncertainty, BaseRate base_rate)
    : domain_(std::move(domain)), uncertainty_(uncertainty), base_rate_(std::move(base_rate)) {
  if (auto err = validate(domain_, belief, uncertainty, base_rate_.values())) throw *err;
  uncertainty_ = std::min(clamp_mass(uncertainty_), 1.0);
  for (const auto& [set, mass] : belief) {
    const double m = clamp_mass(mass);
    if (m > 0.0) belief_.emplace(set, m);
  }
}

Opinion Opinion::vacuous(Domain domain, BaseRate base_rate) {
  return Opinion(std::move(domain), {}, 1.0, std::move(base_rate));
}

Opinion Opinion::multinomial(Domain domain, const std::vector<double>& singleton_belief, double uncertainty,
                             BaseRate base_rate) {
  if (singleton_belief.size() != domain.size()) {
    throw Error(Errc::InvalidKey, "expected one belief value per domain value");
  }
  BeliefMap belief;
  for (std::size_t i = 0; i < singleton_belief.size(); ++i) belief.emplace(ValueSet::singleton(i), singleton_belief[i]);
  return Opinion(std::move(domain), std::move(belief), uncertainty, std::move(base_rate));
}

double Opinion::belief(ValueSet set) const {
  auto it = belief_.find(set);
  return it == belief_.end() ? 0.0 : it->second;
}

bool Opinion::is_multinomial() const {
  return std::all_of(belief_.begin(), belief_.end(), [](const auto& kv) { return kv.first.is_singleton(); });
}

bool is_dogmatic(const Opinion& op) { return op.is_dogmatic(); }
bool is_vacuous(const Opinion& op) { return op.is_vacuous(); }

ProjectedDistribution project_probability(const Opinion& op) {
  if (!op.is_multinomial()) throw Error(Errc::HyperInputUnsupported, "projection of a hyper opinion");
  const auto k = op.domain().size();
  ProjectedDistribution p(k);
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = op.belief(ValueSet::singleton(i)) + op.base_rate()[i] * op.uncertainty();
  }
  return p;
}

ProjectedDistribution project_probability_hyper(const Opinion& op) {
  const auto k = op.domain().size();
  const auto& a = op.base_rate();
  ProjectedDistribution p(k);
  for (std::size_t i = 0; i < k; ++i) p[i] = a[i] * op.uncertainty();
  for (const auto& [set, mass] : op.belief()) {
    const double a_set = base_rate_of_set(a, set);
    if (a_set == 0.0) throw Error(Errc::ZeroBaseRateSet, op.domain().format(set) + " has zero base rate");
    for (auto i : set.members()) p[i] += a[i] / a_set * mass;
  }
  return p;
}

Opinion uncertainty_maximize(const Opinion& op) {
  const auto p = project_probability(op);
  const auto& a = op.base_rate();
  const auto k = op.domain().size();

  double u = std::numeric_limits<double>::infinity();
  std::size_t arg = k;
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i] <= 0.0) continue;
    const double ratio = p[i] / a[i];
    if (ratio < u) {
      u = ratio;
      arg = i;
    }
  }
  if (arg == k) throw Error(Errc::BaseRateNotNormalized, "all base rates are zero");
  if (u >= 1.0) return Opinion::vacuous(op.domain(), a);

  std::vector<double> belief(k);
  for (std::size_t i = 0; i < k; ++i) belief[i] = i == arg ? 0.0 : std::max(0.0, p[i] - a[i] * u);
  return Opinion::multinomial(op.domain(), belief, u, a);
}

void require_common_domain(const std::vector<Opinion>& ops) {
  if (ops.empty()) throw Error(Errc::EmptyInput, "no opinions to fuse");
  const auto& domain = ops.front().domain();
  for (const auto& op : ops) {
    if (op.domain() != domain) throw Error(Errc::DomainMismatch, "opinions are held over different domains");
  }
}

}  // namespace sl
