#pragma once

// Subjective-logic value types: domains, value sets, base rates and opinions.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sl {

enum class Errc {
  InvalidDomain,
  AdditivityViolation,
  NegativeMass,
  InvalidKey,
  BaseRateNotNormalized,
  ZeroBaseRateSet,
  EmptySet,
  DogmaticOpinion,
  DomainViolation,
  NoDogmaticOpinion,
  BadOverride,
  EmptyInput,
  DomainMismatch,
  HyperInputUnsupported,
  TotalConflict,
  BaseRateMismatch,
  UnknownOperator,
  DogmaticInput,
  AllVacuous,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Tolerance for sum-to-one checks on beliefs and base rates.
inline constexpr double kAdditivityTolerance = 1e-9;

/// Values in [-kClampTolerance, 0) are snapped to 0 on construction.
inline constexpr double kClampTolerance = 1e-9;

inline constexpr std::size_t kMaxDomainSize = 16;

/// A subset of domain positions, stored as a bit mask (bit i = position i).
class ValueSet {
 public:
  using mask_type = std::uint32_t;

  constexpr ValueSet() = default;
  constexpr explicit ValueSet(mask_type bits) : bits_(bits) {}

  static constexpr ValueSet singleton(std::size_t index) { return ValueSet(mask_type{1} << index); }
  static constexpr ValueSet full(std::size_t k) { return ValueSet((mask_type{1} << k) - 1); }

  constexpr mask_type bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(std::size_t index) const { return (bits_ >> index) & 1U; }
  constexpr bool is_subset_of(ValueSet other) const { return (bits_ & ~other.bits_) == 0; }
  int size() const;
  bool is_singleton() const { return size() == 1; }

  /// Position of the lowest member; meaningful only for non-empty sets.
  std::size_t first() const;

  /// Member positions in increasing order.
  std::vector<std::size_t> members() const;

  friend constexpr ValueSet operator&(ValueSet a, ValueSet b) { return ValueSet(a.bits_ & b.bits_); }
  friend constexpr ValueSet operator|(ValueSet a, ValueSet b) { return ValueSet(a.bits_ | b.bits_); }
  friend constexpr bool operator==(ValueSet, ValueSet) = default;
  friend constexpr auto operator<=>(ValueSet, ValueSet) = default;

 private:
  mask_type bits_ = 0;
};

/// Ordered set of distinct value labels (the frame of discernment).
class Domain {
 public:
  /// Throws Error(InvalidDomain) unless 2 <= size <= 16 and labels are distinct and non-empty.
  explicit Domain(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  ValueSet full_set() const { return ValueSet::full(size()); }

  /// True for non-empty proper subsets, i.e. members of the reduced power set.
  bool is_reduced_key(ValueSet set) const { return !set.empty() && set != full_set() && set.is_subset_of(full_set()); }

  /// Every member of the reduced power set, in increasing mask order.
  std::vector<ValueSet> reduced_powerset() const;

  std::string format(ValueSet set) const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Prior probability over the singleton values of a domain.
class BaseRate {
 public:
  /// Throws Error(BaseRateNotNormalized) if any entry is outside [0,1] or the sum is not 1.
  explicit BaseRate(std::vector<double> values);

  static BaseRate uniform(std::size_t k);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t index) const { return values_[index]; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const BaseRate&, const BaseRate&) = default;

 private:
  std::vector<double> values_;
};

bool approx_equal(const BaseRate& a, const BaseRate& b, double tolerance);

/// Sparse mass assignment keyed by value sets.
using BeliefMap = std::map<ValueSet, double>;

/// Additive extension of the base rate to a set: sum of its members' rates.
/// Throws Error(EmptySet) for the empty set.
double base_rate_of_set(const BaseRate& a, ValueSet set);

/// Base rate of y conditioned on the intersection C of `others`:
/// a(y & C) / a(C), and 0 when C or y & C is empty or a(C) is 0.
double relative_base_rate(const BaseRate& a, ValueSet y, const std::vector<ValueSet>& others);

/// Hyper opinion (b, u, a) over a domain. Multinomial opinions are the
/// instances whose belief support contains only singletons.
///
/// Construction validates additivity, non-negativity, key validity and the
/// base rate. Masses within kClampTolerance below zero are clamped to 0 and
/// zero entries are dropped, so u == 0 / u == 1 checks can be exact.
class Opinion {
 public:
  Opinion(Domain domain, BeliefMap belief, double uncertainty, BaseRate base_rate);

  /// Vacuous opinion (u = 1) with the given base rate.
  static Opinion vacuous(Domain domain, BaseRate base_rate);

  /// Multinomial opinion from one belief value per singleton.
  static Opinion multinomial(Domain domain, const std::vector<double>& singleton_belief, double uncertainty,
                             BaseRate base_rate);

  const Domain& domain() const { return domain_; }
  const BeliefMap& belief() const { return belief_; }
  double belief(ValueSet set) const;
  double uncertainty() const { return uncertainty_; }
  const BaseRate& base_rate() const { return base_rate_; }

  bool is_multinomial() const;
  bool is_dogmatic() const { return uncertainty_ == 0.0; }
  bool is_vacuous() const { return uncertainty_ == 1.0; }

 private:
  Domain domain_;
  BeliefMap belief_;
  double uncertainty_;
  BaseRate base_rate_;
};

/// Checks raw opinion components. Returns std::nullopt when they form a valid
/// opinion, otherwise the first violation found.
std::optional<Error> validate(const Domain& domain, const BeliefMap& belief, double uncertainty,
                              const std::vector<double>& base_rate);

/// Probability distribution over the singletons of a domain.
using ProjectedDistribution = std::vector<double>;

/// P(x) = b(x) + a(x) u. Throws Error(HyperInputUnsupported) for hyper opinions.
ProjectedDistribution project_probability(const Opinion& op);

/// P(x) = sum over support sets y containing x of a(x)/a(y) b(y), plus a(x) u.
/// Throws Error(ZeroBaseRateSet) if a support set has zero base rate.
ProjectedDistribution project_probability_hyper(const Opinion& op);

/// Raises u as far as possible while keeping the projected probability.
/// Singletons with a(x) = 0 do not constrain u.
Opinion uncertainty_maximize(const Opinion& op);

bool is_dogmatic(const Opinion& op);
bool is_vacuous(const Opinion& op);

/// Throws Error(DomainMismatch) unless every opinion shares the first one's domain,
/// and Error(EmptyInput) for an empty list.
void require_common_domain(const std::vector<Opinion>& ops);

}  // namespace sl
