#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sl/fusion.hpp"
#include "sl/verification.hpp"

using namespace sl;
using verification::max_abs_difference;

namespace {

const Domain kBinary({"x", "not_x"});
const Domain kTriple({"x1", "x2", "x3"});
const auto kX = ValueSet::singleton(0);
const auto kNotX = ValueSet::singleton(1);
const auto kHalf = BaseRate::uniform(2);

std::vector<Opinion> table_inputs() {
  return {
      Opinion::multinomial(kBinary, {0.10, 0.30}, 0.60, kHalf),
      Opinion::multinomial(kBinary, {0.40, 0.20}, 0.40, kHalf),
      Opinion::multinomial(kBinary, {0.70, 0.10}, 0.20, kHalf),
  };
}

void check_binary(const Opinion& op, double bx, double bnx, double u, double tolerance) {
  CHECK(std::abs(op.belief(kX) - bx) <= tolerance);
  CHECK(std::abs(op.belief(kNotX) - bnx) <= tolerance);
  CHECK(std::abs(op.uncertainty() - u) <= tolerance);
}

Errc error_code(auto&& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::InvalidDomain;
}

}  // namespace

// Products of the other actors' uncertainties for the table inputs:
// A1 -> 0.4 * 0.2 = 0.08, A2 -> 0.12, A3 -> 0.24; all three: 0.048.

TEST_CASE("cumulative fusion of the table inputs") {
  // D = 0.44 - 2 * 0.048 = 0.344
  const auto fused = fuse_cumulative(table_inputs());
  check_binary(fused, 0.224 / 0.344, 0.072 / 0.344, 0.048 / 0.344, 1e-12);
  check_binary(fused, 0.651, 0.209, 0.140, 1e-3);
  CHECK(fused.base_rate() == kHalf);
}

TEST_CASE("averaging fusion of the table inputs") {
  const auto fused = fuse_averaging(table_inputs());
  check_binary(fused, 0.224 / 0.44, 0.072 / 0.44, 0.144 / 0.44, 1e-12);
  check_binary(fused, 0.509, 0.164, 0.327, 1e-3);
}

TEST_CASE("epistemic cumulative fusion of the table inputs") {
  // P(x) = 0.248/0.344, P(not x) = 0.096/0.344, u = P(not x)/0.5.
  const auto fused = fuse_epistemic_cumulative(table_inputs());
  check_binary(fused, 0.152 / 0.344, 0.0, 0.192 / 0.344, 1e-12);
  check_binary(fused, 0.442, 0.0, 0.558, 1e-3);
  CHECK(project_probability(fused)[0] == doctest::Approx(0.721).epsilon(1e-3));
  CHECK(std::abs(project_probability(fused)[0] - project_probability(fuse_cumulative(table_inputs()))[0]) <= 1e-12);
}

TEST_CASE("weighted fusion of the table inputs") {
  // Denominator 0.44 - 3 * 0.048 = 0.296.
  const auto fused = fuse_weighted(table_inputs());
  check_binary(fused, 0.1664 / 0.296, 0.0432 / 0.296, 0.0864 / 0.296, 1e-12);
  check_binary(fused, 0.562, 0.146, 0.292, 1e-3);
}

TEST_CASE("constraint fusion of the table inputs") {
  // A1 (+) A2 = (0.32, 0.30, 0.24) / 0.86; combined with A3 the unnormalized masses are
  // (0.456, 0.114, 0.048) / 0.86 with 1 - K = 0.618 / 0.86.
  const auto fused = fuse_constraint(table_inputs());
  check_binary(fused, 0.456 / 0.618, 0.114 / 0.618, 0.048 / 0.618, 1e-12);
  check_binary(fused, 0.738, 0.184, 0.078, 1e-3);
}

TEST_CASE("consensus & compromise fusion of the table inputs") {
  const auto [fused, trace] = fuse_consensus_compromise_traced(table_inputs());
  check_binary(fused, 0.62875, 0.18225, 0.189, 1e-12);
  check_binary(fused, 0.629, 0.182, 0.189, 1e-3);

  CHECK(trace.consensus.at(kX) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(trace.consensus.at(kNotX) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(trace.consensus_total == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(trace.preliminary_uncertainty == doctest::Approx(0.048).epsilon(1e-14));
  CHECK(trace.compromise.at(kX) == doctest::Approx(0.18).epsilon(1e-14));
  CHECK(trace.compromise.at(kNotX) == doctest::Approx(0.028).epsilon(1e-14));
  CHECK(trace.compromise.at(kBinary.full_set()) == doctest::Approx(0.048).epsilon(1e-14));
  CHECK(trace.eta == doctest::Approx(2.9375).epsilon(1e-14));
  REQUIRE(trace.residues.size() == 3);
  CHECK(trace.residues[0].count(kX) == 0);
  CHECK(trace.residues[2].at(kX) == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("projected probabilities of the fused table columns") {
  const auto inputs = table_inputs();
  const std::pair<FusionOperator, double> expected[] = {
      {FusionOperator::Cumulative, 0.721},  {FusionOperator::EpistemicCumulative, 0.721},
      {FusionOperator::Constraint, 0.777},  {FusionOperator::Averaging, 0.673},
      {FusionOperator::Weighted, 0.708},    {FusionOperator::ConsensusCompromise, 0.723},
  };
  for (const auto& [op, p] : expected) {
    INFO(to_string(op));
    CHECK(std::abs(project_probability(fuse(op, inputs))[0] - p) <= 1e-3);
  }
}

TEST_CASE("cumulative fusion equals evidence addition") {
  // r = (2,0) + (0,2) = (2,2) maps back to thirds.
  const auto fused = fuse_cumulative(
      {Opinion::multinomial(kBinary, {0.5, 0.0}, 0.5, kHalf), Opinion::multinomial(kBinary, {0.0, 0.5}, 0.5, kHalf)});
  check_binary(fused, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1e-14);
}

TEST_CASE("vacuous inputs") {
  const std::vector<Opinion> vacuous{Opinion::vacuous(kBinary, BaseRate({0.2, 0.8})),
                                     Opinion::vacuous(kBinary, BaseRate({0.6, 0.4})),
                                     Opinion::vacuous(kBinary, BaseRate({0.1, 0.9}))};
  for (auto op : {FusionOperator::Cumulative, FusionOperator::EpistemicCumulative, FusionOperator::Averaging,
                  FusionOperator::Weighted, FusionOperator::Constraint}) {
    INFO(to_string(op));
    const auto fused = fuse(op, vacuous);
    CHECK(fused.is_vacuous());
    CHECK(fused.belief().empty());
    CHECK(fused.base_rate()[0] == doctest::Approx(0.3).epsilon(1e-14));
  }
}

TEST_CASE("weighted fusion with a dogmatic input") {
  const auto fused = fuse_weighted({Opinion::multinomial(kBinary, {0.2, 0.3}, 0.5, kHalf),
                                    Opinion::multinomial(kBinary, {1.0, 0.0}, 0.0, kHalf),
                                    Opinion::multinomial(kBinary, {0.0, 0.9}, 0.1, kHalf)});
  check_binary(fused, 1.0, 0.0, 0.0, 0.0);
  CHECK(fused.is_dogmatic());
}

TEST_CASE("dogmatic inputs among non-dogmatic ones do not divide by zero") {
  const std::vector<Opinion> ops{Opinion::multinomial(kBinary, {1.0, 0.0}, 0.0, kHalf),
                                 Opinion::multinomial(kBinary, {0.3, 0.3}, 0.4, kHalf),
                                 Opinion::multinomial(kBinary, {0.2, 0.8}, 0.0, kHalf)};
  for (auto op : {FusionOperator::Cumulative, FusionOperator::Averaging, FusionOperator::Weighted}) {
    INFO(to_string(op));
    const auto fused = fuse(op, ops);
    check_binary(fused, 0.6, 0.4, 0.0, 1e-15);
  }

  SUBCASE("weights override") {
    FusionOptions opts;
    opts.dogmatic_weights = DogmaticLimit{{{0, 1.0}, {2, 3.0}}};
    check_binary(fuse_cumulative(ops, opts), 0.4, 0.6, 0.0, 1e-15);
    check_binary(fuse_weighted(ops, opts), 0.4, 0.6, 0.0, 1e-15);
  }
}

TEST_CASE("weighted fusion dogmatic base rates follow the weights") {
  const std::vector<Opinion> ops{Opinion::multinomial(kBinary, {1.0, 0.0}, 0.0, BaseRate({0.2, 0.8})),
                                 Opinion::multinomial(kBinary, {0.5, 0.5}, 0.0, BaseRate({0.6, 0.4})),
                                 Opinion::multinomial(kBinary, {0.3, 0.3}, 0.4, BaseRate({0.9, 0.1}))};
  const auto fused = fuse_weighted(ops);
  CHECK(fused.base_rate()[0] == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("identical inputs") {
  const auto op = Opinion::multinomial(kTriple, {0.2, 0.1, 0.3}, 0.4, BaseRate({0.2, 0.3, 0.5}));
  const std::vector<Opinion> copies(4, op);
  CHECK(max_abs_difference(fuse_averaging(copies), op) <= 1e-12);
  CHECK(max_abs_difference(fuse_weighted(copies), op) <= 1e-12);
  CHECK(max_abs_difference(fuse_consensus_compromise(copies), op) <= 1e-12);
  // Cumulative fusion counts the same evidence four times.
  CHECK(fuse_cumulative(copies).uncertainty() < op.uncertainty());
}

TEST_CASE("single input") {
  const Opinion op(kTriple, {{ValueSet(0b011), 0.35}, {ValueSet::singleton(2), 0.25}}, 0.4, BaseRate({0.2, 0.3, 0.5}));
  for (auto tag : {"cbf", "abf", "wbf", "bcf", "ccf"}) {
    INFO(tag);
    CHECK(max_abs_difference(fuse(tag, {op}), op) <= 1e-12);
  }
}

TEST_CASE("dempster_combine") {
  const auto a1 = MassFunction::from_opinion(table_inputs()[0]);
  const auto a2 = MassFunction::from_opinion(table_inputs()[1]);
  const auto [m, k] = dempster_combine(a1, a2);
  CHECK(k == doctest::Approx(0.14).epsilon(1e-14));
  CHECK(m.mass(kX) == doctest::Approx(0.32 / 0.86).epsilon(1e-14));
  CHECK(m.mass(kNotX) == doctest::Approx(0.30 / 0.86).epsilon(1e-14));
  CHECK(m.mass(kBinary.full_set()) == doctest::Approx(0.24 / 0.86).epsilon(1e-14));
  CHECK(std::abs(m.mass(kX) - 0.3721) <= 1e-4);
  CHECK(std::abs(m.mass(kNotX) - 0.3488) <= 1e-4);
  CHECK(std::abs(m.mass(kBinary.full_set()) - 0.2791) <= 1e-4);

  SUBCASE("vacuous mass is neutral") {
    const MassFunction vacuous(kTriple, {{kTriple.full_set(), 1.0}});
    const MassFunction any(kTriple, {{ValueSet(0b011), 0.5}, {ValueSet::singleton(2), 0.2}, {kTriple.full_set(), 0.3}});
    const auto result = dempster_combine(any, vacuous);
    CHECK(result.conflict == 0.0);
    CHECK(result.combined.mass() == any.mass());
  }
  SUBCASE("total conflict") {
    const MassFunction sure_x(kBinary, {{kX, 1.0}});
    const MassFunction sure_not_x(kBinary, {{kNotX, 1.0}});
    CHECK(error_code([&] { dempster_combine(sure_x, sure_not_x); }) == Errc::TotalConflict);
  }
  SUBCASE("mass function validation") {
    CHECK_THROWS_AS(MassFunction(kBinary, {{kX, 0.5}}), Error);
    CHECK_THROWS_AS(MassFunction(kBinary, {{ValueSet{}, 1.0}}), Error);
  }
}

TEST_CASE("constraint fusion base rates") {
  const auto fused = fuse_constraint({Opinion::multinomial(kBinary, {0.5, 0.0}, 0.5, BaseRate({0.2, 0.8})),
                                      Opinion::multinomial(kBinary, {0.5, 0.0}, 0.5, BaseRate({0.6, 0.4}))});
  CHECK(fused.base_rate()[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(fused.base_rate()[1] == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("constraint fusion total conflict") {
  CHECK(error_code([] {
          fuse("bcf", {Opinion::multinomial(kBinary, {1.0, 0.0}, 0.0, kHalf),
                       Opinion::multinomial(kBinary, {0.0, 1.0}, 0.0, kHalf)});
        }) == Errc::TotalConflict);
}

TEST_CASE("consensus & compromise builds vague belief") {
  const auto a = BaseRate::uniform(3);
  SUBCASE("disjoint singletons compromise on their union") {
    const auto fused = fuse_consensus_compromise({Opinion::multinomial(kTriple, {0.6, 0.0, 0.0}, 0.4, a),
                                                  Opinion::multinomial(kTriple, {0.0, 0.6, 0.0}, 0.4, a)});
    CHECK(fused.belief(ValueSet::singleton(0)) == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(fused.belief(ValueSet::singleton(1)) == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(fused.belief(ValueSet(0b011)) == doctest::Approx(0.36).epsilon(1e-14));
    CHECK(fused.uncertainty() == doctest::Approx(0.16).epsilon(1e-14));
  }
  SUBCASE("nested sets split by relative base rate") {
    // Tuple ({x1,x2}, {x1}) has relative base rates 1 and 1/2.
    const auto fused = fuse_consensus_compromise(
        {Opinion(kTriple, {{ValueSet(0b011), 0.5}}, 0.5, a), Opinion(kTriple, {{ValueSet::singleton(0), 0.5}}, 0.5, a)});
    CHECK(fused.belief(ValueSet::singleton(0)) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(fused.belief(ValueSet(0b011)) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(fused.uncertainty() == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("two conflicting dogmatic opinions become vacuous") {
    const auto fused = fuse_consensus_compromise({Opinion::multinomial(kBinary, {1.0, 0.0}, 0.0, kHalf),
                                                  Opinion::multinomial(kBinary, {0.0, 1.0}, 0.0, kHalf)});
    CHECK(fused.is_vacuous());
  }
  SUBCASE("base rates must agree") {
    CHECK(error_code([&] {
            fuse_consensus_compromise({Opinion::vacuous(kBinary, kHalf), Opinion::vacuous(kBinary, BaseRate({0.3, 0.7}))});
          }) == Errc::BaseRateMismatch);
  }
}

TEST_CASE("input errors") {
  const auto hyper = Opinion(kTriple, {{ValueSet(0b011), 0.5}}, 0.5, BaseRate::uniform(3));
  const auto binary = Opinion::vacuous(kBinary, kHalf);
  for (auto tag : {"cbf", "ecbf", "abf", "wbf", "bcf", "ccf"}) {
    INFO(tag);
    CHECK(error_code([&] { fuse(tag, {}); }) == Errc::EmptyInput);
    CHECK(error_code([&] { fuse(tag, {binary, hyper}); }) == Errc::DomainMismatch);
  }
  CHECK(error_code([&] { fuse("ecbf", {hyper}); }) == Errc::HyperInputUnsupported);
  CHECK(error_code([&] { fuse("median", {binary}); }) == Errc::UnknownOperator);
  CHECK(parse_operator("wbf") == FusionOperator::Weighted);
  CHECK(to_string(FusionOperator::ConsensusCompromise) == "ccf");
}

TEST_CASE("consensus & compromise keeps consensus belief") {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    verification::RandomOpinionSpec spec;
    spec.seed = seed;
    spec.k = 2 + seed % 3;
    spec.n_actors = 1 + seed % 4;
    spec.hyper = seed % 2 == 1;
    spec.dogmatic_probability = 0.1;
    spec.vacuous_probability = 0.1;
    const auto [fused, trace] = fuse_consensus_compromise_traced(verification::generate_opinions(spec));
    INFO("seed " << seed);
    CHECK(trace.eta >= 0.0);
    for (const auto& [set, c] : trace.consensus) CHECK(fused.belief(set) >= c);
    for (const auto& [set, m] : trace.compromise) CHECK(m >= 0.0);
  }
}
