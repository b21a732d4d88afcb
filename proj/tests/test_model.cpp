#include "doctest.h"

#include <algorithm>

#include "test_support.hpp"
#include "wbx/model.hpp"
#include "wbx/scenario_io.hpp"

using namespace wbx;

namespace {

bool has_code(const std::vector<Violation>& v, ErrorCode code) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

}  // namespace

TEST_CASE("validate_scenario accepts the symmetric two-file case") {
  CHECK(validate_scenario(testing::uniform({10, 10})).empty());
  CHECK_NOTHROW(require_valid(testing::uniform({10, 10})));
}

TEST_CASE("validate_scenario reports every violation") {
  SUBCASE("singleton group") {
    auto v = validate_scenario(testing::uniform({1, 3}));
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == ErrorCode::kGroupTooSmall);
  }
  SUBCASE("zero transmission cost") {
    Scenario s(2, {{{1, 0}, FileId{0}}, {{1, 1}, FileId{0}}, {{1, 1}, FileId{1}},
                   {{1, 1}, FileId{1}}});
    auto v = validate_scenario(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == ErrorCode::kNonpositiveCost);
  }
  SUBCASE("one file and empty groups at once") {
    Scenario s(1, {{{-1, 1}, FileId{0}}, {{1, 1}, FileId{3}}});
    auto v = validate_scenario(s);
    CHECK(has_code(v, ErrorCode::kTooFewFiles));
    CHECK(has_code(v, ErrorCode::kNonpositiveCost));
    CHECK(has_code(v, ErrorCode::kUnknownFile));
    CHECK(has_code(v, ErrorCode::kGroupTooSmall));
  }
  SUBCASE("empty group") {
    auto v = validate_scenario(testing::uniform({3, 0}));
    CHECK(has_code(v, ErrorCode::kGroupTooSmall));
  }
  SUBCASE("require_valid carries the list") {
    try {
      require_valid(Scenario(1, {{{1, 0}, FileId{0}}}));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.violations().size() == 3);
    }
  }
}

TEST_CASE("group_ratio_sums") {
  SUBCASE("ten unit nodes") {
    auto sums = group_ratio_sums(testing::uniform({10, 10}));
    CHECK(sums.per_file[0].size == 10);
    CHECK(sums.per_file[0].ratio_sum == 10.0);
  }
  SUBCASE("direct sum") {
    Scenario s(2, {{{1, 1}, FileId{0}}, {{2, 1}, FileId{0}}, {{1, 1}, FileId{1}},
                   {{1, 1}, FileId{1}}});
    auto sums = group_ratio_sums(s);
    CHECK(sums.per_file[0].size == 2);
    CHECK(sums.per_file[0].ratio_sum == 3.0);
  }
  SUBCASE("complement over three files") {
    auto sums = group_ratio_sums(testing::uniform({10, 10, 10}));
    for (std::uint32_t x = 0; x < 3; ++x) {
      CHECK(sums.complement(FileId{x}).ratio_sum == 20.0);
      CHECK(sums.complement(FileId{x}).size == 20);
    }
  }
}

TEST_CASE("StrategyProfile defines lambda only for held files") {
  const Scenario s = testing::uniform({2, 2, 2});
  StrategyProfile p(s);
  CHECK_FALSE(p.lambda(NodeId{0}, FileId{0}).has_value());
  CHECK(p.lambda(NodeId{0}, FileId{1}) == 0.0);
  CHECK_THROWS_AS(p.set_lambda(NodeId{0}, FileId{0}, 1.0), Error);
  p.set_lambda(NodeId{0}, FileId{2}, 0.5);
  p.set_lambda(NodeId{2}, FileId{2}, 0.25);
  CHECK(p.total_lambda(FileId{2}) == 0.75);
  CHECK(p.nonnegative());
  p.set_gamma(NodeId{3}, -0.1);
  CHECK_FALSE(p.nonnegative());
}

TEST_CASE("Metrics incremental cost matches the raw counters") {
  const Scenario s = testing::random_two_file(4, 3, 17);
  Metrics m(s);
  for (int r = 0; r < 1000; ++r) {
    RoundOutcome o;
    o.initiator = NodeId{static_cast<std::uint32_t>(r % 4)};
    o.responder = NodeId{static_cast<std::uint32_t>(4 + r % 3)};
    o.initiation_duration = 0.1 * (r % 7);
    o.response_duration = 0.05 * (r % 5);
    o.total_duration = o.initiation_duration + o.response_duration + 2.0;
    o.downloads.assign(7, 1);
    o.uploads.assign(7, 0);
    o.uploads[o.initiator.value] = 1;
    o.uploads[o.responder.value] = 1;
    m.record(o);
  }
  for (std::uint32_t n = 0; n < 7; ++n) {
    const double inc = m.avg_total_cost(NodeId{n});
    CHECK(inc == doctest::Approx(m.recomputed_avg_total_cost(NodeId{n})).epsilon(1e-12));
    CHECK(inc >= 2.0 * s.cost(NodeId{n}).w);
    CHECK(m.downloads(NodeId{n}) == 1000);
  }
  CHECK(m.per_node_throughput() <= 0.5);
}

TEST_CASE("scenario JSON parsing") {
  SUBCASE("round trip") {
    const Scenario s = testing::random_two_file(3, 4, 5);
    const ScenarioFile back = parse_scenario(dump_scenario(s, 42));
    REQUIRE(back.seed == 42u);
    REQUIRE(back.scenario.node_count() == 7);
    for (std::uint32_t n = 0; n < 7; ++n) {
      CHECK(back.scenario.cost(NodeId{n}).w == s.cost(NodeId{n}).w);
      CHECK(back.scenario.needs(NodeId{n}) == s.needs(NodeId{n}));
    }
  }
  SUBCASE("malformed inputs") {
    CHECK_THROWS_AS(parse_scenario("{"), Error);
    CHECK_THROWS_AS(parse_scenario(R"({"files": 2})"), Error);
    CHECK_THROWS_AS(parse_scenario(R"({"files": 2, "nodes": [{"w": 1, "g": 1}]})"), Error);
    CHECK_THROWS_AS(parse_scenario(R"({"files": 2, "nodes": [], "extra": 1})"), Error);
    CHECK_THROWS_AS(
        parse_scenario(R"({"files": 2, "nodes": [{"w": "1", "g": 1, "needs": 0}]})"), Error);
  }
  SUBCASE("parsing does not validate") {
    auto f = parse_scenario(R"({"files": 2, "nodes": [{"w": 1, "g": 0, "needs": 0}]})");
    CHECK_FALSE(validate_scenario(f.scenario).empty());
  }
}
