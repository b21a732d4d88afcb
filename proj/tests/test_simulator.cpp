#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "test_support.hpp"
#include "wbx/equilibrium.hpp"
#include "wbx/simulator.hpp"

using namespace wbx;
using doctest::Approx;

TEST_CASE("exponential timers") {
  CHECK(exponential_from_uniform(2.0, 0.5) == Approx(std::log(2.0) / 2.0).epsilon(1e-15));
  CHECK(is_never(exponential_from_uniform(0.0, 0.3)));
  CHECK_THROWS_WITH_AS(exponential_from_uniform(-1.0, 0.3), doctest::Contains("NEGATIVE_RATE"),
                       Error);

  Rng rng(5);
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) acc += sample_exponential(4.0, rng);
  CHECK(std::abs(acc / n - 0.25) < 0.001);

  SUBCASE("zero rate draws nothing") {
    Rng a(9), b(9);
    sample_exponential(0.0, a);
    CHECK(a.next() == b.next());
  }
  SUBCASE("uniform never hits the endpoints") {
    Rng r(1);
    for (int i = 0; i < 100000; ++i) {
      const double u = r.uniform_open01();
      CHECK((u > 0.0 && u < 1.0));
    }
  }
}

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(7, 3) == mix_seed(7, 3));
}

TEST_CASE("single positive initiator always wins") {
  const Scenario s = testing::uniform({3, 3});
  StrategyProfile p(s);
  p.set_gamma(NodeId{4}, 2.0);
  for (std::uint32_t n = 0; n < 3; ++n) p.set_lambda(NodeId{n}, FileId{1}, 1.0);
  Rng rng(11);
  for (int r = 0; r < 200; ++r) {
    const RoundOutcome o = run_round(s, p, false, rng);
    CHECK(o.initiator == NodeId{4});
    CHECK(s.needs(o.responder) == FileId{0});
  }
}

TEST_CASE("winner frequencies follow the rate shares") {
  const Scenario s = testing::random_two_file(4, 5, 21);
  const TwoFileEquilibrium eq = two_file_equilibrium(s, 0.4);
  const double total = eq.profile.total_gamma();
  Rng rng(3);
  const int rounds = 200000;
  std::vector<int> wins(s.node_count(), 0);
  double init_sum = 0.0;
  for (int r = 0; r < rounds; ++r) {
    const RoundOutcome o = run_round(s, eq.profile, false, rng);
    ++wins[o.initiator.value];
    init_sum += o.initiation_duration;
  }
  for (std::uint32_t n = 0; n < s.node_count(); ++n) {
    const double p = eq.profile.gamma(NodeId{n}) / total;
    const double se = std::sqrt(p * (1 - p) / rounds);
    CHECK(std::abs(wins[n] / double(rounds) - p) < 3 * se);
  }
  CHECK(init_sum / rounds == Approx(1.0 / total).epsilon(0.02));
}

TEST_CASE("long symmetric run matches the equilibrium") {
  const Scenario s = testing::uniform({10, 10});
  SimConfig cfg{.scenario = s,
                .profile = two_file_equilibrium(s).profile,
                .rounds = 100000,
                .seed = 2024};
  const SimResult res = run_simulation(cfg);
  const double mean = res.metrics.elapsed() / res.metrics.rounds();
  CHECK(mean == Approx(3.8).epsilon(0.02));
  CHECK(res.metrics.node_throughput(NodeId{0}) == Approx(1.0 / 3.8).epsilon(0.02));
  for (std::uint32_t n = 0; n < 20; ++n) {
    CHECK(res.metrics.avg_total_cost(NodeId{n}) == Approx(3.9).epsilon(0.02));
  }
}

TEST_CASE("coded three-file run matches the coded equilibrium") {
  const Scenario s = testing::uniform({10, 10, 10});
  const CodedEquilibrium eq = coded_equilibrium(s);
  SimConfig cfg{
      .scenario = s, .profile = *eq.profile, .rounds = 100000, .seed = 77, .coded = true};
  const SimResult res = run_simulation(cfg);
  CHECK(res.metrics.per_node_throughput() == Approx(0.25751).epsilon(0.02));
}

TEST_CASE("determinism and trace buffering") {
  const Scenario s = testing::random_two_file(3, 4, 2);
  const StrategyProfile p = two_file_equilibrium(s).profile;
  SimConfig a{.scenario = s, .profile = p, .rounds = 500, .seed = 99};
  a.trace_capacity = kFullTrace;
  SimConfig b = a;
  const SimResult ra = run_simulation(a), rb = run_simulation(b);
  REQUIRE(ra.trace.size() == 500);
  for (std::size_t i = 0; i < 500; ++i) {
    CHECK(ra.trace[i].duration == rb.trace[i].duration);
    CHECK(ra.trace[i].initiator == rb.trace[i].initiator);
  }
  SimConfig c = a;
  c.trace_capacity = 10;
  std::uint64_t seen = 0;
  c.on_round = [&](const RoundRecord& r) { CHECK(r.round == seen++); };
  const SimResult rc = run_simulation(c);
  REQUIRE(rc.trace.size() == 10);
  CHECK(rc.trace.front().round == 490);
  CHECK(rc.trace.back().duration == ra.trace.back().duration);
  CHECK(seen == 500);
  SimConfig d = a;
  d.seed = 100;
  CHECK(run_simulation(d).metrics.elapsed() != ra.metrics.elapsed());
}

TEST_CASE("stalls") {
  const Scenario s = testing::uniform({2, 2});
  Rng rng(1);
  SUBCASE("nobody initiates") {
    StrategyProfile p(s);
    p.set_lambda(NodeId{0}, FileId{1}, 1.0);
    CHECK_THROWS_WITH_AS(run_round(s, p, false, rng), doctest::Contains("STALL"), Error);
  }
  SUBCASE("no holder responds") {
    StrategyProfile p(s);
    p.set_gamma(NodeId{0}, 1.0);
    CHECK_THROWS_WITH_AS(run_round(s, p, false, rng), doctest::Contains("STALL"), Error);
  }
}

TEST_CASE("round accounting") {
  const Scenario s = testing::random_groups({3, 4, 5}, 8);
  // Random costs give signed coded rates, so drive the timers with a fixed profile.
  StrategyProfile p(s);
  for (std::uint32_t n = 0; n < s.node_count(); ++n) {
    p.set_gamma(NodeId{n}, 0.1 + 0.01 * n);
    for (std::uint32_t x = 0; x < 3; ++x) {
      if (s.needs(NodeId{n}).value != x) p.set_lambda(NodeId{n}, FileId{x}, 0.2 + 0.03 * x);
    }
  }
  Rng rng(4);
  for (bool coded : {false, true}) {
    for (int r = 0; r < 300; ++r) {
      const RoundOutcome o = run_round(s, p, coded, rng);
      CHECK(o.total_duration == Approx(o.initiation_duration + o.response_duration + 2.0));
      CHECK(o.initiator != o.responder);
      CHECK(s.possesses(o.responder, s.needs(o.initiator)));
      int uploads = 0, downloads = 0;
      for (std::uint32_t n = 0; n < s.node_count(); ++n) {
        uploads += o.uploads[n];
        downloads += o.downloads[n];
      }
      CHECK(uploads == 2);
      if (coded) {
        CHECK(downloads == 12);
      } else {
        const auto gi = s.group(s.needs(o.initiator)).size();
        const auto gr = s.group(s.needs(o.responder)).size();
        CHECK(downloads == static_cast<int>(gi + gr));
      }
    }
  }
}

TEST_CASE("golden round prefix") {
  const Scenario s = testing::with_ratios({{1.0, 1.5, 1.2}, {1.1, 1.3}});
  const StrategyProfile p = two_file_equilibrium(s).profile;
  Rng rng(20240101);
  struct Golden {
    std::uint32_t initiator, responder;
    double t_init, t_resp;
  };
  const Golden golden[] = {
      {1, 3, 0.14645430539777834, 0.21731099135581147},
      {3, 2, 0.64677694081713555, 3.9962431846773696},
      {2, 3, 0.33188733285751298, 0.00040648771797689183},
      {0, 3, 0.63147854964840777, 0.088151548517866316},
      {4, 1, 0.11661405723043017, 1.3006616420579484},
      {3, 1, 0.6277162198656473, 0.20055719102454508},
      {0, 3, 0.071530431324860047, 1.1007486353446272},
      {0, 3, 0.41840262522459015, 2.3238282603468963}
  };
  for (const Golden& g : golden) {
    const RoundOutcome o = run_round(s, p, false, rng);
    CHECK(o.initiator.value == g.initiator);
    CHECK(o.responder.value == g.responder);
    CHECK(o.initiation_duration == Approx(g.t_init).epsilon(1e-15));
    CHECK(o.response_duration == Approx(g.t_resp).epsilon(1e-15));
  }
}

TEST_CASE("rounds follow the documented random stream") {
  const Scenario s = testing::with_ratios({{1.0, 1.5, 1.2}, {1.1, 1.3}});
  const StrategyProfile p = two_file_equilibrium(s).profile;
  Rng rng(31337);
  std::mt19937_64 raw(31337);
  auto u = [&] { return (static_cast<double>(raw() >> 11) + 0.5) / 9007199254740992.0; };
  for (int r = 0; r < 50; ++r) {
    double best = kNever;
    std::uint32_t init = 0;
    for (std::uint32_t n = 0; n < s.node_count(); ++n) {
      const double rate = p.gamma(NodeId{n});
      if (rate <= 0) continue;
      const double t = -std::log(u()) / rate;
      if (t < best) best = t, init = n;
    }
    const FileId want = s.needs(NodeId{init});
    double resp = kNever;
    std::uint32_t who = 0;
    for (std::uint32_t n = 0; n < s.node_count(); ++n) {
      if (!s.possesses(NodeId{n}, want)) continue;
      const double rate = *p.lambda(NodeId{n}, want);
      if (rate <= 0) continue;
      const double t = -std::log(u()) / rate;
      if (t < resp) resp = t, who = n;
    }
    const RoundOutcome o = run_round(s, p, false, rng);
    CHECK(o.initiator.value == init);
    CHECK(o.responder.value == who);
    CHECK(o.initiation_duration == best);
    CHECK(o.response_duration == resp);
  }
}
