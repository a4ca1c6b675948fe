#include <doctest.h>

#include <random>
#include <vector>

#include "retswitch/analysis.hpp"
#include "retswitch/engine.hpp"

using namespace retswitch;
using namespace retswitch::engine;

namespace {

std::vector<Rat> alphas(const std::vector<TurningPoint>& tps) {
  std::vector<Rat> out;
  for (const auto& tp : tps) out.push_back(tp.alpha);
  return out;
}

std::vector<Rat> rats(std::initializer_list<std::pair<long, long>> pairs) {
  std::vector<Rat> out;
  for (auto [n, d] : pairs) out.emplace_back(n, d);
  return out;
}

}  // namespace

TEST_CASE("initial condition validation") {
  const Rat tau(7, 5);
  CHECK(initial_hits(InitialCondition::canonical(tau), tau) == std::deque<Rat>{tau});
  CHECK(initial_hits(InitialCondition::canonical(Rat(4, 3)), Rat(4, 3)) == std::deque<Rat>{Rat(4, 3)});

  const Rat near = Rat(3, 2) - Rat(1, 100);
  const InitialCondition bent({{-near, Rat(-3)}, {Rat(-1, 2), Rat(-1, 4)}, {Rat(0), Rat(0)}});
  CHECK(initial_hits(bent, near) == std::deque<Rat>{near});

  // Approaching 0 from above is allowed.
  CHECK_NOTHROW(InitialCondition({{-tau, Rat(1, 2)}, {Rat(0), Rat(0)}}).validate(tau));

  CHECK_THROWS_AS(InitialCondition({{-tau, Rat(-1)}, {Rat(-1, 2), Rat(1, 2)}, {Rat(0), Rat(0)}}).validate(tau),
                  InvalidInitialCondition);  // crosses 0 before t = 0
  CHECK_THROWS_AS(InitialCondition({{-tau, Rat(2)}, {Rat(0), Rat(0)}}).validate(tau),
                  InvalidInitialCondition);  // passes through 1
  CHECK_THROWS_AS(InitialCondition({{-tau, Rat(0)}, {Rat(0), Rat(0)}}).validate(tau), InvalidInitialCondition);
  CHECK_THROWS_AS(InitialCondition({{Rat(-1), Rat(-1)}, {Rat(0), Rat(0)}}).validate(tau), InvalidInitialCondition);
  CHECK_THROWS_AS(InitialCondition({{-tau, Rat(-1)}, {Rat(0), Rat(1, 3)}}).validate(tau), InvalidInitialCondition);
  CHECK_THROWS_AS(InitialCondition({{-tau, Rat(-1)}, {Rat(-1), Rat(-1)}, {Rat(-1), Rat(-2)}, {Rat(0), Rat(0)}})
                      .validate(tau),
                  InvalidInitialCondition);
}

TEST_CASE("ray hits") {
  CHECK(ray_hit(Rat(5), Rat(0), Slope::Up) == Rat(6));
  CHECK(ray_hit(Rat(0), Rat(20, 43), Slope::Up) == Rat(23, 43));
  CHECK_FALSE(ray_hit(Rat(0), Rat(-10, 43), Slope::Down).has_value());
  CHECK_FALSE(ray_hit(Rat(0), Rat(1), Slope::Up).has_value());
  CHECK(ray_hit(Rat(0), Rat(1), Slope::Down) == Rat(1));
  CHECK(ray_hit(Rat(2), Rat(3, 2), Slope::Down) == Rat(5, 2));
  CHECK(ray_hit(Rat(0), Rat(-1), Slope::Up) == Rat(1));
}

TEST_CASE("escape direction") {
  CHECK(escape_direction(Rat(-23, 43), Slope::Down, true) == Direction::MinusInfinity);
  CHECK_FALSE(escape_direction(Rat(1, 2), Slope::Down, true).has_value());
  CHECK(escape_direction(Rat(2), Slope::Up, true) == Direction::PlusInfinity);
  CHECK_FALSE(escape_direction(Rat(-1), Slope::Down, false).has_value());
  CHECK_FALSE(escape_direction(Rat(0), Slope::Down, true).has_value());
}

TEST_CASE("first events at tau = 4/3") {
  Simulator sim(Rat(4, 3));
  auto e = sim.step();
  CHECK(e.t == 1);
  CHECK(e.x == 1);
  CHECK(e.hit);
  CHECK_FALSE(e.switched);

  e = sim.step();
  CHECK(e.t == Rat(4, 3));
  CHECK(e.switched);
  CHECK(sim.turning_points().front().alpha == Rat(4, 3));
  CHECK(sim.slope() == Slope::Down);
  CHECK(sim.pending_switches() == std::vector<Rat>{Rat(7, 3)});
}

TEST_CASE("switch landing exactly on 1 also counts as a hit") {
  // tau_1: alpha_3 = 1 at beta_3 = 3.
  Simulator sim(Rat(4, 3));
  while (sim.switch_count() < 3) sim.step();
  CHECK(sim.now() == 3);
  CHECK(sim.x() == 1);
  const auto& ev = sim.events();
  REQUIRE(ev.size() >= 2);
  CHECK(ev[ev.size() - 2].kind == EventKind::Hit);
  CHECK(ev[ev.size() - 2].t == 3);
  CHECK(ev.back().kind == EventKind::Switch);
  CHECK(sim.pending_switches().back() == Rat(3) + Rat(4, 3));
}

TEST_CASE("theta_k: alpha_{2k+4} = -1 is not a hit") {
  const Rat tau = analysis::theta_k(1);
  Simulator sim(tau);
  while (sim.switch_count() < 6) sim.step();
  CHECK(sim.x() == -1);
  CHECK(sim.events().back().kind == EventKind::Switch);
  CHECK(sim.events()[sim.events().size() - 2].t != sim.now());
}

TEST_CASE("step refuses once diverged") {
  Simulator sim(Rat(63, 43));
  while (!sim.detect_divergence()) sim.step();
  CHECK_THROWS_AS(sim.step(), ContractViolation);
}

TEST_CASE("run: golden traces") {
  const auto o = run(Rat(63, 43));
  REQUIRE(o.divergent());
  CHECK(std::get<Divergent>(o.result).direction == Direction::MinusInfinity);
  CHECK(std::get<Divergent>(o.result).total_switchings == 9);
  CHECK(alphas(o.turning_points) ==
        rats({{63, 43}, {20, 43}, {60, 43}, {14, 43}, {48, 43}, {-10, 43}, {0, 1}, {-1, 1}, {-23, 43}}));

  const auto z = run(Rat(7, 5));
  REQUIRE(z.divergent());
  CHECK(std::get<Divergent>(z.result).total_switchings == 9);

  const Rat tau(1328, 903);
  const auto p = run(tau);
  REQUIRE(p.periodic());
  const auto& per = std::get<Periodic>(p.result);
  CHECK(per.switchings_per_period == 10);
  const std::vector<Rat> expected{tau,
                                  tau - 1,
                                  Rat(3) * tau - 3,
                                  Rat(5) * tau - 7,
                                  Rat(11) * tau - 15,
                                  Rat(21) * tau - 31,
                                  Rat(43) * tau - 63,
                                  Rat(43) * tau - 64,
                                  tau - 2,
                                  Rat(-85) * tau + 124};
  CHECK(alphas(per.period_turning_points) == expected);
}

TEST_CASE("145/99 is 8-periodic with the 8-term prefix of the (theta_2, zeta_2) list") {
  const Rat tau(145, 99);
  const auto o = run(tau);
  REQUIRE(o.periodic());
  const auto& per = std::get<Periodic>(o.result);
  CHECK(per.switchings_per_period == 8);
  const std::vector<Rat> prefix{tau,          tau - 1,           Rat(3) * tau - 3,  Rat(5) * tau - 7,
                                Rat(11) * tau - 15, Rat(21) * tau - 31, Rat(43) * tau - 63, Rat(43) * tau - 64};
  CHECK(alphas(per.period_turning_points) == prefix);
}

TEST_CASE("period detection") {
  const auto o = run(Rat(4, 3));
  REQUIRE(o.periodic());
  const auto& p = std::get<Periodic>(o.result);
  CHECK(p.switchings_per_period == 6);
  CHECK(p.least_period == 6);
  CHECK(alphas(p.period_turning_points) == rats({{4, 3}, {1, 3}, {1, 1}, {-1, 3}, {2, 3}, {0, 1}}));
  CHECK(certify_period(Rat(4, 3), InitialCondition::canonical(Rat(4, 3)), p));

  Periodic wrong = p;
  wrong.least_period = 5;
  CHECK_FALSE(certify_period(Rat(4, 3), InitialCondition::canonical(Rat(4, 3)), wrong));

  const auto q = run(Rat(89, 66));
  REQUIRE(q.periodic());
  CHECK(std::get<Periodic>(q.result).switchings_per_period == 6);

  Simulator sim(Rat(63, 43));
  while (!sim.detect_divergence()) sim.step();
  CHECK_FALSE(detect_period(sim.snapshots()).has_value());

  Simulator s2(Rat(4, 3));
  while (s2.switch_count() < 20) s2.step();
  const auto pair = detect_period(s2.snapshots());
  REQUIRE(pair.has_value());
  CHECK(pair->second - pair->first == 6);
  CHECK(pair->first == 0);
}

TEST_CASE("run limits") {
  const auto o = run(Rat(4, 3), Limits{3, Rat(10'000)});
  CHECK(o.undetermined());
  CHECK(std::get<Undetermined>(o.result).switchings_executed == 3);
  const auto t = run(Rat(4, 3), Limits{10'000, Rat(2)});
  CHECK(t.undetermined());
  CHECK_THROWS_AS(run(Rat(4, 3), Limits{0, Rat(1)}), DomainError);
  CHECK_THROWS_AS(run(Rat(4, 3), Limits{10, Rat(0)}), DomainError);
  CHECK_THROWS_AS(run(Rat(0)), DomainError);
}

TEST_CASE("custom history does not change the solution") {
  const Rat tau(147, 100);
  const InitialCondition bent({{-tau, Rat(-5)}, {Rat(-1), Rat(-1, 2)}, {Rat(-1, 2), Rat(-3, 4)}, {Rat(0), Rat(0)}});
  const auto a = run(tau, bent);
  const auto b = run(tau);
  CHECK(alphas(a.turning_points) == alphas(b.turning_points));
}

TEST_CASE("out-of-range delays run empirically") {
  for (const Rat tau : {Rat(1, 2), Rat(1), Rat(2), Rat(3, 2), Rat(5, 4)}) {
    const auto o = run(tau);
    CHECK_FALSE(o.undetermined());
  }
}

TEST_CASE("trajectory invariants on random delays") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<long> num(1, 400);
  for (int n = 0; n < 150; ++n) {
    const Rat tau = Rat(num(rng), 100) + Rat(1, 7);
    Simulator sim(tau);
    std::size_t steps = 0;
    while (!sim.detect_divergence() && sim.switch_count() < 40 && steps++ < 400) {
      const Rat t0 = sim.now();
      const Rat x0 = sim.x();
      const Slope s0 = sim.slope();
      const auto ev = sim.step();

      // Unit speed between events, in the direction of the slope in force.
      CHECK(ev.t > t0);
      CHECK(ev.x - x0 == (s0 == Slope::Up ? ev.t - t0 : t0 - ev.t));

      // Pending queue strictly increasing, in (now, now + tau].
      const auto pend = sim.pending_switches();
      for (std::size_t i = 0; i < pend.size(); ++i) {
        CHECK(pend[i] > sim.now());
        CHECK(pend[i] <= sim.now() + tau);
        if (i > 0) CHECK(pend[i - 1] < pend[i]);
      }
      // Queue size equals hits in (now - tau, now].
      std::size_t recent_hits = 0;
      for (const auto& e : sim.events()) {
        if (e.kind == EventKind::Hit && e.t > sim.now() - tau && e.t <= sim.now()) ++recent_hits;
      }
      CHECK(recent_hits == pend.size());

      CHECK((sim.slope() == Slope::Up) == (sim.switch_count() % 2 == 0));
    }
    for (const auto& tp : sim.turning_points()) CHECK(tp.beta - tp.hit_time == tau);
    for (const auto& s : sim.snapshots()) {
      for (std::size_t i = 0; i < s.offsets.size(); ++i) {
        CHECK(s.offsets[i].sign() > 0);
        CHECK(s.offsets[i] <= tau);
        if (i > 0) CHECK(s.offsets[i - 1] < s.offsets[i]);
      }
    }
  }
}

TEST_CASE("determinism") {
  const auto a = run(Rat(1499, 1000));
  const auto b = run(Rat(1499, 1000));
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].t == b.events[i].t);
    CHECK(a.events[i].x == b.events[i].x);
    CHECK(a.events[i].kind == b.events[i].kind);
  }
}
