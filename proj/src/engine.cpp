#include "retswitch/engine.hpp"

namespace retswitch::engine {

namespace {

bool in_critical_set(const Rat& x) { return x == 0 || x == 1; }

// Whether the closed segment between a and b contains c.
bool spans(const Rat& a, const Rat& b, const Rat& c) {
  return (a <= c && c <= b) || (b <= c && c <= a);
}

}  // namespace

InitialCondition InitialCondition::canonical(const Rat& tau) {
  return InitialCondition({{-tau, -tau}, {Rat(0), Rat(0)}});
}

void InitialCondition::validate(const Rat& tau) const {
  if (tau.sign() <= 0) throw InvalidInitialCondition("delay must be positive, got " + tau.str());
  if (points_.size() < 2) throw InvalidInitialCondition("initial condition needs at least two breakpoints");
  if (points_.front().t != -tau) {
    throw InvalidInitialCondition("first breakpoint must be at t = -tau = " + (-tau).str() + ", got " +
                                  points_.front().t.str());
  }
  if (points_.back().t != 0 || points_.back().x != 0) {
    throw InvalidInitialCondition("last breakpoint must be (0, 0), got (" + points_.back().t.str() + ", " +
                                  points_.back().x.str() + ")");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const auto& a = points_[i - 1];
    const auto& b = points_[i];
    if (!(a.t < b.t)) {
      throw InvalidInitialCondition("breakpoint times must increase strictly (at t = " + b.t.str() + ")");
    }
    const bool last = (i + 1 == points_.size());
    for (const Rat& c : {Rat(0), Rat(1)}) {
      // The final segment ends at x = 0 by construction; only its left end and
      // interior are constrained there.
      const bool touches = last ? (c == 0 ? a.x == 0 : spans(a.x, b.x, c)) : spans(a.x, b.x, c);
      if (touches) {
        throw InvalidInitialCondition("initial function reaches " + c.str() + " before t = 0 on [" + a.t.str() +
                                      ", " + b.t.str() + "]");
      }
    }
  }
}

std::deque<Rat> initial_hits(const InitialCondition& ic, const Rat& tau) {
  ic.validate(tau);
  return {tau};
}

Simulator::Simulator(const Rat& tau, const InitialCondition& ic) : tau_(tau) {
  for (const Rat& at : initial_hits(ic, tau)) pending_.push_back({at, at - tau});
  events_.push_back({Rat(0), Rat(0), EventKind::Hit});
}

std::optional<Rat> ray_hit(const Rat& now, const Rat& x, Slope slope) {
  if (slope == Slope::Up) {
    if (x < 0) return now - x;
    if (x < 1) return now + (Rat(1) - x);
    return std::nullopt;
  }
  if (x > 1) return now + (x - 1);
  if (x > 0) return now + x;
  return std::nullopt;
}

std::optional<Direction> escape_direction(const Rat& x, Slope slope, bool pending_empty) {
  if (!pending_empty) return std::nullopt;
  if (slope == Slope::Down && x < 0) return Direction::MinusInfinity;
  if (slope == Slope::Up && x > 1) return Direction::PlusInfinity;
  return std::nullopt;
}

std::optional<Rat> Simulator::next_boundary_hit() const { return ray_hit(t_, x_, slope_); }

EventReport Simulator::step() {
  const std::optional<Rat> hit_at = next_boundary_hit();
  if (pending_.empty() && !hit_at) {
    throw ContractViolation("step: no pending switch and no reachable boundary; the trajectory has diverged");
  }

  Rat t_next = pending_.empty() ? *hit_at : pending_.front().at;
  if (hit_at && *hit_at < t_next) t_next = *hit_at;

  const Rat dt = t_next - t_;
  x_ = (slope_ == Slope::Up) ? x_ + dt : x_ - dt;
  t_ = t_next;

  EventReport report{t_, x_};

  if (in_critical_set(x_)) {
    const Rat at = t_ + tau_;
    if (!pending_.empty() && !(pending_.back().at < at)) {
      throw ContractViolation("pending switch times must be pairwise distinct and increasing");
    }
    pending_.push_back({at, t_});
    events_.push_back({t_, x_, EventKind::Hit});
    report.hit = true;
  }

  if (!pending_.empty() && pending_.front().at == t_) {
    Pending fired = std::move(pending_.front());
    pending_.pop_front();
    slope_ = flipped(slope_);
    turning_.push_back({t_, x_, std::move(fired.hit_time)});
    events_.push_back({t_, x_, EventKind::Switch});
    snapshots_.push_back(snapshot());
    report.switched = true;
  }

  return report;
}

std::optional<Direction> Simulator::detect_divergence() const {
  return escape_direction(x_, slope_, pending_.empty());
}

std::vector<Rat> Simulator::pending_switches() const {
  std::vector<Rat> out;
  out.reserve(pending_.size());
  for (const auto& p : pending_) out.push_back(p.at);
  return out;
}

Snapshot Simulator::snapshot() const {
  Snapshot s{slope_, x_, {}};
  s.offsets.reserve(pending_.size());
  for (const auto& p : pending_) s.offsets.push_back(p.at - t_);
  return s;
}

std::string Snapshot::key() const {
  std::string k = (slope == Slope::Up) ? "+" : "-";
  k += '|';
  k += x.str();
  for (const auto& o : offsets) {
    k += '|';
    k += o.str();
  }
  return k;
}

std::optional<std::size_t> PeriodDetector::add(const Snapshot& s, std::size_t index) {
  auto [it, inserted] = seen_.try_emplace(s.key(), index);
  if (inserted) return std::nullopt;
  return it->second;
}

std::optional<std::pair<std::size_t, std::size_t>> detect_period(std::span<const Snapshot> snapshots) {
  PeriodDetector detector;
  for (std::size_t j = 0; j < snapshots.size(); ++j) {
    if (auto i = detector.add(snapshots[j], j)) return std::pair{*i, j};
  }
  return std::nullopt;
}

Outcome run(const Rat& tau, const InitialCondition& ic, const Limits& limits) {
  if (tau.sign() <= 0) throw DomainError("delay must be positive, got " + tau.str());
  if (limits.max_switches == 0 || limits.max_time.sign() <= 0) {
    throw DomainError("simulation limits must be positive");
  }

  Simulator sim(tau, ic);
  PeriodDetector detector;

  auto finish = [&sim](auto result) {
    return Outcome{std::move(result), sim.turning_points(), sim.events()};
  };

  while (true) {
    if (auto dir = sim.detect_divergence()) return finish(Divergent{*dir, sim.switch_count()});

    const EventReport ev = sim.step();
    if (ev.switched) {
      const std::size_t j = sim.switch_count() - 1;
      if (auto i = detector.add(sim.snapshots().back(), j)) {
        const auto& tps = sim.turning_points();
        Periodic p;
        p.least_period = tps[j].beta - tps[*i].beta;
        p.switchings_per_period = j - *i;
        p.period_start = *i;
        p.period_turning_points.assign(tps.begin() + static_cast<std::ptrdiff_t>(*i),
                                       tps.begin() + static_cast<std::ptrdiff_t>(j));
        return finish(std::move(p));
      }
      if (auto dir = sim.detect_divergence()) return finish(Divergent{*dir, sim.switch_count()});
    }

    if (sim.switch_count() >= limits.max_switches || sim.now() >= limits.max_time) {
      return finish(Undetermined{sim.switch_count()});
    }
  }
}

Outcome run(const Rat& tau, const Limits& limits) {
  return run(tau, InitialCondition::canonical(tau), limits);
}

bool certify_period(const Rat& tau, const InitialCondition& ic, const Periodic& periodic) {
  const std::size_t i = periodic.period_start;
  const std::size_t p = periodic.switchings_per_period;
  if (p == 0) return false;
  const std::size_t needed = i + 2 * p + 1;

  Simulator sim(tau, ic);
  while (sim.switch_count() < needed) {
    if (sim.detect_divergence()) return false;
    sim.step();
  }
  const auto& tps = sim.turning_points();
  for (std::size_t m = 0; m <= p; ++m) {
    const auto& first = tps[i + m];
    const auto& again = tps[i + p + m];
    if (again.beta != first.beta + periodic.least_period || again.alpha != first.alpha) return false;
  }
  // The recorded period itself must also match the replay.
  for (std::size_t m = 0; m < periodic.period_turning_points.size(); ++m) {
    if (periodic.period_turning_points[m].beta != tps[i + m].beta ||
        periodic.period_turning_points[m].alpha != tps[i + m].alpha) {
      return false;
    }
  }
  return true;
}

std::string_view direction_name(Direction d) {
  return d == Direction::MinusInfinity ? "minus_inf" : "plus_inf";
}

}  // namespace retswitch::engine
