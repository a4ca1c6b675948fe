#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "retswitch/analysis.hpp"
#include "retswitch/rat.hpp"

namespace retswitch::engine {

class InvalidInitialCondition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Slope : int { Up = 1, Down = -1 };

inline Slope flipped(Slope s) { return s == Slope::Up ? Slope::Down : Slope::Up; }

struct Breakpoint {
  Rat t;
  Rat x;
};

/// Continuous piecewise-linear history on [-tau, 0].
///
/// The first breakpoint sits at t = -tau, the last at (0, 0), and the
/// function avoids the critical set {0, 1} everywhere before t = 0.
class InitialCondition {
 public:
  /// The two-point history {(-tau, -tau), (0, 0)}.
  static InitialCondition canonical(const Rat& tau);

  /// Breakpoints as given; call validate() before use.
  explicit InitialCondition(std::vector<Breakpoint> breakpoints) : points_(std::move(breakpoints)) {}

  /// Throws InvalidInitialCondition naming the first violated constraint.
  void validate(const Rat& tau) const;

  [[nodiscard]] std::span<const Breakpoint> breakpoints() const { return points_; }

 private:
  std::vector<Breakpoint> points_;
};

enum class EventKind { Hit, Switch };

/// One exported trajectory record. A hit and a switch at the same instant
/// produce two records, hit first.
struct TraceEvent {
  Rat t;
  Rat x;
  EventKind kind;
};

struct TurningPoint {
  Rat beta;      // switch instant
  Rat alpha;     // x at the switch
  Rat hit_time;  // instant of the hit that scheduled this switch
};

/// Complete state at a switch instant (taken after the toggle).
struct Snapshot {
  Slope slope;
  Rat x;
  std::vector<Rat> offsets;  // pending switch times minus snapshot time

  [[nodiscard]] std::string key() const;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

enum class Direction { MinusInfinity, PlusInfinity };

struct Periodic {
  Rat least_period;
  std::size_t switchings_per_period = 0;
  /// Zero-based index into the switch list where the first recorded period starts.
  std::size_t period_start = 0;
  std::vector<TurningPoint> period_turning_points;
};

struct Divergent {
  Direction direction;
  std::size_t total_switchings = 0;
};

struct Undetermined {
  std::size_t switchings_executed = 0;
};

struct Outcome {
  std::variant<Periodic, Divergent, Undetermined> result;
  std::vector<TurningPoint> turning_points;
  std::vector<TraceEvent> events;

  [[nodiscard]] bool periodic() const { return std::holds_alternative<Periodic>(result); }
  [[nodiscard]] bool divergent() const { return std::holds_alternative<Divergent>(result); }
  [[nodiscard]] bool undetermined() const { return std::holds_alternative<Undetermined>(result); }
};

struct Limits {
  std::size_t max_switches = 10'000;
  Rat max_time = 10'000;
};

struct EventReport {
  Rat t;
  Rat x;
  bool hit = false;
  bool switched = false;
};

/// Earliest t > now at which a unit-speed ray from x meets {0, 1}.
std::optional<Rat> ray_hit(const Rat& now, const Rat& x, Slope slope);

/// Direction of escape for a state with no pending switches, if it escapes.
std::optional<Direction> escape_direction(const Rat& x, Slope slope, bool pending_empty);

/// Pending switches for an initial condition: the hit at t = 0 schedules a
/// single switch at tau.
std::deque<Rat> initial_hits(const InitialCondition& ic, const Rat& tau);

/// Event-driven integrator for x' = slope with delayed switching on {0, 1}.
class Simulator {
 public:
  Simulator(const Rat& tau, const InitialCondition& ic);
  explicit Simulator(const Rat& tau) : Simulator(tau, InitialCondition::canonical(tau)) {}

  /// Earliest t > now at which the current ray meets {0, 1}, ignoring pending switches.
  [[nodiscard]] std::optional<Rat> next_boundary_hit() const;

  /// Advances to the next hit and/or switch. Throws ContractViolation when
  /// nothing can happen any more (check detect_divergence first).
  EventReport step();

  /// Set once the queue is empty and the ray moves away from {0, 1}.
  [[nodiscard]] std::optional<Direction> detect_divergence() const;

  [[nodiscard]] const Rat& tau() const { return tau_; }
  [[nodiscard]] const Rat& now() const { return t_; }
  [[nodiscard]] const Rat& x() const { return x_; }
  [[nodiscard]] Slope slope() const { return slope_; }
  [[nodiscard]] std::size_t switch_count() const { return turning_.size(); }
  [[nodiscard]] std::vector<Rat> pending_switches() const;
  [[nodiscard]] const std::vector<TurningPoint>& turning_points() const { return turning_; }
  [[nodiscard]] const std::vector<TraceEvent>& events() const { return events_; }
  [[nodiscard]] const std::vector<Snapshot>& snapshots() const { return snapshots_; }

  [[nodiscard]] Snapshot snapshot() const;

 private:
  struct Pending {
    Rat at;
    Rat hit_time;
  };

  Rat tau_;
  Rat t_ = 0;
  Rat x_ = 0;
  Slope slope_ = Slope::Up;
  std::deque<Pending> pending_;
  std::vector<TurningPoint> turning_;
  std::vector<TraceEvent> events_;
  std::vector<Snapshot> snapshots_;
};

/// Incremental exact recurrence search over switch snapshots.
class PeriodDetector {
 public:
  /// Registers snapshot number `index`; returns the earlier index holding the
  /// same state, if any.
  std::optional<std::size_t> add(const Snapshot& s, std::size_t index);

 private:
  std::unordered_map<std::string, std::size_t> seen_;
};

/// Earliest (i, j), i < j, with snapshots[i] == snapshots[j], scanning j first.
std::optional<std::pair<std::size_t, std::size_t>> detect_period(std::span<const Snapshot> snapshots);

/// Runs until the trajectory is shown periodic or divergent, or a limit is hit.
Outcome run(const Rat& tau, const InitialCondition& ic, const Limits& limits = {});
Outcome run(const Rat& tau, const Limits& limits = {});

/// Replays the system for one extra period past the detected recurrence and
/// checks that every switch repeats shifted by the least period.
bool certify_period(const Rat& tau, const InitialCondition& ic, const Periodic& periodic);

std::string_view direction_name(Direction d);

}  // namespace retswitch::engine
