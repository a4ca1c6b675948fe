#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "retswitch/analysis.hpp"
#include "retswitch/engine.hpp"
#include "retswitch/rat.hpp"

namespace retswitch::validate {

/// Simulated behavior reduced to what the classifier predicts.
struct SimulatedSummary {
  std::string behavior;  // "periodic", "divergent_minus_inf", "divergent_plus_inf", "undetermined"
  std::size_t switches = 0;
};

SimulatedSummary summarize(const engine::Outcome& outcome);

struct TheoremCheck {
  Rat tau;
  analysis::Prediction prediction;
  engine::Outcome outcome;
  SimulatedSummary simulated;
  bool certificate_ok = false;  // only meaningful for periodic outcomes
  bool agree = false;
  std::string reason;  // empty when agree
};

/// Classifies tau, simulates it, and compares behavior and switch counts.
/// Periodic outcomes must also pass the one-extra-period certificate.
TheoremCheck check_theorem(const Rat& tau, const engine::Limits& limits = {});

struct ClosedFormCheck {
  Rat tau;
  unsigned J = 0;            // from the closed-form scan
  unsigned simulated_J = 0;  // first simulated index breaking the alternating inequalities
  std::size_t compared = 0;  // number of indices j <= J compared
  std::vector<unsigned> beta_mismatches;
  std::vector<unsigned> alpha_mismatches;
  bool lemma_holds = false;
  bool agree = false;
  std::vector<engine::TurningPoint> turning_points;  // simulated, at least J entries when agree
};

/// Compares simulated (beta_j, alpha_j) with the closed forms for j <= J.
/// Accepts tau in [4/3, 3/2); throws DomainError otherwise.
ClosedFormCheck check_closed_form(const Rat& tau);

struct FloatTurn {
  double t;
  double x;
};

struct FloatOracleOptions {
  double dt = 1e-6;
  std::size_t max_turns = 32;
  double t_end = 200.0;
};

/// Fixed-step binary64 integration with a sampled history buffer; the delayed
/// value is read back D = ceil(tau/dt) samples in the past and crossings of
/// {0, 1} are located by linear interpolation inside the step. Uses the
/// canonical history. Refuses (DomainError) when tau is within 1000*dt of a
/// critical value or dt > 1e-6.
std::vector<FloatTurn> float_oracle(const Rat& tau, const FloatOracleOptions& options = {});

/// Largest |dt| / |dx| deviation between the oracle and the exact engine over
/// the first n turning points (n = min of both lengths, and both must reach `n_required`).
struct OracleComparison {
  std::size_t compared = 0;
  double max_error = 0.0;
  bool ok = false;
};

OracleComparison compare_with_oracle(const Rat& tau, std::size_t n_required, double tolerance,
                                     const FloatOracleOptions& options = {});

struct SweepEntry {
  Rat tau;
  analysis::Prediction prediction;
  SimulatedSummary simulated;
  bool agree = false;
  std::string reason;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  std::size_t agreed = 0;
  std::size_t disagreed = 0;

  [[nodiscard]] bool all_agree() const { return disagreed == 0 && !entries.empty(); }
  [[nodiscard]] std::string to_csv() const;
  [[nodiscard]] std::string to_json() const;
};

/// The tau values a sweep visits, in increasing order: for each k the three
/// critical values plus `samples_per_interval` points at fractions i/(n+1)
/// of each open interval between consecutive critical values.
std::vector<Rat> sweep_points(unsigned k_max, unsigned samples_per_interval);

/// Runs check_theorem on every sweep point; entries are evaluated concurrently
/// and returned in tau order.
SweepReport sweep(unsigned k_max, unsigned samples_per_interval);

}  // namespace retswitch::validate
