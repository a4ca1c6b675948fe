#include "retswitch/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace retswitch::validate {

namespace an = analysis;
namespace en = engine;

SimulatedSummary summarize(const en::Outcome& outcome) {
  if (const auto* p = std::get_if<en::Periodic>(&outcome.result)) {
    return {"periodic", p->switchings_per_period};
  }
  if (const auto* d = std::get_if<en::Divergent>(&outcome.result)) {
    return {d->direction == en::Direction::MinusInfinity ? "divergent_minus_inf" : "divergent_plus_inf",
            d->total_switchings};
  }
  return {"undetermined", std::get<en::Undetermined>(outcome.result).switchings_executed};
}

TheoremCheck check_theorem(const Rat& tau, const en::Limits& limits) {
  if (tau < an::kRangeLow || tau >= an::kRangeHigh) {
    throw DomainError("check_theorem covers tau in [4/3, 3/2), got " + tau.str());
  }
  TheoremCheck c{tau, an::classify(tau), en::run(tau, limits), {}, false, false, {}};
  c.simulated = summarize(c.outcome);

  if (c.outcome.undetermined()) {
    c.reason = "horizon";
    return c;
  }
  const std::string expected{an::behavior_name(*c.prediction.behavior)};
  if (c.simulated.behavior != expected) {
    c.reason = "behavior: predicted " + expected + ", simulated " + c.simulated.behavior;
    return c;
  }
  if (c.simulated.switches != c.prediction.switch_count) {
    c.reason = "switch count: predicted " + std::to_string(c.prediction.switch_count) + ", simulated " +
               std::to_string(c.simulated.switches);
    return c;
  }
  if (const auto* p = std::get_if<en::Periodic>(&c.outcome.result)) {
    c.certificate_ok = en::certify_period(tau, en::InitialCondition::canonical(tau), *p);
    if (!c.certificate_ok) {
      c.reason = "period certificate failed";
      return c;
    }
  }
  c.agree = true;
  return c;
}

ClosedFormCheck check_closed_form(const Rat& tau) {
  if (tau < an::kRangeLow || tau >= an::kRangeHigh) {
    throw DomainError("check_closed_form covers tau in [4/3, 3/2), got " + tau.str());
  }
  constexpr unsigned kJCap = 1u << 14;
  const an::Horizon horizon = an::scan_horizon(tau, kJCap);
  if (!horizon) throw DomainError("no finite horizon below " + std::to_string(kJCap) + " for tau " + tau.str());

  ClosedFormCheck c;
  c.tau = tau;
  c.J = *horizon;

  en::Simulator sim(tau);
  while (sim.switch_count() < c.J && !sim.detect_divergence()) sim.step();
  c.turning_points = sim.turning_points();

  const auto& tps = c.turning_points;
  std::vector<Rat> betas;
  std::vector<Rat> alphas;
  for (const auto& tp : tps) {
    betas.push_back(tp.beta);
    alphas.push_back(tp.alpha);
  }

  c.compared = std::min<std::size_t>(c.J, tps.size());
  for (unsigned j = 1; j <= c.compared; ++j) {
    if (betas[j - 1] != an::beta_closed(j, tau)) c.beta_mismatches.push_back(j);
    const bool alpha_ok = alphas[j - 1] == an::alpha_closed(j, tau) &&
                          (j < 2 || an::alpha_from_beta(j, tau, betas) == alphas[j - 1]);
    if (!alpha_ok) c.alpha_mismatches.push_back(j);
  }

  for (unsigned j = 1; j <= alphas.size(); ++j) {
    const bool holds = (j % 2 == 1) ? alphas[j - 1] > 1 : alphas[j - 1] < 1;
    if (!holds) {
      c.simulated_J = j;
      break;
    }
  }

  c.lemma_holds = an::lemma_positive_even(alphas, c.J);
  c.agree = c.compared == c.J && c.beta_mismatches.empty() && c.alpha_mismatches.empty() && c.simulated_J == c.J;
  return c;
}

namespace {

void refuse_near_critical(double tau, double dt) {
  const double guard = 1000.0 * dt;
  auto near = [&](double c) { return std::abs(tau - c) <= guard; };
  if (near(1.5)) throw DomainError("float oracle: tau is within 1000*dt of the critical value 3/2");
  for (unsigned k = 1; k <= an::kDefaultKCap; ++k) {
    for (auto family : {an::CriticalFamily::Tau, an::CriticalFamily::Theta, an::CriticalFamily::Zeta}) {
      const Rat c = an::critical_value({family, k});
      if (near(c.to_double())) {
        throw DomainError("float oracle: tau is within 1000*dt of the critical value " +
                          std::string(an::family_name(family)) + "_" + std::to_string(k) + " = " + c.str() +
                          "; binary64 stepping cannot resolve it");
      }
    }
  }
}

}  // namespace

std::vector<FloatTurn> float_oracle(const Rat& tau, const FloatOracleOptions& options) {
  const double dt = options.dt;
  if (!(dt > 0.0) || dt > 1e-6) throw DomainError("float oracle requires 0 < dt <= 1e-6");
  if (tau.sign() <= 0) throw DomainError("delay must be positive, got " + tau.str());
  const double tau_d = tau.to_double();
  refuse_near_critical(tau_d, dt);

  const auto delay_steps = static_cast<long long>(std::ceil(tau_d / dt - 1e-9));
  const double h = tau_d / static_cast<double>(delay_steps);
  const long long ring = delay_steps + 1;
  auto slot = [ring](long long n) { return static_cast<std::size_t>(((n % ring) + ring) % ring); };

  // Samples x_{n-D} .. x_n of the canonical history phi(t) = t.
  std::vector<double> history(static_cast<std::size_t>(ring));
  for (long long m = -delay_steps; m <= 0; ++m) history[slot(m)] = static_cast<double>(m) * h;

  std::vector<FloatTurn> turns;
  double x = 0.0;
  double s = 1.0;
  const auto last_step = static_cast<long long>(std::ceil(options.t_end / h));
  for (long long n = 0; n < last_step && turns.size() < options.max_turns; ++n) {
    const double before = history[slot(n - delay_steps)];
    const double after = history[slot(n + 1 - delay_steps)];

    double x_next = x + s * h;
    for (const double level : {0.0, 1.0}) {
      const double a = before - level;
      const double b = after - level;
      if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
        const double f = (b == 0.0) ? 1.0 : a / (a - b);
        const double x_turn = x + s * f * h;
        turns.push_back({(static_cast<double>(n) + f) * h, x_turn});
        s = -s;
        x_next = x_turn + s * (1.0 - f) * h;
        break;
      }
    }
    x = x_next;
    history[slot(n + 1)] = x;
  }
  return turns;
}

OracleComparison compare_with_oracle(const Rat& tau, std::size_t n_required, double tolerance,
                                     const FloatOracleOptions& options) {
  FloatOracleOptions opts = options;
  opts.max_turns = n_required;
  const auto approx = float_oracle(tau, opts);

  en::Simulator sim(tau);
  while (sim.switch_count() < n_required && !sim.detect_divergence()) sim.step();
  const auto& exact = sim.turning_points();

  OracleComparison cmp;
  cmp.compared = std::min(approx.size(), exact.size());
  for (std::size_t i = 0; i < cmp.compared; ++i) {
    cmp.max_error = std::max({cmp.max_error, std::abs(approx[i].t - exact[i].beta.to_double()),
                              std::abs(approx[i].x - exact[i].alpha.to_double())});
  }
  cmp.ok = cmp.compared >= n_required && cmp.max_error <= tolerance;
  return cmp;
}

std::vector<Rat> sweep_points(unsigned k_max, unsigned samples_per_interval) {
  if (k_max == 0) throw DomainError("sweep needs k_max >= 1");
  std::vector<Rat> points;
  auto interior = [&](const Rat& lo, const Rat& hi) {
    const Rat n1 = samples_per_interval + 1;
    for (unsigned i = 1; i <= samples_per_interval; ++i) points.push_back(lo + (hi - lo) * Rat(i) / n1);
  };
  for (unsigned k = 1; k <= k_max; ++k) {
    const Rat t = an::tau_k(k);
    const Rat th = an::theta_k(k);
    const Rat z = an::zeta_k(k);
    points.push_back(t);
    interior(t, th);
    points.push_back(th);
    interior(th, z);
    points.push_back(z);
    interior(z, an::tau_k(k + 1));
  }
  return points;
}

SweepReport sweep(unsigned k_max, unsigned samples_per_interval) {
  const std::vector<Rat> points = sweep_points(k_max, samples_per_interval);
  std::vector<SweepEntry> entries(points.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      TheoremCheck c = check_theorem(points[i]);
      entries[i] = {points[i], c.prediction, c.simulated, c.agree, c.reason};
    }
  };
  const unsigned n_threads =
      std::clamp<unsigned>(std::thread::hardware_concurrency(), 1u, static_cast<unsigned>(points.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  }

  SweepReport report;
  report.entries = std::move(entries);
  for (const auto& e : report.entries) (e.agree ? report.agreed : report.disagreed)++;
  return report;
}

namespace {

std::string regime_label(const an::Regime& r) {
  std::string s{an::regime_name(r.kind)};
  if (r.kind != an::RegimeKind::OutOfRange) s += "(" + std::to_string(r.k) + ")";
  return s;
}

}  // namespace

std::string SweepReport::to_csv() const {
  std::ostringstream os;
  os << "tau,regime,predicted_behavior,predicted_switches,simulated_behavior,simulated_switches,agree\n";
  for (const auto& e : entries) {
    os << e.tau.str() << ',' << regime_label(e.prediction.regime) << ','
       << (e.prediction.behavior ? an::behavior_name(*e.prediction.behavior) : "") << ','
       << e.prediction.switch_count << ',' << e.simulated.behavior << ',' << e.simulated.switches << ','
       << (e.agree ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string SweepReport::to_json() const {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json row;
    row["tau"] = e.tau.str();
    row["tau_decimal"] = e.tau.to_decimal(12);
    row["regime"] = an::regime_name(e.prediction.regime.kind);
    row["k"] = e.prediction.regime.k;
    row["predicted_behavior"] = e.prediction.behavior ? an::behavior_name(*e.prediction.behavior) : "";
    row["predicted_switches"] = e.prediction.switch_count;
    row["simulated_behavior"] = e.simulated.behavior;
    row["simulated_switches"] = e.simulated.switches;
    row["agree"] = e.agree;
    if (!e.agree) row["reason"] = e.reason;
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json doc;
  doc["entries"] = std::move(rows);
  doc["summary"] = {{"total", entries.size()}, {"agreed", agreed}, {"disagreed", disagreed}};
  return doc.dump(2) + "\n";
}

}  // namespace retswitch::validate
