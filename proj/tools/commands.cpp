#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

#include <CLI11.hpp>
#include <json.hpp>

#include "retswitch/analysis.hpp"
#include "retswitch/engine.hpp"
#include "retswitch/rat.hpp"
#include "retswitch/render.hpp"
#include "retswitch/validate.hpp"

namespace retswitch::cli {

namespace {

using json = nlohmann::ordered_json;
namespace an = analysis;
namespace en = engine;

constexpr unsigned kDecimalDigits = 12;

/// Failure that maps directly onto an exit code.
struct CommandError {
  int code;
  std::string message;
};

Rat parse_tau(const std::string& text) {
  Rat tau;
  try {
    tau = Rat::parse(text);
  } catch (const ParseError& e) {
    throw CommandError{kUsage, e.what()};
  }
  if (tau.sign() <= 0) throw CommandError{kUsage, "tau must be positive, got " + tau.str()};
  return tau;
}

json exact(const Rat& v) { return {{"exact", v.str()}, {"decimal", v.to_decimal(kDecimalDigits)}}; }

json turning_json(const en::TurningPoint& tp) {
  return {{"t", tp.beta.str()},
          {"t_decimal", tp.beta.to_decimal(kDecimalDigits)},
          {"x", tp.alpha.str()},
          {"x_decimal", tp.alpha.to_decimal(kDecimalDigits)}};
}

json prediction_json(const Rat& tau, const an::Prediction& p) {
  json j;
  j["tau"] = tau.str();
  j["regime"] = an::regime_name(p.regime.kind);
  if (p.in_range()) {
    j["k"] = p.regime.k;
    j["behavior"] = an::behavior_name(*p.behavior);
    j["switch_count"] = p.switch_count;
  }
  return j;
}

json outcome_json(const en::Outcome& o) {
  json j;
  if (const auto* p = std::get_if<en::Periodic>(&o.result)) {
    j["outcome"] = "periodic";
    j["least_period"] = exact(p->least_period);
    j["switchings_per_period"] = p->switchings_per_period;
    j["period_start"] = p->period_start;
    json pts = json::array();
    for (const auto& tp : p->period_turning_points) pts.push_back(turning_json(tp));
    j["period_turning_points"] = std::move(pts);
  } else if (const auto* d = std::get_if<en::Divergent>(&o.result)) {
    j["outcome"] = d->direction == en::Direction::MinusInfinity ? "divergent_minus_inf" : "divergent_plus_inf";
    j["total_switchings"] = d->total_switchings;
  } else {
    j["outcome"] = "undetermined";
    j["switchings_executed"] = std::get<en::Undetermined>(o.result).switchings_executed;
  }
  json pts = json::array();
  for (const auto& tp : o.turning_points) pts.push_back(turning_json(tp));
  j["turning_points"] = std::move(pts);
  return j;
}

json trace_json(const Rat& tau, const en::Outcome& o) {
  json events = json::array();
  for (const auto& e : o.events) {
    events.push_back({{"t", e.t.str()}, {"x", e.x.str()}, {"kind", e.kind == en::EventKind::Hit ? "hit" : "switch"}});
  }
  json summary = outcome_json(o);
  summary.erase("turning_points");
  return {{"tau", tau.str()}, {"events", std::move(events)}, {"outcome", std::move(summary)}};
}

/// Writes through a sibling temporary file and renames it into place.
void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CommandError{kIoError, "cannot open " + tmp.string() + " for writing"};
    f << content;
    f.flush();
    if (!f) throw CommandError{kIoError, "write to " + tmp.string() + " failed"};
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw CommandError{kIoError, "cannot move output into " + path};
  }
}

/// One "t x" pair per line; '#' starts a comment.
en::InitialCondition read_ic(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CommandError{kIoError, "cannot read initial condition file " + path};
  std::vector<en::Breakpoint> points;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string t, x, extra;
    if (!(ls >> t)) continue;
    if (!(ls >> x) || (ls >> extra)) {
      throw CommandError{kUsage, path + ":" + std::to_string(line_no) + ": expected 't x'"};
    }
    try {
      points.push_back({Rat::parse(t), Rat::parse(x)});
    } catch (const ParseError& e) {
      throw CommandError{kUsage, path + ":" + std::to_string(line_no) + ": " + e.what()};
    }
  }
  return en::InitialCondition(std::move(points));
}

struct Options {
  std::string tau;
  unsigned k_cap = an::kDefaultKCap;
  std::size_t max_switches = 10'000;
  std::string max_time = "10000";
  std::string trace_path;
  std::string ic_path;
  std::string kind;
  unsigned k_from = 1;
  unsigned k_to = 1;
  std::string format;
  unsigned k_max = 6;
  unsigned samples = 3;
  std::string out_path;
  unsigned width = 960;
  unsigned height = 320;
  std::vector<unsigned> labels;
  bool no_labels = false;
  std::string title;
};

int cmd_classify(const Options& o, std::ostream& out) {
  const Rat tau = parse_tau(o.tau);
  out << prediction_json(tau, an::classify(tau, o.k_cap)).dump() << '\n';
  return kOk;
}

en::Limits limits_from(const Options& o) {
  en::Limits limits;
  limits.max_switches = o.max_switches;
  try {
    limits.max_time = Rat::parse(o.max_time);
  } catch (const ParseError& e) {
    throw CommandError{kUsage, e.what()};
  }
  if (limits.max_switches == 0 || limits.max_time.sign() <= 0) {
    throw CommandError{kUsage, "--max-switches and --max-time must be positive"};
  }
  return limits;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Rat tau = parse_tau(o.tau);
  const en::Limits limits = limits_from(o);
  const en::InitialCondition ic = o.ic_path.empty() ? en::InitialCondition::canonical(tau) : read_ic(o.ic_path);
  try {
    ic.validate(tau);
  } catch (const en::InvalidInitialCondition& e) {
    throw CommandError{kUsage, std::string("invalid initial condition: ") + e.what()};
  }

  const en::Outcome outcome = en::run(tau, ic, limits);

  json j;
  j["tau"] = tau.str();
  j["tau_decimal"] = tau.to_decimal(kDecimalDigits);
  const json body = outcome_json(outcome);
  for (const auto& [key, value] : body.items()) j[key] = value;
  const an::Prediction prediction = an::classify(tau);
  if (prediction.in_range()) j["classification"] = prediction_json(tau, prediction);
  if (!o.trace_path.empty()) write_atomically(o.trace_path, trace_json(tau, outcome).dump(2) + "\n");

  out << j.dump(2) << '\n';
  return outcome.undetermined() ? kUndetermined : kOk;
}

int cmd_critical(const Options& o, std::ostream& out) {
  an::CriticalFamily family;
  if (o.kind == "tau") {
    family = an::CriticalFamily::Tau;
  } else if (o.kind == "theta") {
    family = an::CriticalFamily::Theta;
  } else if (o.kind == "zeta") {
    family = an::CriticalFamily::Zeta;
  } else {
    throw CommandError{kUsage, "--kind must be tau, theta or zeta"};
  }
  if (o.k_from < 1 || o.k_from > o.k_to) throw CommandError{kUsage, "need 1 <= --k-from <= --k-to"};

  auto interleaved = [](unsigned k) {
    return an::tau_k(k) < an::theta_k(k) && an::theta_k(k) < an::zeta_k(k) && an::zeta_k(k) < an::tau_k(k + 1) &&
           an::tau_k(k + 1) < an::kRangeHigh;
  };

  const std::string name{an::family_name(family)};
  if (o.format == "json") {
    json rows = json::array();
    for (unsigned k = o.k_from; k <= o.k_to; ++k) {
      const Rat v = an::critical_value({family, k});
      rows.push_back({{"kind", name},
                      {"k", k},
                      {"value", v.str()},
                      {"decimal", v.to_decimal(kDecimalDigits)},
                      {"interleaved", interleaved(k)}});
    }
    out << rows.dump(2) << '\n';
  } else if (o.format.empty() || o.format == "csv") {
    out << "kind,k,value,decimal,interleaved\n";
    for (unsigned k = o.k_from; k <= o.k_to; ++k) {
      const Rat v = an::critical_value({family, k});
      out << name << ',' << k << ',' << v.str() << ',' << v.to_decimal(kDecimalDigits) << ','
          << (interleaved(k) ? "true" : "false") << '\n';
    }
  } else {
    throw CommandError{kUsage, "--format must be csv or json"};
  }
  return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  if (o.k_max < 1) throw CommandError{kUsage, "--k-max must be >= 1"};
  std::string format = o.format;
  if (format.empty()) format = o.out_path.ends_with(".json") ? "json" : "csv";
  if (format != "csv" && format != "json") throw CommandError{kUsage, "--format must be csv or json"};

  const validate::SweepReport report = validate::sweep(o.k_max, o.samples);
  const std::string body = format == "json" ? report.to_json() : report.to_csv();
  if (o.out_path.empty()) {
    out << body;
  } else {
    write_atomically(o.out_path, body);
    out << json{{"entries", report.entries.size()}, {"agreed", report.agreed}, {"disagreed", report.disagreed},
                {"out", o.out_path}}
               .dump()
        << '\n';
  }
  return report.all_agree() ? kOk : kDisagreement;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Rat tau = parse_tau(o.tau);
  if (tau < an::kRangeLow || tau >= an::kRangeHigh) {
    throw CommandError{kUsage, "verify covers tau in [4/3, 3/2), got " + tau.str()};
  }
  const validate::TheoremCheck theorem = validate::check_theorem(tau);
  const validate::ClosedFormCheck closed = validate::check_closed_form(tau);

  json j;
  j["tau"] = tau.str();
  j["prediction"] = prediction_json(tau, theorem.prediction);
  j["simulated"] = {{"behavior", theorem.simulated.behavior}, {"switches", theorem.simulated.switches}};
  if (theorem.outcome.periodic()) {
    const auto& p = std::get<en::Periodic>(theorem.outcome.result);
    j["least_period"] = exact(p.least_period);
    j["period_certificate"] = theorem.certificate_ok;
    json pts = json::array();
    for (const auto& tp : p.period_turning_points) pts.push_back(turning_json(tp));
    j["period_turning_points"] = std::move(pts);
  }
  j["theorem_agree"] = theorem.agree;
  if (!theorem.agree) j["theorem_reason"] = theorem.reason;
  j["closed_form"] = {{"J", closed.J},
                      {"simulated_J", closed.simulated_J},
                      {"compared", closed.compared},
                      {"beta_mismatches", closed.beta_mismatches},
                      {"alpha_mismatches", closed.alpha_mismatches},
                      {"lemma_positive_even", closed.lemma_holds},
                      {"agree", closed.agree}};
  const bool ok = theorem.agree && closed.agree && closed.lemma_holds;
  j["status"] = ok ? "OK" : "MISMATCH";
  out << j.dump(2) << '\n';
  return ok ? kOk : kDisagreement;
}

int cmd_render(const Options& o, std::ostream& out) {
  const Rat tau = parse_tau(o.tau);
  const en::Outcome outcome = en::run(tau, limits_from(o));

  render::RenderOptions ro;
  ro.width = o.width;
  ro.height = o.height;
  ro.title = o.title.empty() ? "tau = " + tau.str() : o.title;
  if (!o.no_labels) {
    if (o.labels.empty()) {
      for (unsigned j = 1; j <= outcome.turning_points.size(); ++j) ro.label_indices.push_back(j);
    } else {
      ro.label_indices = o.labels;
    }
  }
  std::string svg;
  try {
    svg = render::render_outcome(outcome, ro);
  } catch (const std::invalid_argument& e) {
    throw CommandError{kUsage, e.what()};
  }
  if (o.out_path.empty()) {
    out << svg;
  } else {
    write_atomically(o.out_path, svg);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact simulator and classifier for a delay-switched relay system"};
  app.set_config("--config", "", "Optional key=value configuration file; flags override it");
  app.require_subcommand(1);

  Options o;

  auto* classify = app.add_subcommand("classify", "Predicted regime, behavior and switch count for tau");
  classify->add_option("tau", o.tau, "Delay as p/q, integer, or finite decimal")->required();
  classify->add_option("--k-cap", o.k_cap, "Largest k searched");

  auto* simulate = app.add_subcommand("simulate", "Exact event-driven simulation");
  simulate->add_option("tau", o.tau, "Delay")->required();
  simulate->add_option("--max-switches", o.max_switches, "Switch budget");
  simulate->add_option("--max-time", o.max_time, "Time budget (rational)");
  simulate->add_option("--trace", o.trace_path, "Write the full event trace as JSON");
  simulate->add_option("--ic", o.ic_path, "Initial history: one 't x' breakpoint per line on [-tau, 0]");

  auto* critical = app.add_subcommand("critical", "Table of critical delays");
  critical->add_option("--kind", o.kind, "tau, theta or zeta")->required();
  critical->add_option("--k-from", o.k_from, "First k");
  critical->add_option("--k-to", o.k_to, "Last k");
  critical->add_option("--format", o.format, "csv (default) or json");

  auto* sweep = app.add_subcommand("sweep", "Classifier against simulation over all regimes up to k-max");
  sweep->add_option("--k-max", o.k_max, "Largest k");
  sweep->add_option("--samples", o.samples, "Interior samples per open interval");
  sweep->add_option("--out", o.out_path, "Report file (.csv or .json)");
  sweep->add_option("--format", o.format, "csv or json; default from --out extension");

  auto* verify = app.add_subcommand("verify", "Theorem and closed-form cross-check for one tau");
  verify->add_option("tau", o.tau, "Delay in [4/3, 3/2)")->required();

  auto* render = app.add_subcommand("render", "SVG plot of the trajectory");
  render->add_option("tau", o.tau, "Delay")->required();
  render->add_option("--out", o.out_path, "SVG output file (stdout if omitted)");
  render->add_option("--width", o.width, "Canvas width");
  render->add_option("--height", o.height, "Canvas height");
  render->add_option("--labels", o.labels, "Turning point indices to label (default: all)")->delimiter(',');
  render->add_flag("--no-labels", o.no_labels, "Draw no turning point labels");
  render->add_option("--title", o.title, "Plot title");
  render->add_option("--max-switches", o.max_switches, "Switch budget");
  render->add_option("--max-time", o.max_time, "Time budget (rational)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (classify->parsed()) return cmd_classify(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (critical->parsed()) return cmd_critical(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (render->parsed()) return cmd_render(o, out);
  } catch (const CommandError& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const en::InvalidInitialCondition& e) {
    err << "error: invalid initial condition: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace retswitch::cli
