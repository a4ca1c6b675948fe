#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"

using retswitch::cli::run;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path tmp_path(const std::string& name) { return fs::path(TEST_TMP_DIR) / name; }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("classify") {
  auto r = invoke({"classify", "63/43"});
  CHECK(r.code == 0);
  CHECK(r.out == "{\"tau\":\"63/43\",\"regime\":\"theta_k\",\"k\":2,\"behavior\":\"divergent_minus_inf\",\"switch_count\":9}\n");

  r = invoke({"classify", "4/3"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["regime"] == "tau_k");
  CHECK(j["k"] == 1);
  CHECK(j["behavior"] == "periodic");
  CHECK(j["switch_count"] == 6);

  r = invoke({"classify", "2"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out) == json{{"tau", "2"}, {"regime", "out_of_range"}});

  CHECK(invoke({"classify", "1.5"}).code == 0);
  CHECK(invoke({"classify", "abc"}).code == 2);
  CHECK(invoke({"classify", "0"}).code == 2);
  CHECK(invoke({"classify"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
}

TEST_CASE("simulate") {
  auto r = invoke({"simulate", "7/5"});
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["outcome"] == "divergent_minus_inf");
  CHECK(j["total_switchings"] == 9);
  CHECK(j["classification"]["regime"] == "zeta_k");

  r = invoke({"simulate", "89/66"});
  CHECK(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["outcome"] == "periodic");
  CHECK(j["switchings_per_period"] == 6);
  CHECK(j["least_period"]["exact"] == "218/33");
  CHECK(j["least_period"]["decimal"] == "6.606060606061");

  r = invoke({"simulate", "1/2"});
  CHECK(r.code == 0);
  j = json::parse(r.out);
  CHECK_FALSE(j.contains("classification"));
  CHECK(j["outcome"] != "undetermined");

  r = invoke({"simulate", "4/3", "--max-switches", "3"});
  CHECK(r.code == 3);
  CHECK(json::parse(r.out)["outcome"] == "undetermined");

  CHECK(invoke({"simulate", "4/3", "--max-time", "0"}).code == 2);
  CHECK(invoke({"simulate", "-1"}).code == 2);
}

TEST_CASE("simulate writes a trace and reads a history file") {
  const fs::path trace = tmp_path("trace_63_43.json");
  fs::remove(trace);
  auto r = invoke({"simulate", "63/43", "--trace", trace.string()});
  CHECK(r.code == 0);
  const auto t = json::parse(slurp(trace));
  CHECK(t["tau"] == "63/43");
  CHECK(t["events"][0] == json{{"t", "0"}, {"x", "0"}, {"kind", "hit"}});
  CHECK(t["outcome"]["outcome"] == "divergent_minus_inf");
  std::size_t switches = 0;
  for (const auto& e : t["events"]) switches += e["kind"] == "switch";
  CHECK(switches == 9);

  const fs::path ic = tmp_path("ic_ok.txt");
  std::ofstream(ic) << "# bent history\n-147/100 -2\n-1/2 -1/4   # interior\n0 0\n";
  r = invoke({"simulate", "147/100", "--ic", ic.string()});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["switchings_per_period"] == 10);

  const fs::path bad = tmp_path("ic_bad.txt");
  std::ofstream(bad) << "-147/100 -2\n-1/2 1/2\n0 0\n";
  r = invoke({"simulate", "147/100", "--ic", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("invalid initial condition") != std::string::npos);

  CHECK(invoke({"simulate", "147/100", "--ic", tmp_path("missing.txt").string()}).code == 4);
  CHECK(invoke({"simulate", "4/3", "--trace", "/nonexistent-dir/x.json"}).code == 4);
}

TEST_CASE("critical") {
  auto r = invoke({"critical", "--kind", "tau", "--k-from", "1", "--k-to", "2"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "kind,k,value,decimal,interleaved\n"
        "tau,1,4/3,1.333333333333,true\n"
        "tau,2,16/11,1.454545454545,true\n");

  r = invoke({"critical", "--kind", "theta", "--k-from", "2", "--k-to", "2", "--format", "json"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)[0]["value"] == "63/43");

  r = invoke({"critical", "--kind", "zeta"});
  CHECK(r.code == 0);
  CHECK(r.out.find("zeta,1,7/5,") != std::string::npos);

  CHECK(invoke({"critical", "--kind", "tau", "--k-from", "3", "--k-to", "2"}).code == 2);
  CHECK(invoke({"critical", "--kind", "tau", "--k-from", "0"}).code == 2);
  CHECK(invoke({"critical", "--kind", "omega"}).code == 2);
}

TEST_CASE("sweep and verify") {
  const fs::path out = tmp_path("sweep.csv");
  fs::remove(out);
  auto r = invoke({"sweep", "--k-max", "3", "--samples", "1", "--out", out.string()});
  CHECK(r.code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find(",false") == std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 18);
  CHECK_FALSE(fs::exists(out.string() + ".tmp"));

  r = invoke({"sweep", "--k-max", "1", "--samples", "0", "--format", "json"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["summary"]["total"] == 3);

  r = invoke({"verify", "1328/903"});
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["status"] == "OK");
  CHECK(j["period_turning_points"].size() == 10);
  CHECK(j["period_turning_points"][6]["x"] == "5/21");  // 43*tau - 63

  r = invoke({"verify", "145/99"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["prediction"]["regime"] == "tau_theta");

  CHECK(invoke({"verify", "2"}).code == 2);
  CHECK(invoke({"sweep", "--k-max", "0"}).code == 2);
  CHECK(invoke({"sweep", "--k-max", "1", "--out", "/nonexistent-dir/r.csv"}).code == 4);
}

TEST_CASE("render is byte-deterministic") {
  const fs::path a = tmp_path("fig_a.svg");
  const fs::path b = tmp_path("fig_b.svg");
  CHECK(invoke({"render", "64/43", "--out", a.string()}).code == 0);
  CHECK(invoke({"render", "64/43", "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("<?xml", 0) == 0);

  const auto r = invoke({"render", "63/43", "--labels", "1,9", "--title", "theta_2"});
  CHECK(r.code == 0);
  CHECK(r.out.find(">α9</text>") != std::string::npos);
  CHECK(r.out.find(">α2</text>") == std::string::npos);
  CHECK(r.out.find("marker-end") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags override it") {
  const fs::path cfg = tmp_path("retswitch.ini");
  std::ofstream(cfg) << "[critical]\nkind=zeta\nk-to=2\n";
  auto r = invoke({"--config", cfg.string(), "critical"});
  CHECK(r.code == 0);
  CHECK(r.out.find("zeta,2,31/21,") != std::string::npos);

  r = invoke({"--config", cfg.string(), "critical", "--kind", "theta"});
  CHECK(r.code == 0);
  CHECK(r.out.find("theta,2,63/43,") != std::string::npos);
}
