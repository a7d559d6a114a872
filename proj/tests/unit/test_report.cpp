#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "ldes/cli.hpp"
#include "ldes/config_io.hpp"
#include "ldes/report.hpp"
#include "ldes/synthetic.hpp"
#include "ldes/text.hpp"

using namespace ldes;
using doctest::Approx;
using fixtures::TempDir;
namespace fs = std::filesystem;

namespace {

const std::vector<ContractFamily> kAll{ContractFamily::RevenueCfD, ContractFamily::SpreadCfD, ContractFamily::CapFloor,
                                       ContractFamily::Availability};

StudyReport study(const std::vector<ContractFamily>& mechanisms) {
  const SystemConfig c = default_gb_config(1, 24, 7);
  Evaluator ev(c);
  StudySpec spec;
  spec.mechanisms = mechanisms;
  std::string kind;
  StudyReport r = run_study(ev, spec, &kind);
  REQUIRE(kind.empty());
  return r;
}

const StudyReport& full_study() {
  static const StudyReport r = study(kAll);
  return r;
}

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ldes");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = text::read_file(e.path().string());
  return files;
}

}  // namespace

TEST_CASE("consumer-surplus index anchors") {
  CHECK(*cs_index(10.0, 10.0, 30.0) == 0.0);
  CHECK(*cs_index(30.0, 10.0, 30.0) == 100.0);
  CHECK(*cs_index(20.0, 10.0, 30.0) == 50.0);
  // A span of either sign is allowed.
  CHECK(*cs_index(25.0, 30.0, 10.0) == Approx(25.0));
  CHECK_FALSE(cs_index(5.0, 7.0, 7.0));
}

TEST_CASE("cost incidence names") {
  CHECK(parse_incidence("consumers") == CostIncidence::Consumers);
  CHECK(parse_incidence("none") == CostIncidence::None);
  CHECK_FALSE(parse_incidence("producers"));
  CHECK(incidence_name(CostIncidence::None) == "none");
}

TEST_CASE("study: baselines and index anchors") {
  const StudyReport& r = full_study();
  REQUIRE(r.status == "complete");
  for (const auto& row : r.cs_index) {
    if (row.mechanism == "none") {
      CHECK(*row.mean_index == 0.0);
      CHECK(*row.cvar_index == 0.0);
    }
    if (row.mechanism == "risk-neutral") {
      CHECK(*row.mean_index == 100.0);
      CHECK(*row.cvar_index == 100.0);
    }
  }
  CHECK(r.cs_index.size() == 2 * (2 + kAll.size()));
  CHECK(r.provenance.config_hash == config_hash(default_gb_config(1, 24, 7)));
  CHECK(r.provenance.grid_points == 21);
  CHECK(r.provenance.zero_profit_tolerance == 1e-3);
}

TEST_CASE("study: the revenue CfD row collapses to the risk-free rate") {
  const StudyReport& r = full_study();
  bool seen = false;
  for (const auto& row : r.table2) {
    if (row.mechanism != "rcfd") continue;
    seen = true;
    REQUIRE(row.cv);
    CHECK(*row.cv == Approx(0.0).epsilon(1e-9));
    CHECK(row.implied_wacc == Approx(0.071).epsilon(1e-9));
    CHECK(row.min_irr == Approx(0.071).epsilon(1e-9));
  }
  CHECK(seen);
  for (const auto& row : r.table3) {
    if (row.mechanism == "rcfd") {
      CHECK(row.parameter == Approx(100.0));
      CHECK(std::abs(row.cost_installed) <= 1e-9);
    }
  }
}

TEST_CASE("study: calibrated mechanisms hit the target") {
  const StudyReport& r = full_study();
  REQUIRE(r.calibrations.size() == kAll.size());
  for (const auto& c : r.calibrations) {
    CAPTURE(c.mechanism);
    CHECK(std::abs(c.residual_mw) <= c.grid_step_mw);
  }
  for (const auto& [mech, rows] : r.sweeps) CHECK(rows.size() == r.provenance.deltas.size());
}

TEST_CASE("study: repeated runs give byte-identical files") {
  const auto a = render_files(full_study(), true, true);
  const auto b = render_files(study(kAll), true, true);
  CHECK(a == b);
  for (const char* name : {"table1.csv", "table2.csv", "table3.csv", "cs_index.csv", "result.json",
                           "irr_cdf_rcfd.csv", "payouts_avc.csv", "sweep_cf.csv"}) {
    CHECK(a.count(name) == 1);
  }
}

TEST_CASE("study: files regenerate from result.json") {
  const StudyReport& r = full_study();
  const auto original = render_files(r, true, true);
  const StudyReport back = report_from_json(original.at("result.json"));
  CHECK(render_files(back, true, true) == original);
  CHECK_THROWS(report_from_json("{\"format\": \"something-else\"}"));
}

TEST_CASE("study: an empty mechanism list gives the baselines only") {
  const StudyReport r = study({});
  CHECK(r.status == "complete");
  CHECK(r.table3.empty());
  CHECK(r.calibrations.empty());
  CHECK(r.sweeps.empty());
  CHECK(r.table1.deltas.size() == 5);
  CHECK(r.cs_index.size() == 4);
  const auto files = render_files(r, true, false);
  CHECK(files.count("table1.csv") == 1);
  CHECK(files.count("result.json") == 0);
}

TEST_CASE("study: a failing stage leaves a tagged, incomplete report") {
  const SystemConfig c = default_gb_config(1, 24, 7);
  Evaluator ev(c);
  StudySpec spec;
  spec.mechanisms = {ContractFamily::RevenueCfD};
  spec.target_mw = 1e9;
  std::string kind;
  const StudyReport r = run_study(ev, spec, &kind);
  CHECK(r.status == "incomplete");
  CHECK(r.failed_stage == "calibration:rcfd");
  CHECK(kind == "validation");
  CHECK_FALSE(r.table1.rows.empty());

  TempDir dir;
  write_report(r, dir.path.string(), true);
  CHECK(fs::exists(dir.path / "INCOMPLETE"));
  CHECK(fs::exists(dir.path / "result.json"));
}

TEST_CASE("cli: usage and exit codes") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"equilibrium", "--config", "x.cfg", "--bogus"}).code == 1);
  CHECK(cli({"equilibrium", "--config", "/nonexistent/x.cfg"}).code == 1);
  CHECK(cli({"equilibrium", "--config", "x.cfg", "--format", "xml"}).code == 1);
  CHECK(cli({"report"}).code == 1);
}

TEST_CASE("cli: generated config drives every subcommand") {
  TempDir dir;
  const std::string cfg = dir.file("gb.cfg");
  REQUIRE(cli({"gen-config", "--weather", "1", "--steps", "24", "--seed", "7", "--out", cfg}).code == 0);
  CHECK(load_config(cfg) == default_gb_config(1, 24, 7));

  SUBCASE("dispatch") {
    const Run r = cli({"dispatch", "--config", cfg, "--capacity", "ldes=2000", "--out", dir.file("d"), "--lp-dump",
                       dir.file("d.lp")});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir.file("d/dispatch.csv")));
    CHECK(text::read_file(dir.file("d.lp")).find("Subject To") != std::string::npos);
    CHECK(cli({"dispatch", "--config", cfg, "--capacity", "hydro=5", "--out", dir.file("d")}).code == 1);
  }
  SUBCASE("equilibrium") {
    const Run r = cli({"equilibrium", "--config", cfg, "--delta", "1.0", "--out", dir.file("e")});
    CHECK(r.code == 0);
    CHECK(r.out.find("ldes") != std::string::npos);
    CHECK(fs::exists(dir.file("e/equilibrium.json")));
    CHECK(cli({"equilibrium", "--config", cfg, "--mechanism", "swap", "--parameter", "1"}).code == 1);
  }
  SUBCASE("calibrate") {
    const Run r = cli({"calibrate", "--config", cfg, "--mechanism", "rcfd", "--target-gw", "2", "--out", dir.file("c")});
    CHECK(r.code == 0);
    CHECK(r.out.find("strike 100% of F") != std::string::npos);
    // Bounds that cannot reach the target are a numerical failure.
    CHECK(cli({"calibrate", "--config", cfg, "--mechanism", "avc", "--bounds", "1.5,2", "--target-gw", "1", "--out",
               dir.file("c")})
              .code == 2);
  }
  SUBCASE("sweep") {
    const Run r = cli({"sweep", "--config", cfg, "--delta", "1.0,0.9,0.8,0.7,0.6", "--out", dir.file("s")});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("metric,1.0,0.9,0.8,0.7,0.6\n", 0) == 0);
    CHECK(r.out.find("implied_wacc_pct") != std::string::npos);
  }
  SUBCASE("report and regeneration") {
    const Run r = cli({"report", "--config", cfg, "--mechanism", "rcfd,avc", "--out", dir.file("r")});
    CHECK(r.code == 0);
    const Run again = cli({"report", "--from", dir.file("r/result.json"), "--out", dir.file("r2")});
    CHECK(again.code == 0);
    CHECK(read_dir(dir.file("r")) == read_dir(dir.file("r2")));
    CHECK(cli({"report", "--config", cfg, "--mechanism", "none", "--out", dir.file("r3")}).code == 0);
    // Baselines only: no mechanism table.
    CHECK(fs::exists(dir.file("r3/table1.csv")));
    CHECK_FALSE(fs::exists(dir.file("r3/table3.csv")));
  }
}
