#pragma once

// Studies: baselines, risk-aversion sweep, contract calibration, and the
// report tables and plot data derived from them.
//
// A StudyReport holds every number that appears in an output file, and the
// files are written from it alone. Its JSON form (result.json) therefore
// regenerates the same files byte for byte.

#include <map>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldes/calibration.hpp"
#include "ldes/contract.hpp"
#include "ldes/equilibrium.hpp"
#include "ldes/model.hpp"

namespace ldes {

inline constexpr const char* kVersion = "0.1.0";

// 100 (m - incomplete) / (risk_neutral - incomplete); empty when the two
// baselines coincide.
std::optional<double> cs_index(double mechanism_cs, double incomplete_cs, double risk_neutral_cs);

enum class CostIncidence { Consumers, None };
std::string_view incidence_name(CostIncidence c);
std::optional<CostIncidence> parse_incidence(std::string_view s);

struct StudySpec {
  std::vector<ContractFamily> mechanisms;
  std::vector<double> deltas{1.0, 0.9, 0.8, 0.7, 0.6};
  double delta = 0.6;              // risk aversion of the calibration study
  std::optional<double> target_mw;  // default: risk-neutral capacity
  GridSpec grid;
  CostIncidence incidence = CostIncidence::Consumers;
  int workers = 1;
};

// Per-scenario summary of an equilibrium under a contract.
struct Outcome {
  std::string label;  // "none", "risk-neutral" or a family name
  double delta = 1.0;
  double capacity_mw = 0.0;
  std::map<std::string, double> capacities;
  std::string selection;
  bool multiple_equilibria = false;
  double rho = 0.0;
  std::map<std::string, double> residuals;
  std::vector<std::string> scenarios;
  std::vector<double> probabilities;
  std::vector<double> revenue;  // settled: pi + kappa, $/MW-yr
  std::vector<double> payoff;   // kappa, $/MW-yr
  std::vector<double> irr;
  std::vector<bool> irr_finite;
  std::vector<double> consumer_surplus;  // before contract charges, $
  double implied_wacc = 0.0;
  double mean_price = 0.0;
  double unmet_gwh = 0.0;
  std::map<std::string, double> generation_twh;
  double curtailment_twh = 0.0;
};

Outcome summarize(const SystemConfig& config, const EquilibriumResult& eq, const std::string& label);

struct Table1 {
  std::vector<double> deltas;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
};

struct Table2Row {
  std::string mechanism;
  std::optional<double> cv;
  double min_irr = 0.0;
  double cvar_irr = 0.0;
  double implied_wacc = 0.0;
};

struct Table3Row {
  std::string mechanism;
  double parameter = 0.0;  // as displayed (percent, or $/MWh)
  std::string unit;
  double ldes_gw = 0.0;
  double cost_installed = 0.0;  // fraction of F
  std::optional<double> cost_incentivized;
};

struct CsRow {
  std::string mechanism;
  std::string incidence;
  double mean_cs = 0.0;
  double cvar_cs = 0.0;
  std::optional<double> mean_index;
  std::optional<double> cvar_index;
};

struct CalibrationRecord {
  std::string mechanism;
  std::string contract;
  double parameter = 0.0;
  double target_mw = 0.0;
  double capacity_mw = 0.0;
  double residual_mw = 0.0;
  double grid_step_mw = 0.0;
  double rho_at_target = 0.0;
  int iterations = 0;
  std::vector<std::pair<double, double>> curve;
};

struct SweepRow {
  double delta = 0.0;
  double parameter = 0.0;
  double ldes_gw = 0.0;
  double cost_installed = 0.0;
  std::optional<double> cost_incentivized;
  double implied_wacc = 0.0;
};

struct Provenance {
  std::string version = kVersion;
  std::string config_hash;
  std::uint64_t seed = 0;
  int grid_points = 0;
  double tolerance_mw = 0.0;
  double plateau_tolerance = 0.0;
  double zero_profit_tolerance = 0.0;
  double psi = 0.0;
  double risk_free_rate = 0.0;
  double study_delta = 0.0;
  std::vector<double> deltas;
  std::vector<std::string> mechanisms;
  std::string incidence;
  double target_mw = 0.0;
  std::string technology;
  double fixed_cost = 0.0;  // F of the contracted technology
};

struct StudyReport {
  std::string status = "complete";
  std::string failed_stage;
  std::string error;
  Provenance provenance;
  std::vector<Outcome> outcomes;  // baselines, sweep and mechanisms
  Table1 table1;
  std::vector<Table2Row> table2;
  std::vector<Table3Row> table3;
  std::vector<CsRow> cs_index;
  std::vector<CalibrationRecord> calibrations;
  std::map<std::string, std::vector<SweepRow>> sweeps;
};

// Runs the study on an existing evaluator. On a stage failure the report
// is returned with status "incomplete" and the failing stage recorded;
// `error_kind` receives "validation" or "numerical" in that case.
StudyReport run_study(Evaluator& evaluator, const StudySpec& spec, std::string* error_kind = nullptr);

std::string to_json(const StudyReport& report);
StudyReport report_from_json(const std::string& text);

// File name -> contents of every report file, result.json included when
// `with_json`. CSV files are left out when `csv` is false.
std::map<std::string, std::string> render_files(const StudyReport& report, bool csv, bool with_json);
// Writes the rendered files (and an INCOMPLETE marker when applicable).
void write_report(const StudyReport& report, const std::string& dir, bool csv);

// Table-I layout for a list of no-contract equilibria.
Table1 make_table1(const SystemConfig& config, const std::vector<Outcome>& sweep);
std::string table1_csv(const Table1& t);

}  // namespace ldes
