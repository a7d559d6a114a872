#pragma once

// Small hand-built systems shared by the unit tests.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "ldes/model.hpp"

namespace fixtures {

using namespace ldes;

inline Technology thermal(const std::string& name, double var_cost, double cap_fixed) {
  Technology t;
  t.name = name;
  t.kind = TechKind::Thermal;
  t.var_cost = var_cost;
  t.cap_max = cap_fixed;
  t.cap_fixed = cap_fixed;
  return t;
}

inline Technology investable_thermal(const std::string& name, double var_cost, double fixed_cost, double cap_max) {
  Technology t;
  t.name = name;
  t.kind = TechKind::Thermal;
  t.var_cost = var_cost;
  t.invest_cost_annualized = fixed_cost;
  t.cap_max = cap_max;
  return t;
}

inline Technology storage(const std::string& name, double power, double duration, double rte) {
  Technology t;
  t.name = name;
  t.kind = TechKind::Storage;
  t.cap_max = power;
  t.cap_fixed = power;
  t.storage_duration = duration;
  t.round_trip_efficiency = rte;
  return t;
}

inline Technology renewable(const std::string& name, double cap_fixed) {
  Technology t;
  t.name = name;
  t.kind = TechKind::Renewable;
  t.cap_max = cap_fixed;
  t.cap_fixed = cap_fixed;
  return t;
}

// One scenario with the given step weights and inelastic demand, no flexible
// tier. The first technology is the contract technology.
inline SystemConfig micro(std::vector<double> weights, std::vector<double> demand, std::vector<Technology> techs,
                          double flexible_mw = 0.0) {
  SystemConfig c;
  c.technologies = std::move(techs);
  c.time_grid.weights = std::move(weights);
  c.demand.flexible_mw = flexible_mw;
  Scenario s;
  s.id = "s";
  s.probability = 1.0;
  s.demand_mw = std::move(demand);
  for (const auto& t : c.technologies) {
    if (t.is_renewable()) s.capacity_factors[t.name].assign(s.demand_mw.size(), 1.0);
  }
  c.scenarios.push_back(s);
  c.contract_technology = c.technologies.front().name;
  return c;
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("ldes_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace fixtures
