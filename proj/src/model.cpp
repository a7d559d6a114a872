#include "ldes/model.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "ldes/errors.hpp"

namespace ldes {

std::string_view to_string(TechKind k) {
  switch (k) {
    case TechKind::Thermal: return "thermal";
    case TechKind::Renewable: return "renewable";
    case TechKind::Storage: return "storage";
    case TechKind::NuclearFixed: return "nuclear-fixed";
  }
  return "unknown";
}

std::optional<TechKind> parse_tech_kind(std::string_view s) {
  if (s == "thermal") return TechKind::Thermal;
  if (s == "renewable") return TechKind::Renewable;
  if (s == "storage") return TechKind::Storage;
  if (s == "nuclear-fixed") return TechKind::NuclearFixed;
  return std::nullopt;
}

double TimeGrid::total_hours() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

TimeGrid TimeGrid::uniform(std::size_t steps, double year_hours) {
  TimeGrid g;
  g.weights.assign(steps, year_hours / static_cast<double>(steps));
  return g;
}

const Technology& SystemConfig::technology(std::string_view name) const {
  for (const auto& t : technologies) {
    if (t.name == name) return t;
  }
  throw ValidationError("technologies", "unknown technology '" + std::string(name) + "'");
}

std::optional<std::size_t> SystemConfig::technology_index(std::string_view name) const {
  for (std::size_t i = 0; i < technologies.size(); ++i) {
    if (technologies[i].name == name) return i;
  }
  return std::nullopt;
}

InvestorProfile SystemConfig::investor(std::string_view name) const {
  auto it = investors.find(std::string(name));
  return it == investors.end() ? InvestorProfile{} : it->second;
}

namespace {

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ValidationError(field, msg);
}

bool finite(double v) { return std::isfinite(v); }

void validate_technology(const Technology& t) {
  const std::string f = "technologies[" + t.name + "]";
  require(!t.name.empty(), "technologies.name", "empty technology name");
  require(finite(t.invest_cost_annualized) && t.invest_cost_annualized >= 0.0,
          f + ".invest_cost_annualized", "must be >= 0");
  require(finite(t.fixed_om) && t.fixed_om >= 0.0, f + ".fixed_om", "must be >= 0");
  require(finite(t.var_cost) && t.var_cost >= 0.0, f + ".var_cost", "must be >= 0");
  require(finite(t.heat_rate) && t.heat_rate >= 0.0, f + ".heat_rate", "must be >= 0");
  require(finite(t.cap_max) && t.cap_max >= 0.0, f + ".cap_max", "must be >= 0");
  require(t.round_trip_efficiency > 0.0 && t.round_trip_efficiency <= 1.0,
          f + ".round_trip_efficiency", "must lie in (0, 1]");
  require(t.lifetime_years >= 1, f + ".lifetime_years", "must be >= 1");
  if (t.cap_fixed) {
    require(finite(*t.cap_fixed) && *t.cap_fixed >= 0.0, f + ".cap_fixed", "must be >= 0");
    require(*t.cap_fixed <= t.cap_max, f + ".cap_fixed", "exceeds cap_max");
  }
  if (t.is_storage()) {
    require(t.storage_duration && *t.storage_duration > 0.0, f + ".storage_duration",
            "storage requires a positive duration");
    if (t.initial_soc_fraction) {
      require(*t.initial_soc_fraction >= 0.0 && *t.initial_soc_fraction <= 1.0,
              f + ".initial_soc_fraction", "must lie in [0, 1]");
    }
  } else {
    require(!t.storage_duration, f + ".storage_duration", "only storage has a duration");
    require(!t.initial_soc_fraction, f + ".initial_soc_fraction", "only storage has a state of charge");
  }
  if (t.kind == TechKind::NuclearFixed) {
    require(t.cap_fixed.has_value(), f + ".cap_fixed", "nuclear-fixed requires cap_fixed");
  }
}

void validate_contract(const Contract& c) {
  if (const auto* cf = std::get_if<CapFloor>(&c)) {
    require(cf->floor_rate >= 0.0 && cf->cap_rate >= 0.0, "contract", "rates must be >= 0");
    require(cf->floor_rate <= cf->cap_rate, "contract.floor_rate", "floor exceeds cap");
  } else if (const auto* r = std::get_if<RevenueCfD>(&c)) {
    require(r->strike_rate >= 0.0, "contract.strike_rate", "must be >= 0");
  } else if (const auto* s = std::get_if<SpreadCfD>(&c)) {
    require(s->strike_spread >= 0.0, "contract.strike_spread", "must be >= 0");
  } else if (const auto* a = std::get_if<Availability>(&c)) {
    require(a->payment_rate >= 0.0, "contract.payment_rate", "must be >= 0");
  }
}

}  // namespace

void validate(const SystemConfig& config) {
  require(!config.technologies.empty(), "technologies", "empty technology set");
  std::set<std::string> names;
  for (const auto& t : config.technologies) {
    validate_technology(t);
    require(names.insert(t.name).second, "technologies[" + t.name + "]", "duplicate name");
  }

  const TimeGrid& g = config.time_grid;
  require(g.steps() >= 1, "time_grid.weights", "empty time grid");
  for (double w : g.weights) require(finite(w) && w > 0.0, "time_grid.weights", "weights must be > 0");
  require(std::abs(g.total_hours() - 8760.0) <= 1e-6, "time_grid.weights",
          "weights must sum to 8760 hours");
  require(finite(g.step_hours) && g.step_hours > 0.0, "time_grid.step_hours", "must be > 0");

  const DemandModel& d = config.demand;
  require(finite(d.price_cap) && d.price_cap > 0.0, "demand.price_cap", "must be > 0");
  require(finite(d.flexible_mw) && d.flexible_mw >= 0.0, "demand.flexible_mw", "must be >= 0");
  require(d.flexible_bid > 0.0 && d.flexible_bid < d.price_cap, "demand.flexible_bid",
          "must lie in (0, price_cap)");

  require(!config.scenarios.empty(), "scenarios", "empty scenario set");
  double total_p = 0.0;
  std::set<std::string> ids;
  for (const auto& s : config.scenarios) {
    const std::string f = "scenarios[" + s.id + "]";
    require(ids.insert(s.id).second, f, "duplicate scenario id");
    require(finite(s.probability) && s.probability >= 0.0, "scenarios.probability",
            "probabilities must be >= 0");
    require(finite(s.gas_price) && s.gas_price >= 0.0, f + ".gas_price", "must be >= 0");
    total_p += s.probability;
    require(s.demand_mw.size() == g.steps(), f + ".demand_mw", "profile length differs from time grid");
    for (double v : s.demand_mw) require(finite(v) && v >= 0.0, f + ".demand_mw", "must be >= 0");
    for (const auto& t : config.technologies) {
      if (!t.is_renewable()) continue;
      auto it = s.capacity_factors.find(t.name);
      require(it != s.capacity_factors.end(), f + ".cf_" + t.name, "missing renewable profile");
      require(it->second.size() == g.steps(), f + ".cf_" + t.name,
              "profile length differs from time grid");
      for (double v : it->second) {
        require(v >= 0.0 && v <= 1.0, f + ".cf_" + t.name, "capacity factors must lie in [0, 1]");
      }
    }
    for (const auto& [name, _] : s.capacity_factors) {
      auto idx = config.technology_index(name);
      require(idx && config.technologies[*idx].is_renewable(), f + ".cf_" + name,
              "profile for a technology that is not renewable");
    }
  }
  require(std::abs(total_p - 1.0) <= 1e-9, "scenarios.probability",
          "probabilities must sum to 1 (got " + std::to_string(total_p) + ")");

  require(!config.contract_technology.empty(), "system.contract_technology",
          "exactly one contract technology is required");
  require(config.technology_index(config.contract_technology).has_value(),
          "system.contract_technology", "unknown technology '" + config.contract_technology + "'");

  for (const auto& [name, p] : config.investors) {
    require(config.technology_index(name).has_value(), "investors[" + name + "]", "unknown technology");
    require(p.delta >= 0.0 && p.delta <= 1.0, "investors[" + name + "].delta", "must lie in [0, 1]");
    require(p.psi > 0.0 && p.psi <= 1.0, "investors[" + name + "].psi", "must lie in (0, 1]");
    require(p.risk_free_rate > -1.0, "investors[" + name + "].risk_free_rate", "must be > -1");
  }
  if (config.contract) validate_contract(*config.contract);
  require(config.capfloor_cap_rate >= 0.0, "contract.cap_rate", "must be >= 0");
}

}  // namespace ldes
