#include "ldes/config_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "ldes/errors.hpp"
#include "ldes/text.hpp"

namespace ldes {

namespace {

using text::num;

struct Entry {
  std::string key;
  std::string value;
  int line;
};

struct Section {
  std::string kind;
  std::string name;
  int line;
  std::vector<Entry> entries;
};

std::vector<Section> parse_sections(std::string_view src) {
  std::vector<Section> out;
  int lineno = 0;
  for (std::string_view raw : text::split(src, '\n')) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
      std::string_view head = text::trim(line.substr(1, line.size() - 2));
      const auto sp = head.find_first_of(" \t");
      Section s;
      s.line = lineno;
      if (sp == std::string_view::npos) {
        s.kind = std::string(head);
      } else {
        s.kind = std::string(head.substr(0, sp));
        s.name = std::string(text::trim(head.substr(sp + 1)));
      }
      out.push_back(std::move(s));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    }
    if (out.empty()) throw ParseError("line " + std::to_string(lineno) + ": entry outside any section");
    std::string_view value = line.substr(eq + 1);
    // Trailing comments.
    const auto hash = value.find(" #");
    if (hash != std::string_view::npos) value = value.substr(0, hash);
    out.back().entries.push_back(
        {std::string(text::trim(line.substr(0, eq))), std::string(text::trim(value)), lineno});
  }
  return out;
}

std::string where(const Section& s, const Entry& e) {
  return "line " + std::to_string(e.line) + " [" + s.kind + (s.name.empty() ? "" : " " + s.name) + "] " + e.key;
}

[[noreturn]] void unknown_key(const Section& s, const Entry& e) {
  throw ParseError(where(s, e) + ": unknown key");
}

std::vector<double> parse_weights(const Section& s, const Entry& e) {
  std::string_view v = e.value;
  if (v.substr(0, 7) == "uniform") {
    const long n = text::to_long(v.substr(7), where(s, e));
    if (n < 1) throw ParseError(where(s, e) + ": uniform step count must be >= 1");
    return TimeGrid::uniform(static_cast<std::size_t>(n)).weights;
  }
  std::vector<double> w;
  for (auto part : text::split(v, ',')) w.push_back(text::to_double(part, where(s, e)));
  return w;
}

void parse_technology(const Section& s, Technology& t) {
  t.name = s.name;
  bool kind_seen = false;
  for (const auto& e : s.entries) {
    const std::string w = where(s, e);
    if (e.key == "kind") {
      auto k = parse_tech_kind(e.value);
      if (!k) throw ParseError(w + ": unknown technology kind '" + e.value + "'");
      t.kind = *k;
      kind_seen = true;
    } else if (e.key == "invest_cost_annualized") {
      t.invest_cost_annualized = text::to_double(e.value, w);
    } else if (e.key == "fixed_om") {
      t.fixed_om = text::to_double(e.value, w);
    } else if (e.key == "var_cost") {
      t.var_cost = text::to_double(e.value, w);
    } else if (e.key == "fuel_indexed") {
      t.fuel_indexed = text::to_bool(e.value, w);
    } else if (e.key == "heat_rate") {
      t.heat_rate = text::to_double(e.value, w);
    } else if (e.key == "cap_max") {
      t.cap_max = text::to_double(e.value, w);
    } else if (e.key == "cap_fixed") {
      t.cap_fixed = text::to_double(e.value, w);
    } else if (e.key == "storage_duration") {
      t.storage_duration = text::to_double(e.value, w);
    } else if (e.key == "round_trip_efficiency") {
      t.round_trip_efficiency = text::to_double(e.value, w);
    } else if (e.key == "initial_soc_fraction") {
      t.initial_soc_fraction = text::to_double(e.value, w);
    } else if (e.key == "lifetime_years") {
      t.lifetime_years = static_cast<int>(text::to_long(e.value, w));
    } else {
      unknown_key(s, e);
    }
  }
  if (!kind_seen) throw ParseError("line " + std::to_string(s.line) + ": technology '" + s.name + "' has no kind");
}

Contract parse_contract(const Section& s) {
  std::map<std::string, const Entry*> kv;
  for (const auto& e : s.entries) kv[e.key] = &e;
  auto type_it = kv.find("type");
  if (type_it == kv.end()) throw ParseError("line " + std::to_string(s.line) + ": contract without type");
  auto fam = parse_family(type_it->second->value);
  if (!fam) throw ParseError(where(s, *type_it->second) + ": unknown contract type");
  auto get = [&](const std::string& key, double def) {
    auto it = kv.find(key);
    return it == kv.end() ? def : text::to_double(it->second->value, where(s, *it->second));
  };
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& e : s.entries) {
      bool ok = e.key == "type";
      for (const char* k : keys) ok = ok || e.key == k;
      if (!ok) unknown_key(s, e);
    }
  };
  switch (*fam) {
    case ContractFamily::CapFloor: {
      allow({"floor_rate", "cap_rate", "unit"});
      CapFloor c{get("floor_rate", 0.0), get("cap_rate", 0.0), StrikeUnit::CostOfCapital};
      if (auto it = kv.find("unit"); it != kv.end()) {
        auto u = parse_unit(it->second->value);
        if (!u) throw ParseError(where(s, *it->second) + ": unknown strike unit");
        c.unit = *u;
      }
      return c;
    }
    case ContractFamily::RevenueCfD:
      allow({"strike_rate"});
      return RevenueCfD{get("strike_rate", 1.0)};
    case ContractFamily::SpreadCfD:
      allow({"strike_spread"});
      return SpreadCfD{get("strike_spread", 0.0)};
    case ContractFamily::Availability:
      allow({"payment_rate"});
      return Availability{get("payment_rate", 0.0)};
  }
  throw ParseError("unreachable contract family");
}

void parse_profiles(std::string_view csv, SystemConfig& cfg) {
  const std::size_t steps = cfg.time_grid.steps();
  std::map<std::string, Scenario*> by_id;
  for (auto& s : cfg.scenarios) {
    by_id[s.id] = &s;
    s.demand_mw.assign(steps, 0.0);
  }
  std::vector<std::string> header;
  std::map<std::string, std::vector<std::vector<bool>>> seen;
  int lineno = 0;
  for (std::string_view raw : text::split(csv, '\n')) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cells = text::split(line, ',');
    const std::string where = "profiles line " + std::to_string(lineno);
    if (header.empty()) {
      for (auto c : cells) header.emplace_back(text::trim(c));
      if (header.size() < 3 || header[0] != "scenario_id" || header[1] != "step" || header[2] != "demand_mw") {
        throw ParseError(where + ": header must start with scenario_id,step,demand_mw");
      }
      for (std::size_t k = 3; k < header.size(); ++k) {
        if (header[k].rfind("cf_", 0) != 0) throw ParseError(where + ": unexpected column '" + header[k] + "'");
      }
      for (auto& s : cfg.scenarios) {
        for (std::size_t k = 3; k < header.size(); ++k) s.capacity_factors[header[k].substr(3)].assign(steps, 0.0);
      }
      continue;
    }
    if (cells.size() != header.size()) throw ParseError(where + ": expected " + std::to_string(header.size()) + " cells");
    const std::string id(text::trim(cells[0]));
    auto it = by_id.find(id);
    if (it == by_id.end()) throw ParseError(where + ": unknown scenario '" + id + "'");
    const long step = text::to_long(cells[1], where);
    if (step < 0 || static_cast<std::size_t>(step) >= steps) {
      throw ValidationError("scenarios[" + id + "].demand_mw", "step " + std::to_string(step) + " outside the time grid");
    }
    auto& mask = seen[id];
    if (mask.empty()) mask.assign(1, std::vector<bool>(steps, false));
    if (mask[0][step]) throw ParseError(where + ": duplicate step " + std::to_string(step));
    mask[0][step] = true;
    Scenario& s = *it->second;
    s.demand_mw[step] = text::to_double(cells[2], where);
    for (std::size_t k = 3; k < header.size(); ++k) {
      s.capacity_factors[header[k].substr(3)][step] = text::to_double(cells[k], where);
    }
  }
  for (const auto& s : cfg.scenarios) {
    auto it = seen.find(s.id);
    std::size_t count = 0;
    if (it != seen.end()) {
      for (bool b : it->second[0]) count += b;
    }
    if (count != steps) {
      throw ValidationError("scenarios[" + s.id + "].demand_mw", "profile length differs from time grid (" +
                                                                      std::to_string(count) + " of " +
                                                                      std::to_string(steps) + " steps)");
    }
  }
}

}  // namespace

SystemConfig parse_config(std::string_view src, std::string_view profiles_csv) {
  SystemConfig cfg;
  bool weights_seen = false;
  for (const Section& s : parse_sections(src)) {
    if (s.kind == "system") {
      for (const auto& e : s.entries) {
        const std::string w = where(s, e);
        if (e.key == "contract_technology") cfg.contract_technology = e.value;
        else if (e.key == "capfloor_cap_rate") cfg.capfloor_cap_rate = text::to_double(e.value, w);
        else if (e.key == "seed") cfg.seed = text::to_u64(e.value, w);
        else if (e.key == "profiles") continue;
        else if (e.key == "step_hours") cfg.time_grid.step_hours = text::to_double(e.value, w);
        else if (e.key == "weights") {
          cfg.time_grid.weights = parse_weights(s, e);
          weights_seen = true;
        } else unknown_key(s, e);
      }
    } else if (s.kind == "demand") {
      for (const auto& e : s.entries) {
        const std::string w = where(s, e);
        if (e.key == "price_cap") cfg.demand.price_cap = text::to_double(e.value, w);
        else if (e.key == "flexible_mw") cfg.demand.flexible_mw = text::to_double(e.value, w);
        else if (e.key == "flexible_bid") cfg.demand.flexible_bid = text::to_double(e.value, w);
        else unknown_key(s, e);
      }
    } else if (s.kind == "technology") {
      if (s.name.empty()) throw ParseError("line " + std::to_string(s.line) + ": technology needs a name");
      Technology t;
      parse_technology(s, t);
      cfg.technologies.push_back(std::move(t));
    } else if (s.kind == "investor") {
      InvestorProfile p;
      for (const auto& e : s.entries) {
        const std::string w = where(s, e);
        if (e.key == "delta") p.delta = text::to_double(e.value, w);
        else if (e.key == "psi") p.psi = text::to_double(e.value, w);
        else if (e.key == "risk_free_rate") p.risk_free_rate = text::to_double(e.value, w);
        else unknown_key(s, e);
      }
      cfg.investors[s.name] = p;
    } else if (s.kind == "scenario") {
      Scenario sc;
      sc.id = s.name;
      if (sc.id.empty()) throw ParseError("line " + std::to_string(s.line) + ": scenario needs an id");
      for (const auto& e : s.entries) {
        const std::string w = where(s, e);
        if (e.key == "probability") sc.probability = text::to_double(e.value, w);
        else if (e.key == "gas_price") sc.gas_price = text::to_double(e.value, w);
        else unknown_key(s, e);
      }
      cfg.scenarios.push_back(std::move(sc));
    } else if (s.kind == "contract") {
      cfg.contract = parse_contract(s);
    } else {
      throw ParseError("line " + std::to_string(s.line) + ": unknown section [" + s.kind + "]");
    }
  }
  if (!weights_seen) throw ParseError("[system] weights missing");
  parse_profiles(profiles_csv, cfg);
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  const std::string src = text::read_file(path);
  std::string profiles;
  for (const Section& s : parse_sections(src)) {
    if (s.kind != "system") continue;
    for (const auto& e : s.entries) {
      if (e.key == "profiles") profiles = e.value;
    }
  }
  std::string csv;
  if (!profiles.empty()) {
    std::filesystem::path p(profiles);
    if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
    csv = text::read_file(p.string());
  }
  SystemConfig cfg = parse_config(src, csv);
  validate(cfg);
  return cfg;
}

std::string format_config(const SystemConfig& c, const std::string& profiles_name) {
  std::ostringstream os;
  os << "[system]\n";
  os << "contract_technology = " << c.contract_technology << "\n";
  os << "capfloor_cap_rate = " << num(c.capfloor_cap_rate) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "profiles = " << profiles_name << "\n";
  os << "step_hours = " << num(c.time_grid.step_hours) << "\n";
  if (c.time_grid.weights == TimeGrid::uniform(c.time_grid.steps()).weights) {
    os << "weights = uniform " << c.time_grid.steps() << "\n";
  } else {
    os << "weights = ";
    for (std::size_t i = 0; i < c.time_grid.weights.size(); ++i) os << (i ? "," : "") << num(c.time_grid.weights[i]);
    os << "\n";
  }
  os << "\n[demand]\n";
  os << "price_cap = " << num(c.demand.price_cap) << "\n";
  os << "flexible_mw = " << num(c.demand.flexible_mw) << "\n";
  os << "flexible_bid = " << num(c.demand.flexible_bid) << "\n";
  for (const auto& t : c.technologies) {
    os << "\n[technology " << t.name << "]\n";
    os << "kind = " << to_string(t.kind) << "\n";
    os << "invest_cost_annualized = " << num(t.invest_cost_annualized) << "\n";
    os << "fixed_om = " << num(t.fixed_om) << "\n";
    os << "var_cost = " << num(t.var_cost) << "\n";
    os << "fuel_indexed = " << (t.fuel_indexed ? "true" : "false") << "\n";
    os << "heat_rate = " << num(t.heat_rate) << "\n";
    os << "cap_max = " << num(t.cap_max) << "\n";
    if (t.cap_fixed) os << "cap_fixed = " << num(*t.cap_fixed) << "\n";
    if (t.storage_duration) os << "storage_duration = " << num(*t.storage_duration) << "\n";
    os << "round_trip_efficiency = " << num(t.round_trip_efficiency) << "\n";
    if (t.initial_soc_fraction) os << "initial_soc_fraction = " << num(*t.initial_soc_fraction) << "\n";
    os << "lifetime_years = " << t.lifetime_years << "\n";
  }
  for (const auto& [name, p] : c.investors) {
    os << "\n[investor " << name << "]\n";
    os << "delta = " << num(p.delta) << "\npsi = " << num(p.psi) << "\nrisk_free_rate = " << num(p.risk_free_rate)
       << "\n";
  }
  for (const auto& s : c.scenarios) {
    os << "\n[scenario " << s.id << "]\nprobability = " << num(s.probability) << "\ngas_price = " << num(s.gas_price)
       << "\n";
  }
  if (c.contract) {
    os << "\n[contract]\ntype = " << family_name(family_of(*c.contract)) << "\n";
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, CapFloor>) {
            os << "floor_rate = " << num(k.floor_rate) << "\ncap_rate = " << num(k.cap_rate)
               << "\nunit = " << unit_name(k.unit) << "\n";
          } else if constexpr (std::is_same_v<T, RevenueCfD>) {
            os << "strike_rate = " << num(k.strike_rate) << "\n";
          } else if constexpr (std::is_same_v<T, SpreadCfD>) {
            os << "strike_spread = " << num(k.strike_spread) << "\n";
          } else {
            os << "payment_rate = " << num(k.payment_rate) << "\n";
          }
        },
        *c.contract);
  }
  return os.str();
}

std::string format_profiles(const SystemConfig& c) {
  std::vector<std::string> cf_names;
  for (const auto& s : c.scenarios) {
    for (const auto& [name, _] : s.capacity_factors) {
      if (std::find(cf_names.begin(), cf_names.end(), name) == cf_names.end()) cf_names.push_back(name);
    }
  }
  std::sort(cf_names.begin(), cf_names.end());
  std::ostringstream os;
  os << "scenario_id,step,demand_mw";
  for (const auto& n : cf_names) os << ",cf_" << n;
  os << "\n";
  for (const auto& s : c.scenarios) {
    for (std::size_t t = 0; t < s.demand_mw.size(); ++t) {
      os << s.id << ',' << t << ',' << num(s.demand_mw[t]);
      for (const auto& n : cf_names) {
        auto it = s.capacity_factors.find(n);
        os << ',' << (it != s.capacity_factors.end() && t < it->second.size() ? num(it->second[t]) : "0");
      }
      os << "\n";
    }
  }
  return os.str();
}

void save_config(const SystemConfig& config, const std::string& path, const std::string& profiles_name) {
  std::filesystem::path p(path);
  std::string name = profiles_name;
  if (name.empty()) name = p.stem().string() + "_profiles.csv";
  const std::filesystem::path csv_path = std::filesystem::path(name).is_absolute() ? std::filesystem::path(name)
                                                                                   : p.parent_path() / name;
  text::write_file(path, format_config(config, name));
  text::write_file(csv_path.string(), format_profiles(config));
}

std::string config_hash(const SystemConfig& config) {
  const std::string s = format_config(config, "") + format_profiles(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ldes
