#include "ldes/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ldes {

namespace {

constexpr double kPi = std::numbers::pi;

struct Clock {
  double hour_of_day;
  double day_of_year;
};

std::vector<Clock> clock_for(int steps) {
  std::vector<Clock> out(steps);
  if (steps % 24 == 0) {
    const int days = steps / 24;
    for (int t = 0; t < steps; ++t) {
      const int d = t / 24;
      // Representative days start in mid-winter and are spread evenly.
      out[t] = {static_cast<double>(t % 24), std::fmod(15.0 + (d + 0.5) * 365.0 / days, 365.0)};
    }
  } else {
    for (int t = 0; t < steps; ++t) out[t] = {24.0 * t / steps, 15.0};
  }
  return out;
}

// 1 in mid-winter, -1 in mid-summer.
double winterness(double day) { return std::cos(2.0 * kPi * (day - 15.0) / 365.0); }

void scale_to_mean(std::vector<std::vector<double>>& draws, double target) {
  for (int iter = 0; iter < 50; ++iter) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& d : draws) {
      for (double v : d) sum += v;
      n += d.size();
    }
    const double mean = sum / static_cast<double>(n);
    if (mean <= 0.0 || std::abs(mean - target) < 1e-12) return;
    const double f = target / mean;
    for (auto& d : draws) {
      for (double& v : d) v = std::clamp(v * f, 0.0, 1.0);
    }
  }
}

// Rounds to `digits` decimals; dividing by the power of ten gives the double
// nearest the decimal, which prints back in its short form.
double round_to(double v, int digits) {
  const double s = std::pow(10.0, digits);
  return std::round(v * s) / s;
}

}  // namespace

SystemConfig default_gb_config(int n_weather, int steps, std::uint64_t seed) {
  if (n_weather < 1) throw std::invalid_argument("n_weather must be >= 1");
  if (steps < 2) throw std::invalid_argument("steps must be >= 2");

  SystemConfig c;
  c.seed = seed;
  c.time_grid = TimeGrid::uniform(static_cast<std::size_t>(steps));
  c.time_grid.step_hours = steps % 24 == 0 ? 1.0 : 24.0 / steps;
  c.demand = DemandModel{20000.0, 2000.0, 1000.0};
  c.contract_technology = "ldes";
  c.capfloor_cap_rate = 0.14;

  auto tech = [&](std::string name, TechKind kind) -> Technology& {
    Technology t;
    t.name = std::move(name);
    t.kind = kind;
    c.technologies.push_back(t);
    return c.technologies.back();
  };
  {
    Technology& t = tech("ccgt", TechKind::Thermal);
    t.invest_cost_annualized = 95000.0;
    t.var_cost = 4.0;
    t.fuel_indexed = true;
    t.heat_rate = 1.818;
    t.cap_max = 35000.0;
    t.cap_fixed = 35000.0;
    t.lifetime_years = 25;
  }
  {
    Technology& t = tech("nuclear", TechKind::NuclearFixed);
    t.invest_cost_annualized = 0.0;
    t.var_cost = 10.0;
    t.cap_max = 5000.0;
    t.cap_fixed = 5000.0;
    t.lifetime_years = 60;
  }
  {
    Technology& t = tech("solar", TechKind::Renewable);
    t.invest_cost_annualized = 60000.0;
    t.cap_max = 60000.0;
    t.lifetime_years = 30;
  }
  {
    Technology& t = tech("onshore", TechKind::Renewable);
    t.invest_cost_annualized = 140000.0;
    t.cap_max = 30000.0;
    t.lifetime_years = 25;
  }
  {
    Technology& t = tech("offshore", TechKind::Renewable);
    t.invest_cost_annualized = 300000.0;
    t.cap_max = 60000.0;
    t.lifetime_years = 25;
  }
  {
    Technology& t = tech("battery", TechKind::Storage);
    t.invest_cost_annualized = 75000.0;
    t.cap_max = 30000.0;
    t.storage_duration = 2.0;
    t.round_trip_efficiency = 0.85;
    t.initial_soc_fraction = 0.5;
    t.lifetime_years = 15;
  }
  {
    Technology& t = tech("ldes", TechKind::Storage);
    t.invest_cost_annualized = 190000.0;
    t.cap_max = 30000.0;
    t.storage_duration = 12.0;
    t.round_trip_efficiency = 0.64;
    t.initial_soc_fraction = 0.5;
    t.lifetime_years = 40;
  }
  c.investors["ldes"] = InvestorProfile{1.0, 0.2, 0.071};

  const std::vector<Clock> clock = clock_for(steps);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> demand(n_weather), solar(n_weather), onshore(n_weather), offshore(n_weather);
  for (int w = 0; w < n_weather; ++w) {
    const double wind_anomaly = 0.35 * normal(rng);
    const double cold_anomaly = 0.04 * normal(rng);
    double ar_wind = normal(rng);
    double ar_off = normal(rng);
    double ar_cloud = 0.0;
    double ar_load = 0.0;
    for (int t = 0; t < steps; ++t) {
      const Clock& k = clock[t];
      const double win = winterness(k.day_of_year);
      ar_wind = 0.92 * ar_wind + std::sqrt(1.0 - 0.92 * 0.92) * normal(rng);
      ar_off = 0.9 * ar_off + 0.6 * ar_wind * std::sqrt(1.0 - 0.9 * 0.9) + 0.8 * std::sqrt(1.0 - 0.9 * 0.9) * normal(rng);
      ar_cloud = 0.7 * ar_cloud + std::sqrt(1.0 - 0.49) * normal(rng);
      ar_load = 0.8 * ar_load + 0.6 * normal(rng);

      const double evening = std::exp(-0.5 * std::pow((k.hour_of_day - 18.0) / 2.5, 2.0));
      const double daytime = std::max(0.0, std::sin(kPi * (k.hour_of_day - 6.0) / 14.0));
      demand[w].push_back((1.0 + 0.18 * win + cold_anomaly * (1.0 + win)) *
                          (0.72 + 0.18 * daytime + 0.16 * evening) * (1.0 + 0.015 * ar_load));

      const double day_len = 12.0 - 4.0 * win;
      const double sunrise = 12.5 - day_len / 2.0;
      const double x = (k.hour_of_day + 0.5 - sunrise) / day_len;
      const double sun = (x > 0.0 && x < 1.0) ? std::sin(kPi * x) : 0.0;
      solar[w].push_back(std::max(0.0, sun * (1.0 - 0.55 * win) * (1.0 + 0.3 * ar_cloud)));

      const double base = 1.0 + 0.35 * win + wind_anomaly;
      onshore[w].push_back(std::max(0.0, base * (1.0 + 0.55 * ar_wind)));
      offshore[w].push_back(std::max(0.0, (base + 0.1) * (1.0 + 0.4 * ar_off)));
    }
  }
  scale_to_mean(solar, 0.11);
  scale_to_mean(onshore, 0.30);
  scale_to_mean(offshore, 0.45);
  double peak = 0.0;
  for (const auto& d : demand) peak = std::max(peak, *std::max_element(d.begin(), d.end()));
  for (auto& d : demand) {
    for (double& v : d) v = round_to(v * 65000.0 / peak, 3);
  }
  // Quantize capacity factors so configs print compactly and round-trip.
  for (auto* set : {&solar, &onshore, &offshore}) {
    for (auto& d : *set) {
      for (double& v : d) v = std::clamp(round_to(v, 6), 0.0, 1.0);
    }
  }

  const double gas[3] = {78.0, 150.0, 220.0};
  const double p = 1.0 / (3.0 * n_weather);
  for (int w = 0; w < n_weather; ++w) {
    for (double g : gas) {
      Scenario s;
      char id[32];
      std::snprintf(id, sizeof(id), "w%02d_g%03d", w + 1, static_cast<int>(g));
      s.id = id;
      s.probability = p;
      s.gas_price = g;
      s.demand_mw = demand[w];
      s.capacity_factors["solar"] = solar[w];
      s.capacity_factors["onshore"] = onshore[w];
      s.capacity_factors["offshore"] = offshore[w];
      c.scenarios.push_back(std::move(s));
    }
  }
  return c;
}

}  // namespace ldes
