#pragma once

#include <cstdint>

#include "ldes/model.hpp"

namespace ldes {

// Stylized GB 2035 system with seeded synthetic weather.
//
// Scenarios cross n_weather weather draws with three gas prices
// (78, 150, 220 $/MWh) and are equiprobable. Steps are hourly; when `steps`
// is a multiple of 24 they form representative days spread over the year,
// otherwise a single representative day sampled at equal spacing.
// Same arguments give the same config.
SystemConfig default_gb_config(int n_weather, int steps, std::uint64_t seed);

}  // namespace ldes
