#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridrl/errors.hpp"

namespace gridrl {

constexpr std::size_t kHoursPerYear = 8760;

// One hourly series with its anchor timestamp (epoch seconds of the first
// sample) and canonical internal unit (W, EUR/kWh or degC).
struct Series {
  std::vector<double> values;
  std::int64_t start_epoch_s = 0;
  std::size_t start_hour_of_year = 0;
  std::string unit;
};

// Time-aligned exogenous inputs consumed by the environment. All series are
// hourly, equal length, and share the same start instant.
struct ExogenousBundle {
  std::vector<double> generation_w;
  std::vector<std::vector<double>> demand_profiles_w;
  std::vector<double> price_buy_eur_kwh;
  std::vector<double> price_sell_eur_kwh;
  std::vector<double> ambient_c;
  std::size_t start_hour_of_year = 0;

  std::size_t length() const { return generation_w.size(); }
  std::size_t n_profiles() const { return demand_profiles_w.size(); }

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("bundle: " + msg); };
    const std::size_t n = generation_w.size();
    if (n == 0) fail("empty generation series");
    if (demand_profiles_w.empty()) fail("no demand profiles");
    if (price_buy_eur_kwh.size() != n || price_sell_eur_kwh.size() != n || ambient_c.size() != n)
      fail("series lengths differ");
    for (const auto& d : demand_profiles_w)
      if (d.size() != n) fail("demand profile length differs from the other series");
    for (std::size_t t = 0; t < n; ++t) {
      if (!std::isfinite(generation_w[t]) || generation_w[t] < 0.0)
        fail("generation must be finite and >= 0 (step " + std::to_string(t) + ")");
      if (!std::isfinite(ambient_c[t])) fail("non-finite ambient temperature");
      if (!(price_sell_eur_kwh[t] > 0.0 && price_buy_eur_kwh[t] > price_sell_eur_kwh[t]))
        fail("prices must satisfy 0 < p_sell < p_buy (step " + std::to_string(t) + ")");
    }
    for (const auto& d : demand_profiles_w)
      for (double v : d)
        if (!std::isfinite(v) || v < 0.0) fail("demand must be finite and >= 0");
  }

  // Slice of one demand profile plus the shared series, used by tests.
  ExogenousBundle with_single_profile(std::size_t profile) const {
    ExogenousBundle b = *this;
    b.demand_profiles_w = {demand_profiles_w.at(profile)};
    return b;
  }
};

// Multiplies both price series by alpha (> 0); everything else untouched.
inline ExogenousBundle scale_prices(const ExogenousBundle& bundle, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("scale_prices: alpha must be > 0");
  ExogenousBundle out = bundle;
  for (double& p : out.price_buy_eur_kwh) p *= alpha;
  for (double& p : out.price_sell_eur_kwh) p *= alpha;
  return out;
}

}  // namespace gridrl
