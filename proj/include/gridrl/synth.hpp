#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gridrl/csv_io.hpp"
#include "gridrl/errors.hpp"
#include "gridrl/rng.hpp"
#include "gridrl/series.hpp"

// Seed-deterministic synthetic stand-in for the hourly exogenous datasets:
// residential PV generation, household demand profiles, day-ahead market
// prices and ambient temperature. Shapes are parametric so experiments can
// move price levels, demand totals, etc. without touching code.

namespace gridrl {

struct SynthKnobs {
  double pv_peak_w = 3000.0;
  double pv_weather_floor = 0.25;   // worst-day output fraction
  int n_profiles = 12;
  double demand_annual_min_mwh = 1.5;
  double demand_annual_max_mwh = 5.05;
  double price_buy_mean = 0.25;     // EUR/kWh
  double sell_ratio = 0.4;          // p_sell = ratio * p_buy, must be < 1
  double temp_mean_c = 15.0;
  double temp_seasonal_amp_c = 10.0;
  double temp_diurnal_amp_c = 4.0;
  int start_year = 2021;            // anchor for exported timestamps
};

namespace synth_detail {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double bump(double x, double center, double width) {
  const double d = (x - center) / width;
  return std::exp(-0.5 * d * d);
}

}  // namespace synth_detail

// Builds `years` * 8760 hourly steps of every series. Deterministic in
// (seed, years, knobs); each series draws from its own child stream so the
// profile count does not perturb generation/prices/ambient.
inline ExogenousBundle synth_bundle(std::uint64_t seed, int years, const SynthKnobs& knobs = {}) {
  using synth_detail::bump;
  using synth_detail::kTwoPi;

  if (years < 1) throw ConfigError("synth_bundle: years must be >= 1");
  if (!(knobs.sell_ratio > 0.0 && knobs.sell_ratio < 1.0))
    throw ConfigError("synth_bundle: sell_ratio must lie in (0,1)");
  if (knobs.n_profiles < 1) throw ConfigError("synth_bundle: need at least one profile");

  const std::size_t n = static_cast<std::size_t>(years) * kHoursPerYear;
  ExogenousBundle bundle;
  bundle.start_hour_of_year = 0;

  Rng root(seed);
  Rng rng_pv = root.fork(1);
  Rng rng_price = root.fork(2);
  Rng rng_temp = root.fork(3);

  // Photovoltaic generation: half-sine daylight window, seasonal amplitude,
  // one weather factor per day plus mild hourly jitter, zero at night.
  bundle.generation_w.resize(n, 0.0);
  {
    const double sunrise = 6.0, sunset = 18.0;
    for (std::size_t day = 0; day < n / 24; ++day) {
      const double doy = static_cast<double>(day % 365);
      const double season = 0.6 + 0.4 * std::cos(kTwoPi * (doy - 172.0) / 365.0);
      const double u = rng_pv.uniform();
      const double weather = knobs.pv_weather_floor + (1.0 - knobs.pv_weather_floor) * std::sqrt(u);
      for (int hod = 0; hod < 24; ++hod) {
        const double h = hod + 0.5;
        if (h <= sunrise || h >= sunset) continue;
        const double elevation = std::sin((h - sunrise) / (sunset - sunrise) * 3.14159265358979323846);
        const double jitter = 1.0 + 0.08 * (rng_pv.uniform() - 0.5);
        bundle.generation_w[day * 24 + hod] =
            std::max(0.0, knobs.pv_peak_w * season * weather * elevation * jitter);
      }
    }
  }

  // Prices: double-hump daily shape on a slow seasonal drift, p_sell locked
  // to a fixed fraction of p_buy so p_sell < p_buy holds at every step.
  bundle.price_buy_eur_kwh.resize(n);
  bundle.price_sell_eur_kwh.resize(n);
  {
    for (std::size_t day = 0; day < n / 24; ++day) {
      const double doy = static_cast<double>(day % 365);
      const double season = 1.0 + 0.10 * std::cos(kTwoPi * (doy - 15.0) / 365.0);
      const double day_factor = 1.0 + 0.08 * (rng_price.uniform() - 0.5);
      for (int hod = 0; hod < 24; ++hod) {
        const double shape = 0.80 + 0.30 * bump(hod, 9.0, 2.0) + 0.45 * bump(hod, 19.0, 2.5);
        const double hour_factor = 1.0 + 0.04 * (rng_price.uniform() - 0.5);
        const double buy = knobs.price_buy_mean * season * shape * day_factor * hour_factor;
        bundle.price_buy_eur_kwh[day * 24 + hod] = buy;
        bundle.price_sell_eur_kwh[day * 24 + hod] = knobs.sell_ratio * buy;
      }
    }
  }

  // Ambient temperature: seasonal + diurnal sinusoids with small noise.
  bundle.ambient_c.resize(n);
  {
    for (std::size_t h = 0; h < n; ++h) {
      const double doy = static_cast<double>((h / 24) % 365);
      const double hod = static_cast<double>(h % 24);
      bundle.ambient_c[h] = knobs.temp_mean_c +
                            knobs.temp_seasonal_amp_c * std::cos(kTwoPi * (doy - 205.0) / 365.0) +
                            knobs.temp_diurnal_amp_c * std::cos(kTwoPi * (hod - 15.0) / 24.0) +
                            0.8 * (rng_temp.uniform() - 0.5);
    }
  }

  // Demand profiles: base load, morning and evening peaks, weekend lift,
  // mild winter bias, then rescaled so each profile's yearly total lands at
  // a draw from [demand_annual_min, demand_annual_max] MWh.
  bundle.demand_profiles_w.resize(static_cast<std::size_t>(knobs.n_profiles));
  for (int p = 0; p < knobs.n_profiles; ++p) {
    Rng rng = root.fork(100 + static_cast<std::uint64_t>(p));
    std::vector<double>& dem = bundle.demand_profiles_w[static_cast<std::size_t>(p)];
    dem.resize(n);
    const double morning_amp = 0.35 + 0.3 * rng.uniform();
    const double evening_amp = 0.8 + 0.5 * rng.uniform();
    const double evening_center = 19.0 + 1.5 * (rng.uniform() - 0.5);
    for (std::size_t h = 0; h < n; ++h) {
      const std::size_t day = h / 24;
      const double hod = static_cast<double>(h % 24);
      const double doy = static_cast<double>(day % 365);
      const double weekday = (day % 7 >= 5) ? 1.15 : 1.0;
      const double season = 1.0 + 0.15 * std::cos(kTwoPi * (doy - 20.0) / 365.0);
      const double shape = 0.25 + morning_amp * bump(hod, 7.5, 1.5) +
                           evening_amp * bump(hod, evening_center, 2.5);
      const double noise = 1.0 + 0.35 * (rng.uniform() - 0.5);
      dem[h] = shape * weekday * season * noise;
    }
    // exact rescale of the first-year total; later years inherit the scale
    double first_year_wh = 0.0;
    for (std::size_t h = 0; h < std::min(n, kHoursPerYear); ++h) first_year_wh += dem[h];
    const double target_mwh = rng.uniform(knobs.demand_annual_min_mwh, knobs.demand_annual_max_mwh);
    const double scale = target_mwh * 1e6 / first_year_wh;
    for (double& v : dem) v *= scale;
  }

  bundle.validate();
  return bundle;
}

// Splits a multi-year bundle into the leading training years and the final
// test year; with a single year both halves alias the same data.
struct TrainTestBundles {
  ExogenousBundle train;
  ExogenousBundle test;
};

inline ExogenousBundle slice_bundle(const ExogenousBundle& bundle, std::size_t first_step,
                                    std::size_t n_steps) {
  if (first_step + n_steps > bundle.length())
    throw ConfigError("slice_bundle: range exceeds bundle length");
  ExogenousBundle out;
  auto cut = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(first_step),
                               v.begin() + static_cast<std::ptrdiff_t>(first_step + n_steps));
  };
  out.generation_w = cut(bundle.generation_w);
  out.price_buy_eur_kwh = cut(bundle.price_buy_eur_kwh);
  out.price_sell_eur_kwh = cut(bundle.price_sell_eur_kwh);
  out.ambient_c = cut(bundle.ambient_c);
  for (const auto& d : bundle.demand_profiles_w) out.demand_profiles_w.push_back(cut(d));
  out.start_hour_of_year = (bundle.start_hour_of_year + first_step) % kHoursPerYear;
  return out;
}

inline TrainTestBundles train_test_split(const ExogenousBundle& bundle) {
  const std::size_t years = bundle.length() / kHoursPerYear;
  if (years * kHoursPerYear != bundle.length())
    throw ConfigError("train_test_split: bundle length is not whole years");
  TrainTestBundles out;
  if (years <= 1) {
    out.train = bundle;
    out.test = bundle;
  } else {
    out.train = slice_bundle(bundle, 0, (years - 1) * kHoursPerYear);
    out.test = slice_bundle(bundle, (years - 1) * kHoursPerYear, kHoursPerYear);
  }
  return out;
}

}  // namespace gridrl
