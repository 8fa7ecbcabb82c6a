#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridrl/errors.hpp"
#include "gridrl/rng.hpp"
#include "gridrl/series.hpp"

// CSV ingestion and export of hourly series. Schema (bit-exact):
//   timestamp,value,unit
//   2021-01-01T00:00:00Z,1234.5,W
// Timestamps are UTC whole hours, strictly increasing, no missing hours.
// Feb 29 rows are dropped after validation so every year spans 8760 steps.

namespace gridrl {

enum class SeriesKind { Power, Price, Temperature };

namespace detail {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  int year, month, day;
};

inline CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

// Parses "YYYY-MM-DDTHH:00:00Z" into epoch seconds; -1 on malformed input.
inline std::int64_t parse_hour_timestamp(const std::string& s) {
  int y, mo, d, h, mi, se;
  char tz;
  if (s.size() != 20) return -1;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &se, &tz) != 7)
    return -1;
  if (tz != 'Z' || mi != 0 || se != 0 || h < 0 || h > 23) return -1;
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return -1;
  return days_from_civil(y, mo, d) * 86400 + static_cast<std::int64_t>(h) * 3600;
}

inline std::string format_hour_timestamp(std::int64_t epoch_s) {
  const std::int64_t days = epoch_s / 86400;
  const int hour = static_cast<int>((epoch_s % 86400) / 3600);
  const CivilDate c = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", c.year, c.month, c.day, hour);
  return buf;
}

inline bool is_feb29(std::int64_t epoch_s) {
  const CivilDate c = civil_from_days(epoch_s / 86400);
  return c.month == 2 && c.day == 29;
}

// Hour offset within the year, with Feb 29 removed from the count so a full
// year always spans [0, 8760).
inline std::size_t hour_of_year(std::int64_t epoch_s) {
  const CivilDate c = civil_from_days(epoch_s / 86400);
  std::int64_t day_in_year = epoch_s / 86400 - days_from_civil(c.year, 1, 1);
  if (is_feb29(epoch_s)) return 59 * 24 + static_cast<std::size_t>((epoch_s % 86400) / 3600);
  const bool leap = (c.year % 4 == 0 && c.year % 100 != 0) || c.year % 400 == 0;
  if (leap && day_in_year > 59) --day_in_year; // past Feb 29
  return static_cast<std::size_t>(day_in_year) * 24 +
         static_cast<std::size_t>((epoch_s % 86400) / 3600);
}

inline double unit_scale(SeriesKind kind, const std::string& unit, const std::string& path,
                         std::size_t row) {
  auto fail = [&](const std::string& msg) {
    throw ConfigError(path + " row " + std::to_string(row) + ": " + msg);
  };
  switch (kind) {
    case SeriesKind::Power:
      if (unit == "W") return 1.0;
      if (unit == "kW") return 1000.0;
      fail("unit '" + unit + "' not a power unit (expected W or kW)");
      break;
    case SeriesKind::Price:
      if (unit == "EUR/kWh") return 1.0;
      fail("unit '" + unit + "' not a price unit (expected EUR/kWh)");
      break;
    case SeriesKind::Temperature:
      if (unit == "degC") return 1.0;
      fail("unit '" + unit + "' not a temperature unit (expected degC)");
      break;
  }
  return 1.0; // unreachable
}

}  // namespace detail

// Loads and validates one hourly series. Errors carry the 1-based data row.
inline Series load_series(const std::string& path, SeriesKind kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open series file: " + path);

  auto fail = [&](std::size_t row, const std::string& msg) {
    throw ConfigError(path + " row " + std::to_string(row) + ": " + msg);
  };

  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,value,unit")
    throw ConfigError(path + ": bad header '" + line + "' (expected timestamp,value,unit)");

  Series series;
  std::int64_t prev_epoch = 0;
  std::size_t row = 0;
  bool first = true;
  std::string canonical_unit;
  std::vector<std::int64_t> epochs;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) fail(row, "expected 3 columns");
    const std::string ts = line.substr(0, c1);
    const std::string val = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string unit = line.substr(c2 + 1);

    const std::int64_t epoch = detail::parse_hour_timestamp(ts);
    if (epoch < 0) fail(row, "malformed timestamp '" + ts + "'");

    std::size_t pos = 0;
    double value = 0.0;
    try {
      value = std::stod(val, &pos);
    } catch (const std::exception&) {
      fail(row, "malformed value '" + val + "'");
    }
    if (pos != val.size()) fail(row, "trailing characters in value '" + val + "'");
    if (!std::isfinite(value)) fail(row, "non-finite value");

    const double scale = detail::unit_scale(kind, unit, path, row);
    if (first) {
      canonical_unit = unit;
      series.start_epoch_s = epoch;
    } else {
      if (unit != canonical_unit) fail(row, "unit changed mid-file");
      if (epoch == prev_epoch) fail(row, "duplicated hour " + ts);
      if (epoch != prev_epoch + 3600)
        fail(row, epoch < prev_epoch ? "timestamps not increasing at " + ts
                                     : "missing hour before " + ts);
    }
    if (kind == SeriesKind::Power && value < 0.0) fail(row, "negative power value");

    epochs.push_back(epoch);
    series.values.push_back(value * scale);
    prev_epoch = epoch;
    first = false;
  }
  if (series.values.empty()) throw ConfigError(path + ": no data rows");

  // Drop Feb 29 so every year is 8760 hourly steps.
  std::vector<double> kept;
  kept.reserve(series.values.size());
  std::int64_t start_epoch = -1;
  for (std::size_t k = 0; k < series.values.size(); ++k) {
    if (detail::is_feb29(epochs[k])) continue;
    if (start_epoch < 0) start_epoch = epochs[k];
    kept.push_back(series.values[k]);
  }
  if (kept.empty()) throw ConfigError(path + ": only Feb 29 rows present");
  series.values = std::move(kept);
  series.start_epoch_s = start_epoch;
  series.start_hour_of_year = detail::hour_of_year(start_epoch);
  series.unit = kind == SeriesKind::Power ? "W" : (kind == SeriesKind::Price ? "EUR/kWh" : "degC");
  return series;
}

// Writes a series in the canonical schema. Values are printed with enough
// digits to round-trip exactly; Feb 29 hours are re-inserted (duplicating the
// previous hour's value) so the timestamp grid stays gap-free on disk.
inline void save_series(const std::string& path, const Series& series) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write series file: " + path);
  out << "timestamp,value,unit\n";
  std::int64_t epoch = series.start_epoch_s;
  char buf[64];
  for (std::size_t k = 0; k < series.values.size(); ++k) {
    while (detail::is_feb29(epoch)) {
      std::snprintf(buf, sizeof(buf), "%.17g", series.values[k > 0 ? k - 1 : 0]);
      out << detail::format_hour_timestamp(epoch) << ',' << buf << ',' << series.unit << '\n';
      epoch += 3600;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", series.values[k]);
    out << detail::format_hour_timestamp(epoch) << ',' << buf << ',' << series.unit << '\n';
    epoch += 3600;
  }
  if (!out) throw ConfigError("write failed: " + path);
}

// Demand profile ids partitioned into training and validation sets.
struct ProfileSet {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
};

// Seeded uniform split without replacement.
inline ProfileSet split_profiles(std::size_t n_profiles, std::size_t n_validation,
                                 std::uint64_t seed) {
  if (n_validation >= n_profiles)
    throw ConfigError("split_profiles: n_validation must be < number of profiles");
  std::vector<std::size_t> order(n_profiles);
  for (std::size_t k = 0; k < n_profiles; ++k) order[k] = k;
  Rng rng(seed);
  for (std::size_t k = n_profiles; k > 1; --k) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(k));
    std::swap(order[k - 1], order[j]);
  }
  ProfileSet set;
  set.validation_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_validation));
  set.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_validation), order.end());
  std::sort(set.validation_indices.begin(), set.validation_indices.end());
  std::sort(set.train_indices.begin(), set.train_indices.end());
  return set;
}

inline void save_split_manifest(const std::string& path, const ProfileSet& set) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest: " + path);
  out << "profile_id,split\n";
  std::vector<std::pair<std::size_t, const char*>> rows;
  for (std::size_t id : set.train_indices) rows.emplace_back(id, "train");
  for (std::size_t id : set.validation_indices) rows.emplace_back(id, "validation");
  std::sort(rows.begin(), rows.end());
  for (const auto& [id, split] : rows) out << id << ',' << split << '\n';
}

inline ProfileSet load_split_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "profile_id,split") throw ConfigError(path + ": bad manifest header");
  ProfileSet set;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto c = line.find(',');
    if (c == std::string::npos) throw ConfigError(path + " row " + std::to_string(row) + ": expected 2 columns");
    const std::size_t id = static_cast<std::size_t>(std::stoull(line.substr(0, c)));
    const std::string split = line.substr(c + 1);
    if (split == "train")
      set.train_indices.push_back(id);
    else if (split == "validation")
      set.validation_indices.push_back(id);
    else
      throw ConfigError(path + " row " + std::to_string(row) + ": unknown split '" + split + "'");
  }
  return set;
}

}  // namespace gridrl
