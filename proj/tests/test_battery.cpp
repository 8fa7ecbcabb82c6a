#include "doctest.h"

#include <cmath>

#include "gridrl/battery.hpp"
#include "gridrl/rng.hpp"

using namespace gridrl;

namespace {

BatteryParams linear_pack() {
  BatteryParams p;
  p.ocv_table = {{0.0, 300.0}, {1.0, 400.0}}; // ocv(0.5) = 350 exactly
  return p;
}

BatteryParams aging_free(BatteryParams p) {
  p.aging.k_cal = 0.0;
  p.aging.k_cyc = 0.0;
  return p;
}

}  // namespace

TEST_SUITE("battery") {

TEST_CASE("ocv endpoints and interpolation") {
  const BatteryParams p = linear_pack();
  CHECK(ocv(0.0, p) == doctest::Approx(300.0));
  CHECK(ocv(1.0, p) == doctest::Approx(400.0));
  CHECK(ocv(0.5, p) == doctest::Approx(350.0)); // hand interpolation of {(0,300),(1,400)}

  const BatteryParams d; // default multi-point table
  CHECK(ocv(0.0, d) == doctest::Approx(d.ocv_table.front().second));
  CHECK(ocv(1.0, d) == doctest::Approx(d.ocv_table.back().second));

  CHECK_THROWS_AS(ocv(-0.01, p), std::domain_error);
  CHECK_THROWS_AS(ocv(1.01, p), std::domain_error);
}

TEST_CASE("ocv is monotone in soc") {
  const BatteryParams p; // default table
  double prev = ocv(0.0, p);
  for (int k = 1; k <= 200; ++k) {
    const double v = ocv(k / 200.0, p);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("power_to_current solves the terminal quadratic") {
  BatteryParams p = linear_pack();
  p.r0_ohm = 0.1;
  BatteryState s = initial_battery_state(p, 0.5, 25.0);

  CHECK(power_to_current(s, p, 0.0) == 0.0);

  // (-350 + sqrt(350^2 + 4*0.1*3500)) / (2*0.1)
  CHECK(power_to_current(s, p, 3500.0) == doctest::Approx(9.97159).epsilon(1e-5));

  // discharge beyond the vertex power -V^2/(4 r0) = -306250 W
  CHECK_THROWS_AS(power_to_current(s, p, -400000.0), InfeasiblePowerError);
}

TEST_CASE("power_to_current inverts the power balance") {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    BatteryParams p = linear_pack();
    p.r0_ohm = rng.uniform(0.0, 0.3);
    BatteryState s = initial_battery_state(p, rng.uniform(0.05, 0.95), 25.0);
    s.v_rc = rng.uniform(-2.0, 2.0);
    const double v = terminal_voltage(s, p);
    const double vertex = p.r0_ohm > 0.0 ? -v * v / (4.0 * p.r0_ohm) : -1e9;
    const double p_req = rng.uniform(std::max(vertex * 0.99, -50000.0), 50000.0);
    const double i = power_to_current(s, p, p_req);
    const double recovered = (v + i * p.r0_ohm) * i;
    CHECK(recovered == doctest::Approx(p_req).epsilon(1e-6));
  }
}

TEST_CASE("feasible_power_bounds at mid and boundary soc") {
  BatteryParams p = linear_pack();
  BatteryState s = initial_battery_state(p, 0.5, 25.0);

  // 0.4 * 60 Ah * 350 V = 8400 W on both sides, inside the 10 kW rating
  auto [lo, hi] = feasible_power_bounds(s, p, 1.0);
  CHECK(lo == doctest::Approx(-8400.0));
  CHECK(hi == doctest::Approx(8400.0));

  s.soc = p.soc_max;
  CHECK(feasible_power_bounds(s, p, 1.0).second == doctest::Approx(0.0));
  s.soc = p.soc_min;
  CHECK(feasible_power_bounds(s, p, 1.0).first == doctest::Approx(0.0));

  // rating binds for a short step
  s.soc = 0.5;
  auto [lo2, hi2] = feasible_power_bounds(s, p, 0.1);
  CHECK(lo2 == doctest::Approx(p.p_discharge_max_w));
  CHECK(hi2 == doctest::Approx(p.p_charge_max_w));
}

TEST_CASE("thermal_step equilibrium, contraction, and hand Euler value") {
  BatteryParams p = linear_pack();
  BatteryState s = initial_battery_state(p, 0.5, 25.0);

  CHECK(thermal_step(s, p, 25.0, 0.0, 1.0) == doctest::Approx(25.0));

  s.temp_c = 40.0;
  const double cooled = thermal_step(s, p, 25.0, 0.0, 1.0);
  CHECK(cooled < 40.0);
  CHECK(cooled > 25.0);

  // 25 + 3600 * 10^2 * 0.12 / 20000 = 27.16
  s.temp_c = 25.0;
  CHECK(thermal_step(s, p, 25.0, 10.0, 1.0) == doctest::Approx(27.16));
}

TEST_CASE("aging_step direct evaluation and monotonicity in temperature") {
  BatteryParams p = linear_pack();
  BatteryState s = initial_battery_state(p, 0.5, 25.0);

  BatteryParams off = aging_free(p);
  CHECK(aging_step(s, off, 50.0, 1.0) == 0.0);

  BatteryParams cal = p;
  cal.aging.k_cal = 1e-6;
  cal.aging.k_cyc = 0.0;
  s.temp_c = cal.aging.t_ref_c;
  CHECK(aging_step(s, cal, 0.0, 1.0) == doctest::Approx(-1e-6).epsilon(1e-12));

  BatteryState hot = s;
  hot.temp_c = cal.aging.t_ref_c + 10.0;
  CHECK(std::abs(aging_step(hot, cal, 0.0, 1.0)) > std::abs(aging_step(s, cal, 0.0, 1.0)));
}

TEST_CASE("step leaves state unchanged at zero power and thermal equilibrium") {
  BatteryParams p = aging_free(linear_pack());
  BatteryState s = initial_battery_state(p, 0.5, 25.0);
  s.v_rc = 1.0;

  const auto r = step(s, p, 25.0, 0.0, 1.0);
  CHECK(r.current_a == 0.0);
  CHECK(r.state.soc == s.soc);
  CHECK(r.state.temp_c == doctest::Approx(25.0));
  CHECK(r.state.soh == s.soh);
  CHECK(r.state.v_rc < s.v_rc); // only the RC branch relaxes
  CHECK(r.state.v_rc > 0.0);
}

TEST_CASE("step soc update matches the charge balance") {
  BatteryParams p = aging_free(linear_pack());
  p.r0_ohm = 0.0; // i = P/V exactly
  BatteryState s = initial_battery_state(p, 0.5, 25.0);

  // P = 350 V * 10 A; delta soc = 10 * 1 / 60 = 1/6
  const auto r = step(s, p, 25.0, 3500.0, 1.0);
  CHECK(r.current_a == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(r.state.soc - s.soc == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(r.state.throughput_ah == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("soh decays strictly when calendar aging is on") {
  BatteryParams p = linear_pack();
  BatteryState s = initial_battery_state(p, 0.5, 25.0);
  const auto r = step(s, p, 25.0, 1000.0, 1.0);
  CHECK(r.state.soh < s.soh);
  CHECK(r.state.capacity_ah == doctest::Approx(r.state.soh * p.nominal_capacity_ah));
}

TEST_CASE("random walk: soh monotone, charge bookkeeping, soc window") {
  Rng rng(7);
  BatteryParams p = linear_pack();
  BatteryState s = initial_battery_state(p, 0.5, 20.0);

  double charge_sum = 0.0; // sum of i_h * dt / C_h
  double soh_prev = s.soh;
  const double soc_initial = s.soc;
  for (int k = 0; k < 2000; ++k) {
    const auto bounds = feasible_power_bounds(s, p, 1.0);
    const double p_req = rng.uniform(bounds.first, bounds.second);
    const double capacity_before = s.capacity_ah;
    const auto r = step(s, p, rng.uniform(-5.0, 35.0), p_req, 1.0);
    charge_sum += r.current_a * 1.0 / capacity_before;
    CHECK(r.state.soh <= soh_prev);
    CHECK(r.state.soc >= p.soc_min - 1e-9);
    CHECK(r.state.soc <= p.soc_max + 1e-9);
    soh_prev = r.state.soh;
    s = r.state;
  }
  CHECK(s.soc - soc_initial == doctest::Approx(charge_sum).epsilon(1e-9));
}

TEST_CASE("soh constant when all aging coefficients are zero") {
  Rng rng(9);
  BatteryParams p = aging_free(linear_pack());
  BatteryState s = initial_battery_state(p, 0.4, 25.0);
  for (int k = 0; k < 500; ++k) {
    const auto bounds = feasible_power_bounds(s, p, 1.0);
    s = step(s, p, 25.0, rng.uniform(bounds.first, bounds.second), 1.0).state;
  }
  CHECK(s.soh == 1.0);
}

TEST_CASE("feasibility closure is exact with r0 = 0") {
  Rng rng(11);
  BatteryParams p = aging_free(linear_pack());
  p.r0_ohm = 0.0;
  BatteryState s = initial_battery_state(p, 0.5, 25.0);
  for (int k = 0; k < 2000; ++k) {
    const auto bounds = feasible_power_bounds(s, p, 1.0);
    const double u = rng.uniform();
    // bias toward the boundary where the closure is tight
    const double p_req = u < 0.3 ? bounds.first : (u < 0.6 ? bounds.second
                                : rng.uniform(bounds.first, bounds.second));
    s = step(s, p, 25.0, p_req, 1.0).state;
    CHECK(s.soc >= p.soc_min - 1e-9);
    CHECK(s.soc <= p.soc_max + 1e-9);
  }
}

TEST_CASE("temperature converges monotonically to ambient at rest") {
  // thermal time constant r_th * c_th = 80000 s, so ~22 h per e-fold
  BatteryParams p = aging_free(linear_pack());
  BatteryState s = initial_battery_state(p, 0.5, 45.0);
  double prev = s.temp_c;
  for (int k = 0; k < 240; ++k) {
    s = step(s, p, 20.0, 0.0, 1.0).state;
    CHECK(s.temp_c < prev);
    CHECK(s.temp_c > 20.0);
    prev = s.temp_c;
  }
  CHECK(s.temp_c == doctest::Approx(20.0).epsilon(1e-3));
}

TEST_CASE("parameter validation rejects malformed packs") {
  BatteryParams p;
  p.ocv_table = {{0.0, 400.0}, {1.0, 300.0}};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = BatteryParams{};
  p.soc_min = 0.9;
  p.soc_max = 0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = BatteryParams{};
  p.p_discharge_max_w = 100.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  CHECK_NOTHROW(BatteryParams{}.validate());
}

} // TEST_SUITE
