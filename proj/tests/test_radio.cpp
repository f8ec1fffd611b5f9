#include <doctest.h>

#include <cmath>
#include <random>

#include "wsn/error.hpp"
#include "wsn/radio.hpp"

using namespace wsn;

namespace {

const RadioProfile kDefaults{};

RadioProfile random_profile(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RadioProfile p;
  p.p_listen = 0.001 + 0.2 * unit(rng);
  p.p_receive = p.p_listen * (0.5 + unit(rng));
  p.p_sleep = p.p_listen * unit(rng) * 0.999;
  p.t_sleep_to_active = 1e-5 + 0.01 * unit(rng);
  p.t_active_to_sleep = 1e-5 + 0.01 * unit(rng);
  return p;
}

// Smallest gap at which should_sleep turns true, by bisection.
double flip_point(const RadioProfile& p) {
  double lo = 0.0;
  double hi = 1.0;
  while (!should_sleep(p, hi)) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid == lo || mid == hi) break;
    (should_sleep(p, mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

TEST_CASE("transition energies") {
  CHECK(transition_energy(kDefaults, RadioState::Sleep, RadioState::Listen) ==
        doctest::Approx(60.1e-6).epsilon(1e-12));
  CHECK(transition_energy(kDefaults, RadioState::Sleep, RadioState::Transmit) ==
        transition_energy(kDefaults, RadioState::Sleep, RadioState::Receive));
  CHECK(transition_energy(kDefaults, RadioState::Receive, RadioState::Sleep) ==
        doctest::Approx(60.1e-6).epsilon(1e-12));
  CHECK(transition_energy(kDefaults, RadioState::Listen, RadioState::Listen) == 0.0);
  CHECK(transition_energy(kDefaults, RadioState::Transmit, RadioState::Receive) == 0.0);
  CHECK(transition_energy(kDefaults, RadioState::Sleep, RadioState::Sleep) == 0.0);
}

TEST_CASE("interval energies") {
  CHECK(std::abs(interval_energy(kDefaults, RadioState::Listen, 0.010) - 600e-6) < 1e-15);
  CHECK(std::abs(interval_energy(kDefaults, RadioState::Sleep, 1.0) - 100e-6) < 1e-15);
  for (auto s : {RadioState::Sleep, RadioState::Transmit, RadioState::Receive, RadioState::Listen}) {
    CHECK(interval_energy(kDefaults, s, 0.0) == 0.0);
  }
  CHECK_THROWS_AS(interval_energy(kDefaults, RadioState::Listen, -1e-3), Error);
}

TEST_CASE("packet energies") {
  CHECK(std::abs(tx_packet_energy(kDefaults, 1024, 10) - 61.44e-6) < 1e-12);
  CHECK(std::abs(tx_packet_energy(kDefaults, 1024, 0) - 51.2e-6) < 1e-12);
  const double amp_d = tx_packet_energy(kDefaults, 1024, 7) - tx_packet_energy(kDefaults, 1024, 0);
  const double amp_2d = tx_packet_energy(kDefaults, 1024, 14) - tx_packet_energy(kDefaults, 1024, 0);
  CHECK(amp_2d == doctest::Approx(4.0 * amp_d).epsilon(1e-12));

  CHECK(std::abs(rx_packet_energy(kDefaults, 1024) - 51.2e-6) < 1e-12);
  CHECK(std::abs(rx_packet_energy(kDefaults, 1) - 50e-9) < 1e-18);
}

TEST_CASE("switch waste") {
  CHECK(std::abs(switch_waste(kDefaults) - 60.1e-6) < 1e-12);
  RadioProfile flat = kDefaults;
  flat.p_sleep = flat.p_listen;
  CHECK(switch_waste(flat) == doctest::Approx(flat.t_sleep_to_active * flat.p_listen));
  RadioProfile instant = kDefaults;
  instant.t_sleep_to_active = 0.0;
  CHECK(switch_waste(instant) == 0.0);
}

TEST_CASE("sleep saving") {
  CHECK(std::abs(sleep_saving(kDefaults, 0.010) - 539.1e-6) < 1e-12);
  CHECK(std::abs(sleep_saving(kDefaults, 0.004) - 179.7e-6) < 1e-12);
  CHECK_THROWS_WITH_AS(sleep_saving(kDefaults, 0.003), doctest::Contains("gap too short"), Error);

  RadioProfile flat = kDefaults;
  flat.p_sleep = flat.p_listen;
  CHECK(std::abs(sleep_saving(flat, 0.010)) < 1e-18);
}

TEST_CASE("should_sleep decision") {
  CHECK(should_sleep(kDefaults, 0.010));
  CHECK_FALSE(should_sleep(kDefaults, 0.002));
  CHECK_FALSE(should_sleep(kDefaults, -1.0));

  // Free switching: break-even is 0 and ties stay awake.
  RadioProfile free = kDefaults;
  free.t_sleep_to_active = 0.0;
  free.t_active_to_sleep = 0.0;
  CHECK(break_even_gap(free) == 0.0);
  CHECK_FALSE(should_sleep(free, 0.0));
  CHECK(should_sleep(free, 1e-9));
}

TEST_CASE("break-even gap") {
  const double expected = (0.004 * 0.03005 - 0.002 * 0.0001) / 0.0599;
  CHECK(std::abs(break_even_gap(kDefaults) - expected) < 1e-15);
  CHECK(std::abs(break_even_gap(kDefaults) - 2.0033e-3) < 1e-7);
  CHECK_FALSE(should_sleep(kDefaults, break_even_gap(kDefaults) * (1 - 1e-9)));
  CHECK(should_sleep(kDefaults, break_even_gap(kDefaults) * (1 + 1e-9)));

  RadioProfile broken = kDefaults;
  broken.p_sleep = broken.p_listen;
  CHECK_THROWS_WITH_AS(break_even_gap(broken), doctest::Contains("no break-even"), Error);
}

TEST_CASE("threshold, monotonicity and sign over random profiles") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_profile(rng);
    const double gstar = break_even_gap(p);
    CHECK(std::abs(flip_point(p) - gstar) <= 1e-9 * gstar);

    // Plugging gap* back in balances both sides of the rule.
    CHECK(std::abs(p.p_active() * gstar -
                   (p.t_active_to_sleep * (p.p_active() + p.p_sleep) / 2 +
                    (gstar - p.t_active_to_sleep) * p.p_sleep) -
                   switch_waste(p)) < 1e-12);

    const double g1 = p.round_trip() * (1.0 + std::uniform_real_distribution<>(0, 5)(rng));
    const double g2 = g1 * 1.5;
    CHECK(sleep_saving(p, g2) > sleep_saving(p, g1));
    CHECK(sleep_saving(p, g1) >= 0.0);
    if (should_sleep(p, g1)) CHECK(should_sleep(p, g2));
    CHECK(transition_energy(p, RadioState::Listen, RadioState::Sleep) >= 0.0);
  }
}

TEST_CASE("profile validation") {
  CHECK_NOTHROW(kDefaults.validate());
  RadioProfile p = kDefaults;
  p.p_sleep = 0.1;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("p_listen"), ConfigError);
  p = kDefaults;
  p.bitrate = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = kDefaults;
  p.p_sleep = 0;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("energy ledger") {
  EnergyLedger ledger(2.0);
  ledger.charge(0.0, ChargeCategory::Tx, 0.25);
  ledger.charge(1.0, ChargeCategory::Rx, 0.5);
  ledger.charge(2.0, ChargeCategory::Tx, 0.125);
  CHECK(ledger.remaining() == 1.125);
  CHECK(ledger.consumed(ChargeCategory::Tx) == 0.375);
  CHECK(ledger.consumed(ChargeCategory::Sleep) == 0.0);
  CHECK(ledger.charges().size() == 3);
  CHECK_THROWS_AS(ledger.charge(3.0, ChargeCategory::Tx, -1e-9), Error);
  CHECK_THROWS_AS(EnergyLedger(0.0), Error);

  std::mt19937_64 rng(5);
  EnergyLedger big(3.0);
  for (int i = 0; i < 10000; ++i) big.charge(i, ChargeCategory::Listen, 1e-4 * (rng() % 100) / 100.0);
  double sum = 0.0;
  for (const auto& c : big.charges()) sum += c.amount;
  CHECK(std::abs(big.remaining() + sum - big.initial()) <= 1e-9 * big.initial());
}
