#include "wsn/radio.hpp"

#include <cmath>
#include <string>

#include "wsn/error.hpp"

namespace wsn {

std::string_view to_string(RadioState state) {
  switch (state) {
    case RadioState::Sleep: return "sleep";
    case RadioState::Transmit: return "transmit";
    case RadioState::Receive: return "receive";
    case RadioState::Listen: return "listen";
  }
  return "?";
}

std::string_view to_string(ChargeCategory category) {
  switch (category) {
    case ChargeCategory::Tx: return "tx";
    case ChargeCategory::Rx: return "rx";
    case ChargeCategory::Listen: return "listen";
    case ChargeCategory::Sleep: return "sleep";
    case ChargeCategory::Transition: return "transition";
  }
  return "?";
}

void RadioProfile::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be > 0");
  };
  positive(p_listen, "p_listen");
  positive(p_receive, "p_receive");
  positive(e_elec, "e_elec");
  positive(e_amp, "e_amp");
  positive(t_sleep_to_active, "t_sleep_to_active");
  positive(t_active_to_sleep, "t_active_to_sleep");
  positive(bitrate, "bitrate");
  positive(packet_bits, "packet_bits");
  if (!(p_sleep >= 0.0) || !std::isfinite(p_sleep)) throw ConfigError("p_sleep must be >= 0");
  if (!(p_sleep < p_listen)) throw ConfigError("p_sleep must be below p_listen");
}

namespace {

bool active(RadioState s) { return s != RadioState::Sleep; }

double trapezoid(const RadioProfile& p, double duration) {
  return duration * (p.p_active() + p.p_sleep) / 2.0;
}

}  // namespace

double transition_energy(const RadioProfile& profile, RadioState from, RadioState to) {
  if (active(from) == active(to)) return 0.0;
  return trapezoid(profile, active(to) ? profile.t_sleep_to_active : profile.t_active_to_sleep);
}

double interval_energy(const RadioProfile& profile, RadioState state, double duration) {
  if (!(duration >= 0.0)) throw Error("interval duration must be >= 0");
  switch (state) {
    case RadioState::Sleep: return profile.p_sleep * duration;
    case RadioState::Receive: return profile.p_receive * duration;
    case RadioState::Transmit:
    case RadioState::Listen: return profile.p_listen * duration;
  }
  return 0.0;
}

double tx_packet_energy(const RadioProfile& profile, double bits, double distance) {
  return profile.e_elec * bits + profile.e_amp * bits * distance * distance;
}

double rx_packet_energy(const RadioProfile& profile, double bits) { return profile.e_elec * bits; }

double switch_waste(const RadioProfile& profile) {
  return trapezoid(profile, profile.t_sleep_to_active);
}

namespace {

// (t_a - t_s) p_active - (t_{a-s} (p_active + p_sleep)/2 + (t_a - t_s - t_{a-s}) p_sleep)
double saving_formula(const RadioProfile& p, double gap) {
  return gap * p.p_active() -
         (trapezoid(p, p.t_active_to_sleep) + (gap - p.t_active_to_sleep) * p.p_sleep);
}

}  // namespace

double sleep_saving(const RadioProfile& profile, double gap) {
  if (gap < profile.round_trip()) throw Error("gap too short for a sleep/wake round trip");
  return saving_formula(profile, gap);
}

// Switching costs energy, not schedule time, so the break-even comparison is
// the whole rule.
bool should_sleep(const RadioProfile& profile, double gap) {
  if (!(gap >= 0.0)) return false;
  return switch_waste(profile) < saving_formula(profile, gap);
}

double break_even_gap(const RadioProfile& profile) {
  const double pa = profile.p_active();
  const double ps = profile.p_sleep;
  if (!(pa > ps)) throw Error("no break-even: p_listen must exceed p_sleep");
  return ((profile.t_sleep_to_active + profile.t_active_to_sleep) * (pa + ps) / 2.0 -
          profile.t_active_to_sleep * ps) /
         (pa - ps);
}

EnergyLedger::EnergyLedger(double initial_energy) : initial_(initial_energy) {
  if (!(initial_energy > 0.0) || !std::isfinite(initial_energy)) {
    throw Error("initial energy must be positive");
  }
}

void EnergyLedger::charge(double time, ChargeCategory category, double amount) {
  if (!(amount >= 0.0) || !std::isfinite(amount)) throw Error("energy charge must be finite and >= 0");
  charges_.push_back({time, category, amount});
  consumed_ += amount;
}

double EnergyLedger::consumed(ChargeCategory category) const {
  double sum = 0.0;
  for (const auto& c : charges_) {
    if (c.category == category) sum += c.amount;
  }
  return sum;
}

}  // namespace wsn
