#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace wsn {

/// Exactly one of these at any instant, so r_t + r_r + r_l + r_s = 1 holds
/// by construction.
enum class RadioState { Sleep, Transmit, Receive, Listen };

std::string_view to_string(RadioState state);

/// Power, timing and per-bit energy constants of one radio. SI units.
struct RadioProfile {
  double p_listen = 0.060;           // W, also the "active" power of the sleep rule
  double p_receive = 0.060;          // W
  double p_sleep = 0.0001;           // W
  double e_elec = 50e-9;             // J/bit
  double e_amp = 100e-12;            // J/bit/m^2
  double t_sleep_to_active = 0.002;  // s
  double t_active_to_sleep = 0.002;  // s
  double bitrate = 250000.0;         // bit/s
  double packet_bits = 1024.0;       // bits

  double p_active() const { return p_listen; }
  double packet_airtime() const { return packet_bits / bitrate; }
  double round_trip() const { return t_active_to_sleep + t_sleep_to_active; }

  /// Throws ConfigError naming the offending field(s).
  void validate() const;

  friend bool operator==(const RadioProfile&, const RadioProfile&) = default;
};

/// Trapezoid of endpoint powers over the switching time. Active<->active
/// and same-state switches are free.
double transition_energy(const RadioProfile& profile, RadioState from, RadioState to);

/// Power x time for a state. Transmit bills the residual non-sending time at
/// listen power; the packet itself goes through tx_packet_energy.
double interval_energy(const RadioProfile& profile, RadioState state, double duration);

/// e_elec*bits + e_amp*bits*d^2
double tx_packet_energy(const RadioProfile& profile, double bits, double distance);
double rx_packet_energy(const RadioProfile& profile, double bits);

/// Energy burnt by one sleep->active switch.
double switch_waste(const RadioProfile& profile);

/// Energy saved by sleeping through an idle gap instead of listening.
/// Throws Error("gap too short") when gap < round_trip().
double sleep_saving(const RadioProfile& profile, double gap);

/// switch_waste < saving(gap), strict.
bool should_sleep(const RadioProfile& profile, double gap);

/// Idle gap at which waste and saving are equal. Requires p_listen > p_sleep.
double break_even_gap(const RadioProfile& profile);

enum class ChargeCategory { Tx, Rx, Listen, Sleep, Transition };

std::string_view to_string(ChargeCategory category);

struct Charge {
  double time;
  ChargeCategory category;
  double amount;
};

/// Itemised energy account of one node for one run.
class EnergyLedger {
 public:
  explicit EnergyLedger(double initial_energy);

  /// amount must be finite and >= 0.
  void charge(double time, ChargeCategory category, double amount);

  double initial() const { return initial_; }
  double consumed() const { return consumed_; }
  double remaining() const { return initial_ - consumed_; }
  double consumed(ChargeCategory category) const;
  std::span<const Charge> charges() const { return charges_; }

 private:
  double initial_;
  double consumed_ = 0.0;
  std::vector<Charge> charges_;
};

}  // namespace wsn
