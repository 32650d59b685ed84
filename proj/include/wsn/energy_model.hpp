#pragma once

// First-order radio and sensing energy model. All energies are joules, all
// durations seconds. Rates are per second of activity, so a packet costs
// rate * packet_time.

namespace wsn {

struct RadioParams {
  double e_t = 0;    // transmitter electronics, J/s
  double e_r = 0;    // receiver, J/s
  double e_d = 0;    // amplifier, J/(m^n s)
  double e_id = 0;   // idle listening, J/s
  double e_sen = 0;  // sensing, J/s
  double path_loss_n = 2.0;
  double data_rate_bps = 0;
  long packet_bits = 0;

  double bit_time() const { return 1.0 / data_rate_bps; }
  double packet_time() const { return static_cast<double>(packet_bits) / data_rate_bps; }

  // Throws DomainError if any invariant is broken.
  void validate() const;

  // Radio constants used by the reference deployment (B = 512 bits, D = 20 kbps).
  static RadioParams reference();
};

double tx_packet_energy(const RadioParams& p, double distance_m, long bits);
double rx_packet_energy(const RadioParams& p, long bits);
double idle_energy(const RadioParams& p, double seconds);
double sense_energy(const RadioParams& p, double seconds);

/// Fraction of the supplied energy that was consumed. `used` may exceed
/// `supplied` by float noise (relative 1e-9); anything larger is an
/// AccountingError.
double utilization_ratio(double used, double supplied);

}  // namespace wsn
