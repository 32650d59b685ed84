#include "wsn/energy_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsn/errors.hpp"

namespace wsn {

void RadioParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("radio parameter ") + name + " must be positive and finite");
    }
  };
  positive(e_t, "e_t");
  positive(e_r, "e_r");
  positive(e_d, "e_d");
  positive(e_id, "e_id");
  positive(e_sen, "e_sen");
  positive(data_rate_bps, "data_rate_bps");
  if (!(path_loss_n >= 2.0 && path_loss_n <= 4.0)) {
    throw DomainError("path loss exponent must lie in [2, 4]");
  }
  if (packet_bits < 1) throw DomainError("packet must carry at least one bit");
}

RadioParams RadioParams::reference() {
  RadioParams p;
  p.e_t = 1024e-6;
  p.e_r = 819.2e-6;
  p.e_d = 2048e-9;
  p.e_id = 409.6e-6;
  p.e_sen = 81.2e-6;
  p.path_loss_n = 2.0;
  p.data_rate_bps = 20000.0;
  p.packet_bits = 512;
  return p;
}

double tx_packet_energy(const RadioParams& p, double distance_m, long bits) {
  if (!(distance_m >= 0.0)) throw DomainError("transmit distance must be non-negative");
  if (bits < 1) throw DomainError("transmit needs at least one bit");
  const double rate = p.e_t + p.e_d * std::pow(distance_m, p.path_loss_n);
  return rate * static_cast<double>(bits) / p.data_rate_bps;
}

double rx_packet_energy(const RadioParams& p, long bits) {
  if (bits < 1) throw DomainError("receive needs at least one bit");
  return p.e_r * static_cast<double>(bits) / p.data_rate_bps;
}

double idle_energy(const RadioParams& p, double seconds) {
  if (!(seconds >= 0.0)) throw DomainError("idle duration must be non-negative");
  return p.e_id * seconds;
}

double sense_energy(const RadioParams& p, double seconds) {
  if (!(seconds >= 0.0)) throw DomainError("sensing duration must be non-negative");
  return p.e_sen * seconds;
}

double utilization_ratio(double used, double supplied) {
  if (!(supplied > 0.0)) throw DomainError("supplied energy must be positive");
  if (used < 0.0) throw AccountingError("negative energy use");
  if (used > supplied * (1.0 + 1e-9)) {
    throw AccountingError("energy used exceeds energy supplied");
  }
  return std::min(used / supplied, 1.0);
}

}  // namespace wsn
