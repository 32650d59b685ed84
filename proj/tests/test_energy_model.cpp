#include <gtest/gtest.h>

#include <cmath>

#include "wsn/energy_model.hpp"
#include "wsn/errors.hpp"
#include "wsn/rng.hpp"

using namespace wsn;

namespace {

const RadioParams P = RadioParams::reference();

// Hand-written oracle: (e_t + e_d d^2) * B / D with the constants spelled out.
long double tx_oracle(long double d, long double bits) {
  return (1024e-6L + 2048e-9L * d * d) * bits / 20000.0L;
}

}  // namespace

TEST(TxPacketEnergy, TwentyMetres) {
  EXPECT_NEAR(tx_packet_energy(P, 20, 512) * 1e6, 47.186, 5e-4);
  EXPECT_NEAR(tx_packet_energy(P, 20, 512), static_cast<double>(tx_oracle(20, 512)), 1e-15);
}

TEST(TxPacketEnergy, TenMetres) {
  EXPECT_NEAR(tx_packet_energy(P, 10, 512) * 1e6, 31.46, 5e-3);
}

TEST(TxPacketEnergy, ZeroDistanceIsElectronicsOnly) {
  EXPECT_DOUBLE_EQ(tx_packet_energy(P, 0, 512), P.e_t * 512 / P.data_rate_bps);
}

TEST(TxPacketEnergy, RejectsBadArguments) {
  EXPECT_THROW(tx_packet_energy(P, -1, 512), DomainError);
  EXPECT_THROW(tx_packet_energy(P, 10, 0), DomainError);
}

TEST(TxPacketEnergy, MonotoneInDistanceLinearInBits) {
  SplitMix64 rng(7);
  double prev = 0;
  for (int k = 0; k < 200; ++k) {
    const double d = k * 0.5;
    const double e = tx_packet_energy(P, d, 512);
    EXPECT_GE(e, prev);
    prev = e;
    const long bits = 1 + static_cast<long>(rng.uniform(0, 4096));
    EXPECT_NEAR(tx_packet_energy(P, d, 2 * bits), 2 * tx_packet_energy(P, d, bits),
                1e-15 * tx_packet_energy(P, d, bits));
  }
}

TEST(TxPacketEnergy, AmplifierTermIdentity) {
  for (double n : {2.0, 2.5, 3.0, 4.0}) {
    RadioParams p = P;
    p.path_loss_n = n;
    for (double d : {1.0, 7.5, 20.0, 60.0}) {
      const double diff = tx_packet_energy(p, d, 512) - tx_packet_energy(p, 0, 512);
      const double expect = p.e_d * std::pow(d, n) * 512 / p.data_rate_bps;
      EXPECT_NEAR(diff, expect, 1e-12 * expect);
    }
  }
}

TEST(RxPacketEnergy, Examples) {
  EXPECT_NEAR(rx_packet_energy(P, 512) * 1e6, 20.972, 5e-4);
  EXPECT_NEAR(rx_packet_energy(P, 1) * 1e9, 40.96, 1e-9);
  RadioParams p = P;
  p.e_r *= 2;
  EXPECT_DOUBLE_EQ(rx_packet_energy(p, 512), 2 * rx_packet_energy(P, 512));
  EXPECT_THROW(rx_packet_energy(P, 0), DomainError);
}

TEST(IdleEnergy, Examples) {
  EXPECT_EQ(idle_energy(P, 0), 0.0);
  EXPECT_NEAR(idle_energy(P, 0.1) * 1e6, 40.96, 1e-9);
  EXPECT_NEAR(idle_energy(P, 1) * 1e6, 409.6, 1e-9);
  EXPECT_DOUBLE_EQ(idle_energy(P, 2.6), 2 * idle_energy(P, 1.3));
  EXPECT_THROW(idle_energy(P, -0.1), DomainError);
}

TEST(SenseEnergy, Examples) {
  EXPECT_NEAR(sense_energy(P, 3) * 1e6, 243.6, 1e-9);
  EXPECT_EQ(sense_energy(P, 0), 0.0);
  EXPECT_NEAR(sense_energy(P, 1) * 1e6, 81.2, 1e-9);
  EXPECT_DOUBLE_EQ(sense_energy(P, 8), 2 * sense_energy(P, 4));
  EXPECT_THROW(sense_energy(P, -1), DomainError);
}

TEST(UtilizationRatio, Definition) {
  EXPECT_EQ(utilization_ratio(0, 1000), 0.0);
  EXPECT_EQ(utilization_ratio(1000, 1000), 1.0);
  EXPECT_EQ(utilization_ratio(500, 1000), 0.5);
  EXPECT_EQ(utilization_ratio(1000 * (1 + 1e-12), 1000), 1.0);
}

TEST(UtilizationRatio, Errors) {
  EXPECT_THROW(utilization_ratio(1, 0), DomainError);
  EXPECT_THROW(utilization_ratio(1, -5), DomainError);
  EXPECT_THROW(utilization_ratio(1000 * (1 + 1e-6), 1000), AccountingError);
}

TEST(RadioParams, Validation) {
  EXPECT_NO_THROW(P.validate());
  RadioParams p = P;
  p.path_loss_n = 1.5;
  EXPECT_THROW(p.validate(), DomainError);
  p = P;
  p.path_loss_n = 4.5;
  EXPECT_THROW(p.validate(), DomainError);
  p = P;
  p.e_id = 0;
  EXPECT_THROW(p.validate(), DomainError);
  p = P;
  p.packet_bits = 0;
  EXPECT_THROW(p.validate(), DomainError);
  EXPECT_DOUBLE_EQ(P.packet_time(), 0.0256);
  EXPECT_DOUBLE_EQ(P.bit_time(), 5e-5);
}
