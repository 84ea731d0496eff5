#pragma once

#include <cstdint>
#include <string_view>

namespace csmc {

// Counter-mode keyed stream (Philox-2x64, 10 rounds).
//
// A stream is (key, 128-bit counter). Output block i is a pure function of
// (key, i), so streams can be split without shared state: substream(tag, k)
// derives a child key from one Philox block of the parent key over the
// counter (fnv1a64(tag) | MSB, k). Generation counters keep the MSB of the
// high word clear, so derivation and generation never read the same block.
//
// Everything downstream (particles, replicates, levels) draws from its own
// derived stream, which is what makes runs independent of scheduling order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform01();

  // Standard normal via the inverse CDF; consumes exactly one uniform.
  double normal();

  // Child stream; does not advance this stream.
  RngStream substream(std::string_view tag, std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t ctr_hi_ = 0, ctr_lo_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int have_ = 0;
};

// Wichura's AS241 (PPND16). Relative error ~1e-15 over (0,1).
double inverse_normal_cdf(double p);

// Standard normal CDF (via erfc) and density.
double normal_cdf(double x);
double normal_pdf(double x);

std::uint64_t fnv1a64(std::string_view s);

}  // namespace csmc
