#include "csmc/rng.hpp"

#include <cmath>

namespace csmc {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline void philox_block(std::uint64_t key, std::uint64_t x0, std::uint64_t x1,
                         std::uint64_t& y0, std::uint64_t& y1) {
  std::uint64_t k = key;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi, lo;
    mulhilo(x0, kPhiloxM, hi, lo);
    x0 = hi ^ k ^ x1;
    x1 = lo;
    k += kWeyl;
  }
  y0 = x0;
  y1 = x1;
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  if (have_ == 0) {
    philox_block(key_, ctr_hi_, ctr_lo_, buf_[0], buf_[1]);
    if (++ctr_lo_ == 0) {
      // Carry stays below the derivation domain (MSB of ctr_hi_ reserved).
      ctr_hi_ = (ctr_hi_ + 1) & 0x7FFFFFFFFFFFFFFFULL;
    }
    have_ = 2;
  }
  return buf_[--have_];
}

double RngStream::uniform01() {
  // 53 random bits, centered in the cell: always in the open interval.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return inverse_normal_cdf(uniform01()); }

RngStream RngStream::substream(std::string_view tag, std::uint64_t index) const {
  std::uint64_t y0, y1;
  philox_block(key_, fnv1a64(tag) | 0x8000000000000000ULL, index, y0, y1);
  return RngStream(y0);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) *
                    r +
                4.5921953931549871457e4) *
                   r +
               1.3731693765509461125e4) *
                  r +
              1.9715909503065514427e3) *
                 r +
             1.3314166789178437745e2) *
                r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) *
                    r +
                2.1213794301586595867e4) *
                   r +
               5.3941960214247511077e3) *
                  r +
              6.8718700749205790830e2) *
                 r +
             4.2313330701600911252e1) *
                r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e0) *
                r +
            3.64784832476320460504e0) *
               r +
           5.76949722146069140550e0) *
              r +
          4.63033784615654529590e0) *
             r +
         1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e0) *
              r +
          2.05319162663775882187e0) *
             r +
         1.0);
  } else {
    r -= 5.0;
    value =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e0) *
              r +
          5.46378491116411436990e0) *
             r +
         6.65790464350110377720e0) /
        ((((((1.42151175831644588870e-15 * r + 1.84631831751005468180e-6) * r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
  }
  return (q < 0.0) ? -value : value;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779399461;
}

}  // namespace csmc
