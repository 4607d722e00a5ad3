#include "shrinkflow/rng.hpp"

#include <cmath>

namespace shrinkflow {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RngStream::RngStream(uint64_t seed) : gen_(seed) {}

RngStream RngStream::for_path(uint64_t master_seed, uint64_t stream_index) {
  uint64_t s = master_seed;
  (void)splitmix64(s);
  s ^= 0x2545F4914F6CDD1Dull * (stream_index + 1);
  return RngStream(splitmix64(s));
}

double RngStream::uniform() {
  // 53-bit mantissa in [0,1)
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

}  // namespace shrinkflow
