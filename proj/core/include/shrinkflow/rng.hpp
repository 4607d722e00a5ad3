#pragma once

#include <cstdint>
#include <random>

namespace shrinkflow {

/// Source of standard normal variates. Abstract so tests can inject
/// degenerate noise (e.g. a zero-variance stub).
class RandomSource {
public:
  virtual ~RandomSource() = default;
  virtual double normal() = 0;
};

uint64_t splitmix64(uint64_t& state);

/// mt19937_64-backed stream with an explicit polar-method normal generator
/// (self-contained draw sequence, reproducible for a fixed master seed).
/// Per-path streams are keyed by (master_seed, stream_index) so ensemble
/// results do not depend on the number of workers.
class RngStream final : public RandomSource {
public:
  explicit RngStream(uint64_t seed);
  static RngStream for_path(uint64_t master_seed, uint64_t stream_index);

  double normal() override;
  double uniform();  // [0,1)

private:
  std::mt19937_64 gen_;
  double spare_ = 0;
  bool has_spare_ = false;
};

class ZeroRandomSource final : public RandomSource {
public:
  double normal() override { return 0.0; }
};

}  // namespace shrinkflow
