#pragma once

#include <cstdint>
#include <random>

#include "amh/linalg.hpp"

namespace amh {

/**
 * Per-chain random stream. One engine per chain, seeded once; every draw of a
 * chain goes through this object so a run is replayable from its seed.
 */
class ChainRng {
 public:
  explicit ChainRng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  Vector normal_vector(std::size_t dim) {
    Vector z(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal();
    return z;
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace amh
