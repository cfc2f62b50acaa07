#pragma once

#include <cstdint>
#include <random>

#include "g2forge/tensor.hpp"

namespace g2forge {

// Seeded generator whose output depends only on the seed (the standard
// distributions are implementation-defined, so they are not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Vec random_vec(Rng& rng, double scale = 1.0);
Mat random_mat(Rng& rng, double scale = 1.0);
Mat random_sym(Rng& rng, double scale = 1.0);
Mat random_antisym(Rng& rng, double scale = 1.0);
// Invertible matrix near the identity: 1 + scale * N(0,1) entries, with
// positive determinant.
Mat random_gl7(Rng& rng, double scale);

}  // namespace g2forge
