#include "g2forge/random.hpp"

#include <cmath>
#include <numbers>

#include "eigen_bridge.hpp"

namespace g2forge {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  while (u <= 0.0) u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  spare_ = r * std::sin(2.0 * std::numbers::pi * v);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * v);
}

Vec random_vec(Rng& rng, double scale) {
  Vec v;
  for (int i = 0; i < 7; ++i) v(i) = scale * rng.normal();
  return v;
}

Mat random_mat(Rng& rng, double scale) {
  Mat m;
  for (std::size_t n = 0; n < Mat::size; ++n) m[n] = scale * rng.normal();
  return m;
}

Mat random_sym(Rng& rng, double scale) {
  Mat m(Symmetry::symmetric);
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      m(i, j) = scale * rng.normal();
      m(j, i) = m(i, j);
    }
  return m;
}

Mat random_antisym(Rng& rng, double scale) {
  Mat m(Symmetry::antisymmetric);
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) {
      m(i, j) = scale * rng.normal();
      m(j, i) = -m(i, j);
    }
  return m;
}

Mat random_gl7(Rng& rng, double scale) {
  for (;;) {
    Mat a = identity_mat() + random_mat(rng, scale);
    a.set_symmetry(Symmetry::none);
    if (to_eigen(a).determinant() > 1e-3) return a;
  }
}

}  // namespace g2forge
