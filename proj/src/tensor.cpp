#include "g2forge/tensor.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace g2forge {

Mat identity_mat() {
  Mat m(Symmetry::symmetric);
  for (int i = 0; i < kDim; ++i) m(i, i) = 1.0;
  return m;
}

bool is_symmetric(const Mat& a, double tol) {
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

namespace {

// Visits every multi-index of rank R together with the flat offset of the
// same multi-index with positions p and p+1 swapped.
template <int R, class F>
void for_each_transposition(F&& f) {
  std::array<int, R> idx{};
  for (std::size_t n = 0; n < Tensor<R>::size; ++n) {
    std::size_t rem = n;
    for (int p = R - 1; p >= 0; --p) {
      idx[p] = static_cast<int>(rem % kDim);
      rem /= kDim;
    }
    for (int p = 0; p + 1 < R; ++p) {
      auto sw = idx;
      std::swap(sw[p], sw[p + 1]);
      std::size_t m = 0;
      for (int q = 0; q < R; ++q) m = m * kDim + sw[q];
      f(n, m);
    }
  }
}

}  // namespace

template <int R>
bool is_antisymmetric(const Tensor<R>& a, double tol) {
  bool ok = true;
  for_each_transposition<R>([&](std::size_t n, std::size_t m) {
    if (std::fabs(a[n] + a[m]) > tol) ok = false;
  });
  return ok;
}

template <int R>
bool matches_symmetry_tag(const Tensor<R>& a, double tol) {
  switch (a.symmetry()) {
    case Symmetry::none:
      return true;
    case Symmetry::antisymmetric:
      return is_antisymmetric(a, tol);
    case Symmetry::symmetric: {
      bool ok = true;
      for_each_transposition<R>([&](std::size_t n, std::size_t m) {
        if (std::fabs(a[n] - a[m]) > tol) ok = false;
      });
      return ok;
    }
  }
  return false;
}

template bool is_antisymmetric(const Tensor<2>&, double);
template bool is_antisymmetric(const Tensor<3>&, double);
template bool is_antisymmetric(const Tensor<4>&, double);
template bool matches_symmetry_tag(const Tensor<1>&, double);
template bool matches_symmetry_tag(const Tensor<2>&, double);
template bool matches_symmetry_tag(const Tensor<3>&, double);
template bool matches_symmetry_tag(const Tensor<4>&, double);

}  // namespace g2forge
