#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace g2forge {

inline constexpr int kDim = 7;

constexpr std::size_t pow7(int r) {
  std::size_t n = 1;
  for (int i = 0; i < r; ++i) n *= kDim;
  return n;
}

enum class Symmetry { none, symmetric, antisymmetric };

// Dense component array over R^7 with 7^Rank entries, row-major in the
// index order (i1, ..., iRank).
template <int Rank>
class Tensor {
  static_assert(Rank >= 0 && Rank <= 4);

 public:
  static constexpr int rank = Rank;
  static constexpr std::size_t size = pow7(Rank);

  Tensor() = default;
  explicit Tensor(Symmetry s) : symmetry_(s) {}

  template <class... I>
  double& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return c_[offset(idx...)];
  }
  template <class... I>
  double operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return c_[offset(idx...)];
  }

  double& operator[](std::size_t n) { return c_[n]; }
  double operator[](std::size_t n) const { return c_[n]; }

  double* data() { return c_.data(); }
  const double* data() const { return c_.data(); }
  std::span<double, size> components() { return c_; }
  std::span<const double, size> components() const { return c_; }

  Symmetry symmetry() const { return symmetry_; }
  void set_symmetry(Symmetry s) { symmetry_ = s; }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t n = 0; n < size; ++n) c_[n] += o.c_[n];
    if (symmetry_ != o.symmetry_) symmetry_ = Symmetry::none;
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (std::size_t n = 0; n < size; ++n) c_[n] -= o.c_[n];
    if (symmetry_ != o.symmetry_) symmetry_ = Symmetry::none;
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }
  friend Tensor operator-(Tensor a) { return a *= -1.0; }

  // a += s * b without temporaries.
  void add_scaled(double s, const Tensor& b) {
    for (std::size_t n = 0; n < size; ++n) c_[n] += s * b.c_[n];
  }

  // Compares components only; the symmetry tag is advisory.
  bool operator==(const Tensor& o) const { return c_ == o.c_; }

  double max_abs() const {
    double m = 0.0;
    for (double x : c_) m = std::fmax(m, std::fabs(x));
    return m;
  }

 private:
  template <class... I>
  static constexpr std::size_t offset(I... idx) {
    std::size_t n = 0;
    ((n = n * kDim + static_cast<std::size_t>(idx)), ...);
    return n;
  }

  std::array<double, size> c_{};
  Symmetry symmetry_ = Symmetry::none;
};

using Vec = Tensor<1>;
using Mat = Tensor<2>;
using Form3 = Tensor<3>;
using Form4 = Tensor<4>;

// Full Euclidean contraction sum_{i...} a_{i...} b_{i...}.
template <int R>
double dot(const Tensor<R>& a, const Tensor<R>& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < Tensor<R>::size; ++n) s += a[n] * b[n];
  return s;
}

template <int R>
double norm(const Tensor<R>& a) {
  return std::sqrt(dot(a, a));
}

Mat identity_mat();

bool is_symmetric(const Mat& a, double tol);
template <int R>
bool is_antisymmetric(const Tensor<R>& a, double tol);

// Checks the advisory symmetry tag against the components.
template <int R>
bool matches_symmetry_tag(const Tensor<R>& a, double tol);

}  // namespace g2forge
