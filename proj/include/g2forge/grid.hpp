#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "g2forge/tensor.hpp"

namespace g2forge {

// Periodic differentiation schemes. fd4 is the 5-point central stencil;
// spectral is the Fourier derivative written as a dense circulant stencil
// (Nyquist mode dropped).
enum class DiffScheme { fd4, spectral };

// Periodic grid over up to two active coordinate axes of R^7.
class Grid {
 public:
  // Antisymmetric stencil: D f(i) = sum_n w_n (f(i + m_n) - f(i - m_n)).
  struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;
  };

  Grid();  // a single point, no active axes
  Grid(std::vector<int> axes, std::vector<int> shape,
       std::vector<double> periods, DiffScheme scheme = DiffScheme::fd4);

  int active_count() const { return static_cast<int>(axes_.size()); }
  const std::vector<int>& axes() const { return axes_; }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& periods() const { return periods_; }
  DiffScheme scheme() const { return scheme_; }
  Grid with_scheme(DiffScheme s) const;

  std::size_t size() const { return size_; }
  double spacing(int slot) const { return periods_[slot] / shape_[slot]; }
  double cell_volume() const;  // product of spacings; 1 with no axes
  double volume() const;       // product of periods; 1 with no axes

  std::array<int, 2> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::array<int, 2> idx) const;
  std::size_t shifted(std::size_t flat, int slot, int offset) const;
  double coordinate(std::size_t flat, int slot) const;

  const Stencil& stencil(int slot) const { return stencils_[slot]; }
  // Fourier multiplier of the derivative stencil: D e^{i kappa x} =
  // i symbol(k) e^{i kappa x} for the integer wavenumber k along slot.
  double symbol(int slot, int k) const;
  // Wave number of index n in FFT order, in (-N/2, N/2].
  int wavenumber(int slot, int n) const;

  bool operator==(const Grid& o) const;

 private:
  std::vector<int> axes_;
  std::vector<int> shape_;
  std::vector<double> periods_;
  DiffScheme scheme_ = DiffScheme::fd4;
  std::size_t size_ = 1;
  std::vector<Stencil> stencils_;
};

template <int R>
using TensorField = std::vector<Tensor<R>>;
using ScalarField = std::vector<double>;

inline void accumulate(double& a, double w, double b) { a += w * b; }
template <int R>
void accumulate(Tensor<R>& a, double w, const Tensor<R>& b) {
  a.add_scaled(w, b);
}

// Partial derivative d/dx^{axes[slot]} of a sampled field at one point.
template <class V>
V point_derivative(const Grid& grid, const std::vector<V>& f, std::size_t i,
                   int slot) {
  V out{};
  const auto& st = grid.stencil(slot);
  for (std::size_t n = 0; n < st.offsets.size(); ++n) {
    V diff = f[grid.shifted(i, slot, st.offsets[n])];
    diff -= f[grid.shifted(i, slot, -st.offsets[n])];
    accumulate(out, st.weights[n], diff);
  }
  return out;
}

// Partial derivatives along all 7 coordinates (zero along inactive ones).
template <class V>
std::array<V, kDim> point_gradient(const Grid& grid, const std::vector<V>& f,
                                   std::size_t i) {
  std::array<V, kDim> out{};
  for (int s = 0; s < grid.active_count(); ++s)
    out[grid.axes()[s]] = point_derivative(grid, f, i, s);
  return out;
}

template <class V>
std::vector<V> derivative(const Grid& grid, const std::vector<V>& f, int slot) {
  std::vector<V> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    out[i] = point_derivative(grid, f, i, slot);
  return out;
}

// Quadrature of a scalar density over the 7-torus (inactive sides have unit
// length). Fixed pairwise summation order.
double integrate(const Grid& grid, const ScalarField& density);

}  // namespace g2forge
