#include "g2forge/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "g2forge/parallel.hpp"

namespace g2forge {

namespace {

Grid::Stencil make_stencil(int n, double period, DiffScheme scheme) {
  Grid::Stencil st;
  const double h = period / n;
  if (scheme == DiffScheme::fd4) {
    st.offsets = {1, 2};
    st.weights = {8.0 / (12 * h), -1.0 / (12 * h)};
    return st;
  }
  // w_m = (2/N) sum_{k=1}^{N/2-1} kappa_k sin(2 pi k m / N), kappa_k = 2 pi k/L
  for (int m = 1; 2 * m < n; ++m) {
    double w = 0.0;
    for (int k = 1; 2 * k < n; ++k)
      w += (2 * std::numbers::pi * k / period) *
           std::sin(2 * std::numbers::pi * k * m / n);
    st.offsets.push_back(m);
    st.weights.push_back(2.0 * w / n);
  }
  return st;
}

}  // namespace

Grid::Grid() = default;

Grid::Grid(std::vector<int> axes, std::vector<int> shape,
           std::vector<double> periods, DiffScheme scheme)
    : axes_(std::move(axes)),
      shape_(std::move(shape)),
      periods_(std::move(periods)),
      scheme_(scheme) {
  if (axes_.size() > 2 || axes_.size() != shape_.size() ||
      axes_.size() != periods_.size())
    throw std::invalid_argument("grid: need matching axes/shape/periods, k <= 2");
  if (axes_.size() == 2 && axes_[0] == axes_[1])
    throw std::invalid_argument("grid: repeated axis");
  for (std::size_t s = 0; s < axes_.size(); ++s) {
    if (axes_[s] < 0 || axes_[s] >= kDim)
      throw std::invalid_argument("grid: axis out of range");
    if (shape_[s] < 5) throw std::invalid_argument("grid: shape must be >= 5");
    if (!(periods_[s] > 0)) throw std::invalid_argument("grid: period <= 0");
    size_ *= static_cast<std::size_t>(shape_[s]);
    stencils_.push_back(make_stencil(shape_[s], periods_[s], scheme_));
  }
}

Grid Grid::with_scheme(DiffScheme s) const {
  if (axes_.empty()) return *this;
  return Grid(axes_, shape_, periods_, s);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int s = 0; s < active_count(); ++s) v *= spacing(s);
  return v;
}

double Grid::volume() const {
  double v = 1.0;
  for (double p : periods_) v *= p;
  return v;
}

std::array<int, 2> Grid::multi_index(std::size_t flat) const {
  std::array<int, 2> idx{0, 0};
  if (active_count() == 1) {
    idx[0] = static_cast<int>(flat);
  } else if (active_count() == 2) {
    idx[0] = static_cast<int>(flat / shape_[1]);
    idx[1] = static_cast<int>(flat % shape_[1]);
  }
  return idx;
}

std::size_t Grid::flat_index(std::array<int, 2> idx) const {
  if (active_count() == 0) return 0;
  if (active_count() == 1) return static_cast<std::size_t>(idx[0]);
  return static_cast<std::size_t>(idx[0]) * shape_[1] + idx[1];
}

std::size_t Grid::shifted(std::size_t flat, int slot, int offset) const {
  auto idx = multi_index(flat);
  const int n = shape_[slot];
  idx[slot] = ((idx[slot] + offset) % n + n) % n;
  return flat_index(idx);
}

double Grid::coordinate(std::size_t flat, int slot) const {
  return multi_index(flat)[slot] * spacing(slot);
}

int Grid::wavenumber(int slot, int n) const {
  const int size = shape_[slot];
  return 2 * n <= size ? n : n - size;
}

double Grid::symbol(int slot, int k) const {
  const int n = shape_[slot];
  const double h = spacing(slot);
  const double theta = 2 * std::numbers::pi * k / n;
  if (scheme_ == DiffScheme::fd4)
    return (8 * std::sin(theta) - std::sin(2 * theta)) / (6 * h);
  const int kk = ((k % n) + n) % n;
  const int wn = 2 * kk <= n ? kk : kk - n;
  if (2 * wn == n) return 0.0;
  return 2 * std::numbers::pi * wn / periods_[slot];
}

bool Grid::operator==(const Grid& o) const {
  return axes_ == o.axes_ && shape_ == o.shape_ && periods_ == o.periods_ &&
         scheme_ == o.scheme_;
}

double integrate(const Grid& grid, const ScalarField& density) {
  return pairwise_sum(density) * grid.cell_volume();
}

}  // namespace g2forge
