#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "g2forge/core.hpp"
#include "g2forge/grid.hpp"

namespace g2forge {

// A G2-structure sampled on a periodic grid. The induced metric of every
// sample is computed at construction, so a G2Field always lies in the
// positivity cone.
class G2Field {
 public:
  G2Field(Grid grid, TensorField<3> phi, double amplitude = 0.0);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return phi_.size(); }
  const TensorField<3>& phi() const { return phi_; }
  const Form3& phi(std::size_t i) const { return phi_[i]; }
  const MetricData& metric(std::size_t i) const { return metric_[i]; }
  double amplitude() const { return amplitude_; }

  // True when every sample equals the first one.
  bool is_constant(double tol = 0.0) const;
  // Riemannian volume of the 7-torus.
  double volume() const;

 private:
  Grid grid_;
  TensorField<3> phi_;
  std::vector<MetricData> metric_;
  double amplitude_;
};

// phi(x) = exp(amplitude * M(x)) . phi_0, M a random periodic 7x7 matrix
// field built from wavevectors with components in {0, 1, 2} per axis.
G2Field make_field(const std::vector<int>& axes, const std::vector<int>& shape,
                   const std::vector<double>& periods, double amplitude,
                   std::uint64_t seed, DiffScheme scheme = DiffScheme::fd4);
G2Field constant_field(const Grid& grid, const Form3& phi);

// "G2F1" container: magic, u32 axis count, per axis (u32 axis, u32 shape,
// f64 period), then 35 little-endian f64 per point in row-major grid order.
void write_field(const G2Field& field, const std::filesystem::path& path);
G2Field read_field(const std::filesystem::path& path,
                   DiffScheme scheme = DiffScheme::fd4);

}  // namespace g2forge
