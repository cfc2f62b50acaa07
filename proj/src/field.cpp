#include "g2forge/field.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "eigen_bridge.hpp"
#include "g2forge/parallel.hpp"
#include "g2forge/random.hpp"

namespace g2forge {

G2Field::G2Field(Grid grid, TensorField<3> phi, double amplitude)
    : grid_(std::move(grid)), phi_(std::move(phi)), amplitude_(amplitude) {
  if (phi_.size() != grid_.size())
    throw std::invalid_argument("field: sample count does not match grid");
  metric_.resize(phi_.size());
  parallel_for(phi_.size(),
               [&](std::size_t i) { metric_[i] = metric_from_phi(phi_[i]); });
}

bool G2Field::is_constant(double tol) const {
  for (const auto& p : phi_)
    if ((p - phi_[0]).max_abs() > tol) return false;
  return true;
}

double G2Field::volume() const {
  ScalarField v(size());
  for (std::size_t i = 0; i < size(); ++i) v[i] = metric_[i].vol_density;
  return integrate(grid_, v);
}

G2Field make_field(const std::vector<int>& axes, const std::vector<int>& shape,
                   const std::vector<double>& periods, double amplitude,
                   std::uint64_t seed, DiffScheme scheme) {
  Grid grid(axes, shape, periods, scheme);
  const int k = grid.active_count();
  std::vector<std::array<int, 2>> waves;
  for (int a = 0; a <= (k >= 1 ? 2 : 0); ++a)
    for (int b = 0; b <= (k >= 2 ? 2 : 0); ++b)
      if (a != 0 || b != 0) waves.push_back({a, b});

  Rng rng(seed);
  const double scale = waves.empty() ? 0.0 : 1.0 / std::sqrt(waves.size());
  std::vector<Mat> cos_part, sin_part;
  for (std::size_t w = 0; w < waves.size(); ++w) {
    cos_part.push_back(random_mat(rng) * scale);
    sin_part.push_back(random_mat(rng) * scale);
  }

  const Form3 phi0 = standard_phi();
  TensorField<3> phi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Mat m;
    for (std::size_t w = 0; w < waves.size(); ++w) {
      double arg = 0.0;
      for (int s = 0; s < k; ++s)
        arg += 2 * std::numbers::pi * waves[w][s] * grid.coordinate(i, s) /
               grid.periods()[s];
      m.add_scaled(std::cos(arg), cos_part[w]);
      m.add_scaled(std::sin(arg), sin_part[w]);
    }
    const Mat7 a = (amplitude * to_eigen(m)).exp();
    phi[i] = form3_from_components(
        independent_components(transport(from_eigen(a), phi0)));
  }
  return G2Field(std::move(grid), std::move(phi), amplitude);
}

G2Field constant_field(const Grid& grid, const Form3& phi) {
  return G2Field(grid, TensorField<3>(grid.size(), phi));
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "field container assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("field file truncated");
  return v;
}

}  // namespace

void write_field(const G2Field& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write("G2F1", 4);
  const Grid& g = field.grid();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.active_count()));
  for (int s = 0; s < g.active_count(); ++s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.axes()[s]));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.shape()[s]));
    put<double>(out, g.periods()[s]);
  }
  for (const auto& p : field.phi())
    for (double c : independent_components(p)) put<double>(out, c);
}

G2Field read_field(const std::filesystem::path& path, DiffScheme scheme) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "G2F1", 4) != 0)
    throw std::runtime_error("not a G2F1 file: " + path.string());
  const auto k = get<std::uint32_t>(in);
  if (k > 2) throw std::runtime_error("G2F1: too many axes");
  std::vector<int> axes, shape;
  std::vector<double> periods;
  for (std::uint32_t s = 0; s < k; ++s) {
    axes.push_back(static_cast<int>(get<std::uint32_t>(in)));
    shape.push_back(static_cast<int>(get<std::uint32_t>(in)));
    periods.push_back(get<double>(in));
  }
  Grid grid = k == 0 ? Grid() : Grid(axes, shape, periods, scheme);
  TensorField<3> phi(grid.size());
  for (auto& p : phi) {
    std::array<double, 35> c;
    for (double& x : c) x = get<double>(in);
    p = form3_from_components(c);
  }
  return G2Field(std::move(grid), std::move(phi));
}

}  // namespace g2forge
