#include <doctest.h>

#include <cmath>
#include <numbers>

#include "g2forge/variation.hpp"

using namespace g2forge;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double order(double coarse, double fine) { return std::log2(coarse / fine); }

G2Field flat(const Grid& grid) { return constant_field(grid, standard_phi()); }

double max_abs(const Deformation& d) {
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    m = std::fmax(m, std::fmax(d.h[i].max_abs(), d.x[i].max_abs()));
  return m;
}

double l2_norm(const G2Field& f, const Deformation& d) {
  return std::sqrt(l2_pairing(f, d, d));
}

// sqrt 2 cos(2 pi k x / L) along the first active axis: unit mean square.
ScalarField unit_mode(const Grid& grid, int k) {
  ScalarField f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    f[i] = std::sqrt(2.0) *
           std::cos(kTwoPi * k * grid.coordinate(i, 0) / grid.periods()[0]);
  return f;
}

// -L_Y phi as a deformation, for a band-limited Y.
Deformation minus_lie(const G2Field& field) {
  const Grid& g = field.grid();
  TensorField<1> y(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a = kTwoPi * g.coordinate(i, 0) / g.periods()[0];
    const double b = kTwoPi * g.coordinate(i, 1) / g.periods()[1];
    for (int k = 0; k < kDim; ++k)
      y[i](k) = std::cos(a + k) + 0.3 * std::sin(2 * b - a + 2 * k);
  }
  const JetField jf(field);
  const TensorField<3> lie = lie_derivative_fd(jf, y);
  Deformation d = zero_deformation(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const MetricData& m = field.metric(i);
    const HX p = decompose_3form(-1.0 * lie[i], field.phi(i),
                                 hodge_dual(field.phi(i), m), m);
    d.h[i] = p.h;
    d.x[i] = p.x;
  }
  return d;
}

}  // namespace

TEST_CASE("evaluate on constant fields") {
  const Grid grid({2}, {16}, {1.0});
  CHECK(std::fabs(evaluate(flat(grid), FunctionalId::hilbert)) < 1e-14);
  const double lambda = 1.3;
  const G2Field scaled =
      constant_field(grid, std::pow(lambda, 3) * standard_phi());
  CHECK(std::fabs(evaluate(scaled, FunctionalId::hilbert)) < 1e-14);
  CHECK(scaled.volume() == doctest::Approx(std::pow(lambda, 7)).epsilon(1e-13));
  // homogeneous nearly-G2 data: the density is the value per unit volume
  for (double c : {1.0, 0.4})
    CHECK(densities(to_frame(synthetic_nearly_g2_jet(c))).hilbert ==
          doctest::Approx(-3.5 * c * c).epsilon(1e-13));
}

TEST_CASE("first variation at a torsion-free field vanishes") {
  const Grid grid({1}, {16}, {1.0}, DiffScheme::spectral);
  Rng rng(2);
  const Deformation d = random_deformation(grid, rng, 0.2);
  const auto r = first_variation_fd_all(flat(grid), d);
  for (const VariationCheck& c : r) {
    CHECK(std::fabs(c.fd_value) < 1e-6);
    CHECK(std::fabs(c.pairing_value) < 1e-12);
  }
  // Scal along a conformal direction at a flat metric
  Deformation conf = zero_deformation(grid.size());
  const ScalarField f = unit_mode(grid, 1);
  for (std::size_t i = 0; i < grid.size(); ++i)
    conf.h[i] = f[i] * identity_mat();
  const VariationCheck s =
      first_variation_fd(flat(grid), conf, FunctionalId::scal);
  CHECK(std::fabs(s.pairing_value) < 1e-12);
  CHECK(std::fabs(s.fd_value) < 1e-6);
}

TEST_CASE("first variation matches the gradient pairing for every functional") {
  const G2Field field =
      make_field({2}, {32}, {kTwoPi}, 0.05, 7, DiffScheme::spectral);
  Rng rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const Deformation d = random_deformation(field.grid(), rng, 0.1);
    const auto r = first_variation_fd_all(field, d);
    for (std::size_t f = 0; f < 8; ++f) {
      INFO(to_string(kAllFunctionals[f]) << " fd " << r[f].fd_value
                                         << " pairing " << r[f].pairing_value);
      CHECK(r[f].rel_err < 1e-5);
      CHECK(std::fabs(r[f].pairing_value) > 1e-6);
    }
  }
}

TEST_CASE("first variation is zero along diffeomorphisms of a flat field") {
  const Grid grid({0, 3}, {12, 12}, {1.0, 1.0}, DiffScheme::spectral);
  const auto r = first_variation_fd_all(flat(grid), minus_lie(flat(grid)));
  for (const VariationCheck& c : r) CHECK(std::fabs(c.fd_value) < 1e-6);
}

TEST_CASE("displacements outside the positivity cone end in StepUnderflow") {
  const Grid grid({2}, {8}, {1.0});
  Deformation d = zero_deformation(grid.size());
  for (auto& h : d.h) {
    h(0, 0) = 1e9;
    h(1, 1) = -1e9;
  }
  CHECK_THROWS_AS(first_variation_fd(flat(grid), d, FunctionalId::hilbert),
                  StepUnderflow);
}

TEST_CASE("pointwise Lagrangian variation") {
  SUBCASE("constant data") {
    const Grid grid({2}, {8}, {1.0});
    Rng rng(4);
    const Deformation d = random_deformation(grid, rng, 0.3, 0);
    CHECK(lagrangian_variation_residual(flat(grid), d) < 1e-9);
  }
  SUBCASE("flat field, vector part only") {
    const Grid grid({2}, {32}, {kTwoPi}, DiffScheme::spectral);
    Rng rng(6);
    Deformation d = random_deformation(grid, rng, 0.3);
    for (auto& h : d.h) h = Mat{};
    CHECK(lagrangian_variation_residual(flat(grid), d) < 1e-5);
  }
  SUBCASE("refinement") {
    double r[3];
    const int sizes[3] = {32, 64, 128};
    for (int k = 0; k < 3; ++k) {
      const G2Field field =
          make_field({2}, {sizes[k]}, {kTwoPi}, 0.05, 7, DiffScheme::fd4);
      Rng rng(5);
      r[k] = lagrangian_variation_residual(
          field, random_deformation(field.grid(), rng, 0.1));
    }
    INFO(r[0] << " " << r[1] << " " << r[2]);
    CHECK(order(r[0], r[1]) > 2.0);
    CHECK(order(r[1], r[2]) > 2.0);
  }
  SUBCASE("spectral derivatives") {
    const G2Field field =
        make_field({2}, {48}, {kTwoPi}, 0.05, 7, DiffScheme::spectral);
    Rng rng(5);
    CHECK(lagrangian_variation_residual(
              field, random_deformation(field.grid(), rng, 0.1)) < 1e-7);
  }
}

TEST_CASE("slice decomposition on the flat model") {
  for (DiffScheme scheme : {DiffScheme::spectral, DiffScheme::fd4}) {
    const Grid grid({1, 4}, {12, 12}, {1.0, 1.0}, scheme);
    const G2Field field = flat(grid);
    Rng rng(9);

    SUBCASE("random deformation") {
      const Deformation d = random_deformation(grid, rng, 1.0);
      const Split s = split_deformation(field, d);
      const double nc = l2_norm(field, s.conformal),
                   nd = l2_norm(field, s.diffeo), nt = l2_norm(field, s.tt);
      CHECK(nc > 0.1);
      CHECK(nd > 0.1);
      CHECK(nt > 0.1);
      CHECK(std::fabs(l2_pairing(field, s.conformal, s.diffeo)) < 1e-8 * nc * nd);
      CHECK(std::fabs(l2_pairing(field, s.conformal, s.tt)) < 1e-8 * nc * nt);
      CHECK(std::fabs(l2_pairing(field, s.diffeo, s.tt)) < 1e-8 * nd * nt);
      CHECK(max_abs(s.conformal + s.diffeo + s.tt - d) < 1e-10);
      const JetField jf(field);
      for (const Vec& v : l_op(jf, s.tt.h, s.tt.x)) CHECK(v.max_abs() < 1e-10);
      for (const Mat& h : s.tt.h) CHECK(std::fabs(trace(h)) < 1e-12);
    }
    SUBCASE("conformal deformation") {
      Deformation d = zero_deformation(grid.size());
      const ScalarField f = unit_mode(grid, 2);
      for (std::size_t i = 0; i < grid.size(); ++i)
        d.h[i] = (f[i] + 0.5) * identity_mat();
      const Split s = split_deformation(field, d);
      CHECK(max_abs(s.conformal - d) < 1e-12);
      CHECK(max_abs(s.diffeo) < 1e-12);
      CHECK(max_abs(s.tt) < 1e-12);
    }
    SUBCASE("diffeomorphism direction") {
      const Split s = split_deformation(field, minus_lie(field));
      CHECK(l2_norm(field, s.tt) < 1e-8 * l2_norm(field, s.diffeo));
    }
  }
}

TEST_CASE("constant deformations split into trace and TT parts") {
  const Grid grid({2}, {8}, {1.0});
  Rng rng(12);
  const Deformation d = random_deformation(grid, rng, 1.0, 0);
  const Split s = split_deformation(flat(grid), d);
  CHECK(max_abs(s.diffeo) == 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK((s.conformal.h[i] - (trace(d.h[i]) / 7) * identity_mat()).max_abs() <
          1e-14);
}

TEST_CASE("flat-model operations reject nonconstant carriers") {
  const G2Field field = make_field({2}, {8}, {1.0}, 0.05, 3);
  Rng rng(1);
  const Deformation d = random_deformation(field.grid(), rng, 0.1);
  CHECK_THROWS_AS(split_deformation(field, d), NonFlatCarrier);
  CHECK_THROWS_AS(second_variation_fd(field, d, d), NonFlatCarrier);
  CHECK_THROWS_AS(k_pairing(field, d, d), NonFlatCarrier);
  CHECK_THROWS_AS(linearize_quantity(field, d, Quantity::vt), NonFlatCarrier);
}

TEST_CASE("second variation at a flat structure") {
  const Grid grid({2}, {32}, {1.0}, DiffScheme::spectral);
  const G2Field field = flat(grid);
  Rng rng(11);

  SUBCASE("random pairs") {
    for (int trial = 0; trial < 2; ++trial) {
      const Deformation a = random_deformation(grid, rng, 0.3);
      const Deformation b = random_deformation(grid, rng, 0.3);
      const SecondVariationCheck r = second_variation_fd(field, a, b);
      INFO("fd " << r.fd_hessian << " pairing " << r.k_pairing);
      CHECK(r.rel_err < 1e-4);
      CHECK(relative_error(r.k_pairing, k_pairing(field, b, a)) < 1e-8);
    }
  }
  SUBCASE("conformal mode") {
    const int k = 2;
    const ScalarField f = unit_mode(grid, k);
    Deformation d = zero_deformation(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) d.h[i] = f[i] * identity_mat();
    const double xi2 = std::pow(kTwoPi * k, 2);
    const SecondVariationCheck r = second_variation_fd(field, d, d);
    CHECK(r.k_pairing == doctest::Approx(6 * xi2).epsilon(1e-10));
    CHECK(r.fd_hessian == doctest::Approx(6 * xi2).epsilon(1e-6));
  }
  SUBCASE("TT mode") {
    const int k = 1;
    const ScalarField f = unit_mode(grid, k);
    Deformation d = zero_deformation(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      d.h[i](0, 1) = d.h[i](1, 0) = f[i];
      d.h[i](3, 3) = f[i];
      d.h[i](4, 4) = -f[i];
    }
    const double xi2 = std::pow(kTwoPi * k, 2);
    const SecondVariationCheck r = second_variation_fd(field, d, d);
    CHECK(r.k_pairing == doctest::Approx(-xi2 * l2_pairing(field, d, d))
                             .epsilon(1e-10));
    CHECK(r.fd_hessian < 0);
    CHECK(r.rel_err < 1e-6);
  }
}

TEST_CASE("Hessian form is nonpositive on TT modes and nonnegative on conformal modes") {
  const Grid grid({1, 5}, {8, 8}, {1.0, 1.0}, DiffScheme::spectral);
  const G2Field field = flat(grid);
  Rng rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    const Split s =
        split_deformation(field, random_deformation(grid, rng, 1.0, 1));
    CHECK(k_pairing(field, s.tt, s.tt) <= 1e-10);
    CHECK(k_pairing(field, s.conformal, s.conformal) >= -1e-10);
  }
  // constants: equality
  Deformation c = zero_deformation(grid.size());
  for (auto& h : c.h) h = identity_mat();
  CHECK(std::fabs(k_pairing(field, c, c)) < 1e-10);
}

TEST_CASE("conformal energy") {
  const Grid grid({2}, {48}, {kTwoPi}, DiffScheme::spectral);
  const G2Field field = flat(grid);
  CHECK(conformal_energy(field, ScalarField(grid.size(), 1.0)) == 0.0);
  ScalarField v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    v[i] = 1 + 0.1 * std::cos(grid.coordinate(i, 0));
  const ConformalCrossCheck c = conformal_cross_check(field, v);
  CHECK(c.energy > 0);
  // (12/25) int |v'|^2 = (12/25) 0.01 pi
  CHECK(c.energy ==
        doctest::Approx(0.48 * 0.01 * std::numbers::pi).epsilon(1e-12));
  CHECK(std::fabs(c.direct - c.energy) < 1e-10);
  CHECK(std::fabs(c.torsion_change - c.energy) < 1e-12);

  // the same three pathways on a field with torsion
  const G2Field twisted =
      make_field({2}, {48}, {kTwoPi}, 0.05, 7, DiffScheme::spectral);
  const ConformalCrossCheck t = conformal_cross_check(twisted, v);
  CHECK(std::fabs(t.direct - t.energy) < 1e-8);
  CHECK(std::fabs(t.torsion_change - t.energy) < 1e-8);

  v[3] = 0.0;
  CHECK_THROWS_AS(conformal_energy(field, v), NonPositiveConformalFactor);
}

TEST_CASE("linearized curvature and torsion quantities at a flat structure") {
  const Grid grid({2}, {32}, {kTwoPi}, DiffScheme::spectral);
  Rng rng(3);
  const Deformation d = random_deformation(grid, rng, 0.2);
  for (Quantity q : kAllQuantities) {
    const LinearizationCheck c = linearize_quantity(flat(grid), d, q);
    INFO(to_string(q) << " err " << c.max_err << " scale " << c.scale);
    CHECK(c.max_err < 1e-5);
    CHECK(c.scale > 0.1);
  }
}

TEST_CASE("static and torsion-free TT modes coincide") {
  const StaticModeSweep s = static_mode_sweep(2, 1);
  CHECK(s.modes == 125);
  CHECK(s.mismatches == 0);
  CHECK(s.curl_identity < 1e-12);
}
