#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "g2forge/operators.hpp"
#include "g2forge/parallel.hpp"
#include "g2forge/random.hpp"

using namespace g2forge;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Sum of Kulkarni-Nomizu products of random symmetric pairs: has every
// algebraic symmetry of a curvature tensor.
Tensor<4> random_curvature(Rng& rng) {
  Tensor<4> r;
  for (int n = 0; n < 3; ++n) {
    const Mat a = random_sym(rng), b = random_sym(rng);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k)
          for (int l = 0; l < kDim; ++l)
            r(i, j, k, l) += a(i, l) * b(j, k) + a(j, k) * b(i, l) -
                             a(i, k) * b(j, l) - a(j, l) * b(i, k);
  }
  return r;
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

Vec unit(int k) {
  Vec e;
  e(k) = 1.0;
  return e;
}

struct FieldResiduals {
  BianchiResiduals bianchi;
  double hilbert_alt = 0, hat = 0, tilde = 0, p1 = 0, p1_alt = 0, l_star = 0;
};

FieldResiduals field_residuals(int n) {
  const JetField jf(make_field({0, 1}, {n, n}, {kTwoPi, kTwoPi}, 0.05, 5));
  std::vector<FrameJet> jets(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) { jets[i] = jf.frame_jet(i); });
  FieldResiduals r;
  r.bianchi = bianchi_residuals(jf, jets);
  for (const auto& j : jets) {
    r.hilbert_alt = std::fmax(r.hilbert_alt, densities(j).hilbert_alt_residual);
    const TraceRelations t = trace_relations(j);
    r.hat = std::fmax(r.hat, t.hat_p1);
    r.tilde = std::fmax(r.tilde, t.tilde_p1);
    r.p1 = std::fmax(r.p1, t.p1);
    r.p1_alt = std::fmax(r.p1_alt, t.p1_alt);
  }
  // L*(Y) against minus the parts of the finite-difference L_Y phi
  TensorField<1> y(jf.size());
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const double a = jf.grid().coordinate(i, 0);
    const double b = jf.grid().coordinate(i, 1);
    for (int k = 0; k < kDim; ++k)
      y[i](k) = std::cos(a - k) * std::sin(b + 2 * k) + 0.2 * std::sin(2 * a);
  }
  const TensorField<3> lie = lie_derivative_fd(jf, y);
  const DeformationField ls = l_star(jf, y);
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const Frame& f = jf.frame(i);
    const Form3 phi = f.to_frame(jf.field().phi(i));
    const Form4 psi = hodge_dual(phi, jf.metric(i).orientation);
    const Form3 w = diamond(f.to_frame(ls.h[i]), phi) +
                    contract_psi(f.to_frame(ls.x[i]), psi);
    r.l_star = std::fmax(r.l_star, (w + f.to_frame(lie[i])).max_abs());
  }
  return r;
}

}  // namespace

TEST_CASE("nearly-G2 synthetic jet is a critical point") {
  for (double c : {1.0, 0.3}) {
    const FrameJet j = to_frame(synthetic_nearly_g2_jet(c));
    const double c2 = c * c;
    const DensityVector d = densities(j);
    CHECK(d.scal == doctest::Approx(42 * c2).epsilon(1e-13));
    CHECK(d.hilbert == doctest::Approx(-3.5 * c2).epsilon(1e-13));
    CHECK(d.hilbert_alt_residual < 1e-12);
    CHECK(d.t2 - d.ttt - d.tpt - d.vt2 == doctest::Approx(0.0).epsilon(1e-12));
    const Mat g = identity_mat();
    CHECK((p1(j) + 2.5 * c2 * g).max_abs() < 1e-12);
    CHECK(p2(j).max_abs() < 1e-12);
    CHECK((hat_p1(j) - c2 * g).max_abs() < 1e-12);
    CHECK(trace(hat_p1(j)) == doctest::Approx(-2 * d.hilbert).epsilon(1e-13));
    CHECK((tilde_p1(j) - (10.0 / 3) * c2 * g).max_abs() < 1e-12);
    const TraceRelations t = trace_relations(j);
    CHECK(t.hat_p1 < 1e-12);
    CHECK(t.tilde_p1 < 1e-12);
    CHECK(t.p1 < 1e-12);
    CHECK(t.p1_alt < 1e-12);
    CHECK(t.p1_from_tilde < 1e-12);
    CHECK((flow_rhs(j, FlowVariant::hat) - 3 * c2 * j.phi).max_abs() < 1e-12);
    CHECK((flow_rhs(j, FlowVariant::tilde) - 10 * c2 * j.phi).max_abs() <
          1e-12);
    // every first-variation gradient is algebraic here; Hilbert's is P
    const GradientPair q = gradient(j, FunctionalId::hilbert);
    CHECK((q.q1 - p1(j)).max_abs() == 0.0);
  }
}

TEST_CASE("gradients of the basic functionals combine to the Hilbert gradient") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    FrameJet j = to_frame(synthetic_nearly_g2_jet(0.0));
    j.t = random_mat(rng);
    for (auto& x : j.nabla_t.components()) x = rng.normal();
    j.rm = random_curvature(rng);
    const auto q = [&](FunctionalId f) { return gradient(j, f); };
    const GradientPair s = q(FunctionalId::scal), a = q(FunctionalId::trt2),
                       b = q(FunctionalId::t2), h = q(FunctionalId::hilbert);
    const Mat q1 = s.q1 * (1.0 / 6) - b.q1 * (1.0 / 3) - a.q1 * (1.0 / 6);
    const Vec q2 = s.q2 * (1.0 / 6) - b.q2 * (1.0 / 3) - a.q2 * (1.0 / 6);
    CHECK((q1 - h.q1).max_abs() < 1e-12);
    CHECK((q2 - h.q2).max_abs() < 1e-12);
    for (FunctionalId f : kAllFunctionals)
      CHECK(is_symmetric(q(f).q1, 1e-12));
  }
}

TEST_CASE("Bianchi-type identities and trace relations converge") {
  const FieldResiduals r16 = field_residuals(16);
  const FieldResiduals r32 = field_residuals(32);
  const FieldResiduals r64 = field_residuals(64);
  auto check = [](const char* name, double a, double b, double c) {
    INFO(name << ": " << a << " " << b << " " << c);
    CHECK(order(a, b) > 1.9);
    CHECK(order(b, c) > 1.9);
  };
  check("L(P1,P2)", r16.bianchi.l_of_p, r32.bianchi.l_of_p, r64.bianchi.l_of_p);
  check("B~(P~1,P2)", r16.bianchi.tilde_b_of_tilde_p,
        r32.bianchi.tilde_b_of_tilde_p, r64.bianchi.tilde_b_of_tilde_p);
  check("two forms of the Hilbert density", r16.hilbert_alt, r32.hilbert_alt,
        r64.hilbert_alt);
  check("tr P^1", r16.hat, r32.hat, r64.hat);
  check("tr P~1", r16.tilde, r32.tilde, r64.tilde);
  check("tr P1", r16.p1, r32.p1, r64.p1);
  check("tr P1 (second form)", r16.p1_alt, r32.p1_alt, r64.p1_alt);
  check("L* = -L_Y phi", r16.l_star, r32.l_star, r64.l_star);
}

TEST_CASE("Bianchi-type operators vanish on constant data") {
  const Grid grid({2, 5}, {8, 8}, {1.0, 1.0});
  const JetField jf(constant_field(grid, standard_phi()));
  Rng rng(3);
  const TensorField<2> h(grid.size(), random_sym(rng));
  const TensorField<1> x(grid.size(), random_vec(rng));
  for (const auto& v : l_op(jf, h, x)) CHECK(v.max_abs() == 0.0);
  for (const auto& v : tilde_b(jf, h, x)) CHECK(v.max_abs() == 0.0);
  const BianchiResiduals r = bianchi_residuals(jf);
  CHECK(r.l_of_p == 0.0);
  CHECK(r.tilde_b_of_tilde_p == 0.0);
}

TEST_CASE("K is trace free") {
  Rng rng(23);
  const FrameJet base = to_frame(synthetic_nearly_g2_jet(0.7));
  for (int trial = 0; trial < 100; ++trial) {
    FrameJet j = base;
    j.t = random_mat(rng);
    const HX k = k_op(j, random_vec(rng), random_mat(rng));
    CHECK(std::fabs(trace(k.h)) < 1e-10);
  }
}

TEST_CASE("special Ricci-like symbol") {
  Rng rng(31);
  for (double a : {-1.0 / 3, 0.0, 1.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec xi = random_vec(rng);
      const Mat35 m = symbol_special_rl_matrix(a, xi);
      CHECK(kernel_dimension(m) == 7);
      // Lie-derivative directions lie in the kernel
      const Vec y = random_vec(rng);
      const HX lie{sym(outer(xi, y)),
                   -0.5 * v_op(outer(xi, y), standard_phi())};
      CHECK(pack(symbol_special_rl(a, xi, lie)).norm() < 1e-12 * dot(xi, xi) * 10);
      // identity action on ker B_xi
      Eigen::Matrix<double, 7, 35> b;
      for (int n = 0; n < 35; ++n) {
        const Vec col = symbol_b_xi(a, xi, unpack(Vec35::Unit(n)));
        for (int k = 0; k < kDim; ++k) b(k, n) = col(k);
      }
      Eigen::JacobiSVD<Eigen::Matrix<double, 7, 35>> svd(b, Eigen::ComputeFullV);
      const auto v = svd.matrixV();
      Vec35 in = Vec35::Zero();
      for (int n = 7; n < 35; ++n) in += rng.normal() * v.col(n);
      const Vec35 out = m * in;
      CHECK((out - dot(xi, xi) * in).norm() / (dot(xi, xi) * in.norm()) < 1e-9);
      // homogeneity
      const Mat35 m2 = symbol_special_rl_matrix(a, 2.0 * xi);
      CHECK((m2 * in - 4 * dot(xi, xi) * in).norm() <
            1e-9 * dot(xi, xi) * in.norm());
    }
  }
}

TEST_CASE("tilde B symbol is 3/2 B_xi at a = -1/3") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec xi = random_vec(rng);
    const HX d{random_sym(rng), random_vec(rng)};
    CHECK((symbol_tilde_b(xi, d) - 1.5 * symbol_b_xi(-1.0 / 3, xi, d))
              .max_abs() < 1e-12);
  }
}

TEST_CASE("special Ricci-like symbol matches the linearized field operator") {
  const int n = 16;
  const Grid grid({3}, {n}, {kTwoPi}, DiffScheme::spectral);
  const Form3 phi0 = standard_phi();
  const Form4 psi0 = hodge_dual(phi0, metric_from_phi(phi0));
  Rng rng(53);
  const int k = 2;
  const Mat hc = random_sym(rng);
  const Vec xc = random_vec(rng);
  for (double a : {-1.0 / 3, 0.0, 1.0}) {
    auto rhs = [&](double t) {
      TensorField<3> phi(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double c = std::cos(k * grid.coordinate(i, 0));
        phi[i] = phi0 + t * c * (diamond(hc, phi0) + contract_psi(xc, psi0));
      }
      const JetField jf(G2Field(grid, std::move(phi)));
      std::vector<HX> out(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = special_ricci_like(jf.frame_jet(i), a);
      return out;
    };
    const double eta = 1e-5;
    const auto plus = rhs(eta), minus = rhs(-eta);
    const HX sigma = symbol_special_rl(a, k * unit(3), HX{hc, xc});
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double c = std::cos(k * grid.coordinate(i, 0));
      const Mat dh = (plus[i].h - minus[i].h) * (1 / (2 * eta));
      const Vec dx = (plus[i].x - minus[i].x) * (1 / (2 * eta));
      // nabla nabla on cos(kx) is -k^2, so D P = -sigma cos
      err = std::fmax(err, (dh + c * sigma.h).max_abs());
      err = std::fmax(err, (dx + c * sigma.x).max_abs());
    }
    INFO("a = " << a);
    CHECK(err < 1e-6);
  }
}

TEST_CASE("symbols of L L* and L K") {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec xi = random_vec(rng);
    const double x2 = dot(xi, xi);
    Matrix7 expect_ll = -0.75 * x2 * Matrix7::Identity();
    Matrix7 expect_lk = expect_ll;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        expect_ll(i, j) -= 0.25 * xi(i) * xi(j);
        expect_lk(i, j) -= 3.0 / 28 * xi(i) * xi(j);
      }
    CHECK((symbol_llstar(xi) - expect_ll).norm() < 1e-12 * x2);
    CHECK((symbol_lk(xi) - expect_lk).norm() < 1e-12 * x2);
    Eigen::SelfAdjointEigenSolver<Matrix7> es(symbol_lk(xi));
    CHECK(es.eigenvalues()(0) == doctest::Approx(-6.0 / 7 * x2));
    for (int i = 1; i < kDim; ++i)
      CHECK(es.eigenvalues()(i) == doctest::Approx(-0.75 * x2));
  }
}

TEST_CASE("uniqueness system") {
  const UniquenessSolution s = uniqueness_system_solve();
  CHECK(s.a == Rational(-1, 3));
  CHECK(s.beta == Rational(1, 6));
  CHECK(s.nullspace.size() == 4);
  for (const Rational& r : s.spanning_residuals) CHECK(r == Rational(0));
}
