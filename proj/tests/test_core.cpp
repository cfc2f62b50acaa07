#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "g2forge/core.hpp"
#include "g2forge/identities.hpp"
#include "g2forge/random.hpp"

using namespace g2forge;

namespace {

using M7 = Eigen::Matrix<double, 7, 7, Eigen::RowMajor>;

M7 eig(const Mat& a) { return Eigen::Map<const M7>(a.data()); }

// B-form by summing over all 5040 permutations of the coordinate indices.
M7 brute_force_b(const Form3& phi) {
  std::array<int, 7> p;
  std::iota(p.begin(), p.end(), 0);
  M7 b = M7::Zero();
  do {
    int sign = 1;
    for (int i = 0; i < 7; ++i)
      for (int j = i + 1; j < 7; ++j)
        if (p[i] > p[j]) sign = -sign;
    const double tail = sign * phi(p[4], p[5], p[6]);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j)
        b(i, j) += tail * phi(i, p[0], p[1]) * phi(j, p[2], p[3]);
  } while (std::next_permutation(p.begin(), p.end()));
  return b / 24.0;
}

struct Structure {
  Form3 phi;
  Form4 psi;
  MetricData m;
};

Structure transported(Rng& rng) {
  Structure s;
  const Mat a = random_gl7(rng, 0.3);
  s.phi = transport(a, standard_phi());
  s.m = metric_from_phi(s.phi);
  s.psi = hodge_dual(s.phi, s.m);
  return s;
}

Structure standard() {
  Structure s;
  s.phi = standard_phi();
  s.m = metric_from_phi(s.phi);
  s.psi = hodge_dual(s.phi, s.m);
  return s;
}

double identity_error(const Structure& s) {
  return max_residual(contraction_identities(s.phi, s.psi, s.m));
}

}  // namespace

TEST_CASE("standard form has seven signed triples and unit metric") {
  const Form3 phi = standard_phi();
  CHECK(phi(0, 1, 2) == 1.0);
  CHECK(phi(1, 0, 2) == -1.0);
  CHECK(is_antisymmetric(phi, 0.0));
  int nonzero = 0;
  for (double c : independent_components(phi)) nonzero += c != 0.0;
  CHECK(nonzero == 7);
  CHECK(dot(phi, phi) == doctest::Approx(42.0).epsilon(1e-15));

  const MetricData m = metric_from_phi(phi);
  CHECK((eig(m.g) - M7::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(m.vol_density == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.orientation == -1);
  CHECK((brute_force_b(phi) - 6.0 * M7::Identity()).cwiseAbs().maxCoeff() <
        1e-13);
}

TEST_CASE("B-form partition sum matches the permutation sum") {
  Rng rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const Form3 phi = transport(random_gl7(rng, 0.3), standard_phi());
    const MetricData m = metric_from_phi(phi);
    const M7 b = brute_force_b(phi);
    const M7 expect = -6.0 * m.orientation * m.vol_density * eig(m.g);
    CHECK((b - expect).cwiseAbs().maxCoeff() < 1e-11 * b.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("scaled standard form gives scaled metric") {
  const Form3 phi = 8.0 * standard_phi();
  const MetricData m = metric_from_phi(phi);
  CHECK((eig(m.g) - 4.0 * M7::Identity()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(m.vol_density == doctest::Approx(128.0).epsilon(1e-13));
}

TEST_CASE("metric is GL(7)-equivariant") {
  Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Mat a = random_gl7(rng, 0.3);
    const MetricData m = metric_from_phi(transport(a, standard_phi()));
    const M7 ai = eig(a).inverse();
    const M7 expect = ai.transpose() * ai;
    worst = std::max(worst, (eig(m.g) - expect).cwiseAbs().maxCoeff() /
                                expect.cwiseAbs().maxCoeff());
    CHECK(m.vol_density ==
          doctest::Approx(std::sqrt(expect.determinant())).epsilon(1e-12));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("non-positive forms are rejected") {
  Form3 zero;
  CHECK_THROWS_AS(metric_from_phi(zero), NotAG2Structure);
  // e123 + e145 + e167 alone is degenerate.
  Form3 phi = standard_phi();
  std::array<double, 35> c = independent_components(phi);
  for (int n = 0; n < 35; ++n) {
    const auto& t = form3_basis()[n];
    if (t[0] != 0) c[n] = 0.0;
  }
  CHECK_THROWS_AS(metric_from_phi(form3_from_components(c)), NotAG2Structure);
  // -phi_0 has an indefinite or negative induced bilinear form up to the
  // orientation flip, so it is still a G2-structure; the split-signature
  // form e123 - e145 - e167 - e246 + ... is not.
  std::array<double, 35> split = independent_components(standard_phi());
  for (int n = 0; n < 35; ++n) {
    const auto& t = form3_basis()[n];
    if (t[0] != 0 || t[1] != 1) split[n] = -split[n];
  }
  CHECK_THROWS_AS(metric_from_phi(form3_from_components(split)),
                  NotAG2Structure);
}

TEST_CASE("contraction identities at the standard form are exact") {
  const Structure s = standard();
  const ContractionIdentities c = contraction_identities(s.phi, s.psi, s.m);
  CHECK(c.phi_phi_0 == doctest::Approx(42.0).epsilon(1e-15));
  CHECK(c.psi_psi_0 == doctest::Approx(168.0).epsilon(1e-15));
  CHECK(max_residual(c) < 1e-12);
}

TEST_CASE("contraction identities detect a wrong dual") {
  const Structure s = standard();
  CHECK(contraction_identities(s.phi, -1.0 * s.psi, s.m).phi_phi_2 > 0.5);
  CHECK(contraction_identities(s.phi, s.psi, identity_metric(-1)).phi_psi_3 == 0.0);
  MetricData stretched = s.m;
  stretched.g(0, 0) = 2.0;
  stretched.g_inv(0, 0) = 0.5;
  CHECK(max_residual(contraction_identities(s.phi, s.psi, stretched)) > 0.1);
}

TEST_CASE("contraction identities hold for transported structures") {
  Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial)
    worst = std::max(worst, identity_error(transported(rng)));
  CHECK(worst < 1e-9);
}

TEST_CASE("hodge dual is an involution and phi wedge psi is seven volumes") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Structure s = transported(rng);
    CHECK((hodge_dual(s.psi, s.m) - s.phi).max_abs() < 1e-12);
    // (phi ^ psi)_{0..6} = sum over (triple, complementary quad).
    double wedge = 0.0;
    for (const auto& t : form3_basis()) {
      std::array<int, 7> full{};
      int r = 3;
      full[0] = t[0];
      full[1] = t[1];
      full[2] = t[2];
      for (int i = 0; i < 7; ++i)
        if (i != t[0] && i != t[1] && i != t[2]) full[r++] = i;
      int sign = 1;
      for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j)
          if (full[i] > full[j]) sign = -sign;
      wedge += sign * s.phi(t[0], t[1], t[2]) *
               s.psi(full[3], full[4], full[5], full[6]);
    }
    CHECK(wedge / 7.0 ==
          doctest::Approx(s.m.orientation * s.m.vol_density).epsilon(1e-12));
  }
}

TEST_CASE("diamond of a conformal tensor scales phi") {
  Rng rng(2);
  const Structure s = transported(rng);
  const Form3 out = diamond(2.5 * s.m.g, s.phi, s.m);
  CHECK((out - 7.5 * s.phi).max_abs() < 1e-12);
  CHECK(diamond(Mat{}, s.phi, s.m).max_abs() == 0.0);
  CHECK(is_antisymmetric(diamond(random_sym(rng), s.phi, s.m), 1e-13));
}

TEST_CASE("3-form inner product splits into type components") {
  Rng rng(17);
  const Structure s = standard();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    HX a{random_sym(rng), random_vec(rng)};
    HX b{random_sym(rng), random_vec(rng)};
    const Form3 wa = diamond(a.h, s.phi) + contract_psi(a.x, s.psi);
    const Form3 wb = diamond(b.h, s.phi) + contract_psi(b.x, s.psi);
    const double lhs = dot(wa, wb);
    const double rhs = form3_inner_from_parts(a, b);
    worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs)));
  }
  CHECK(worst < 1e-12);
  Vec x = random_vec(rng);
  CHECK(dot(contract_psi(x, s.psi), contract_psi(x, s.psi)) ==
        doctest::Approx(24.0 * dot(x, x)).epsilon(1e-13));
}

TEST_CASE("X is recovered by contracting X into psi against psi") {
  Rng rng(21);
  const Structure s = standard();
  const Vec x = random_vec(rng);
  const Form3 eta = contract_psi(x, s.psi);
  Vec rec;
  for (int m = 0; m < 7; ++m)
    for (std::size_t n = 0; n < 343; ++n)
      rec(m) += eta[n] * s.psi[m * 343 + n] / 24.0;
  CHECK((rec - x).max_abs() < 1e-13);
}

TEST_CASE("3-form decomposition inverts diamond plus contraction") {
  Rng rng(23);
  const Structure s0 = standard();
  const HX from_phi = decompose_3form(s0.phi, s0.phi, s0.psi, s0.m);
  CHECK((from_phi.h - (1.0 / 3.0) * identity_mat()).max_abs() < 1e-13);
  CHECK(from_phi.x.max_abs() < 1e-13);

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Structure s = trial % 2 ? transported(rng) : s0;
    const HX in{random_sym(rng), random_vec(rng)};
    const Form3 w = diamond(in.h, s.phi, s.m) + contract_psi(in.x, s.psi, s.m);
    const HX out = decompose_3form(w, s.phi, s.psi, s.m);
    worst = std::max({worst, (out.h - in.h).max_abs(), (out.x - in.x).max_abs()});
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("2-form projections have ranks 7 and 14") {
  Rng rng(29);
  const Structure s = transported(rng);
  // Assemble both projectors on the 21-dimensional space of 2-forms.
  Eigen::Matrix<double, 21, 21> p7, p14;
  int col = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) {
      Mat a;
      a(i, j) = 1.0;
      a(j, i) = -1.0;
      const TwoFormSplit sp = proj_2form(a, s.psi, s.m);
      int row = 0;
      for (int k = 0; k < 7; ++k)
        for (int l = k + 1; l < 7; ++l) {
          p7(row, col) = sp.alpha7(k, l);
          p14(row, col) = sp.alpha14(k, l);
          ++row;
        }
      ++col;
    }
  Eigen::JacobiSVD<Eigen::Matrix<double, 21, 21>> s7(p7), s14(p14);
  auto rank = [](const auto& svd) {
    const auto& sv = svd.singularValues();
    return static_cast<int>((sv.array() > 1e-8 * sv(0)).count());
  };
  CHECK(rank(s7) == 7);
  CHECK(rank(s14) == 14);
  using M21 = Eigen::Matrix<double, 21, 21>;
  CHECK((p7 * p7 - p7).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((p14 * p14 - p14).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((p7 * p14).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((p7 + p14 - M21::Identity()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("2-forms of type 7 and 14") {
  Rng rng(31);
  const Structure s = standard();
  const Vec x = random_vec(rng);
  const Mat a = interior(x, s.phi);
  const TwoFormSplit sp = proj_2form(a, s.psi);
  CHECK(sp.alpha14.max_abs() < 1e-13);
  CHECK((interior((1.0 / 6.0) * v_op(a, s.phi), s.phi) - a).max_abs() < 1e-13);
  CHECK((v_op(a, s.phi) - 6.0 * x).max_abs() < 1e-13);

  // Killing the V-part leaves a pure type-14 form.
  const Mat b = random_antisym(rng);
  const Mat b14 = b - interior((1.0 / 6.0) * v_op(b, s.phi), s.phi);
  CHECK(v_op(b14, s.phi).max_abs() < 1e-13);
  CHECK(proj_2form(b14, s.psi).alpha7.max_abs() < 1e-13);
  CHECK((p_op(b14, s.psi) - 2.0 * b14).max_abs() < 1e-13);
}

TEST_CASE("P is self-adjoint and V kills symmetric tensors") {
  Rng rng(37);
  const Structure s = transported(rng);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Mat a = random_mat(rng), b = random_mat(rng);
    const double lhs = inner(p_op(a, s.psi, s.m), b, s.m);
    const double rhs = inner(a, p_op(b, s.psi, s.m), s.m);
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  CHECK(worst < 1e-10);
  CHECK(v_op(s.m.g, s.phi, s.m).max_abs() < 1e-13);
}

TEST_CASE("torsion identities id1 and id2 hold for arbitrary 2-tensors") {
  Rng rng(41);
  const Structure s = standard();
  double worst1 = 0.0, worst2 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Mat t = random_mat(rng);
    const Mat pt = p_op(t, s.psi);
    const Vec vt = v_op(t, s.phi);
    const Mat lhs = compose(t, t) - compose(t, transpose(t)) - compose(t, pt);
    const Mat rhs = compose(t, interior(vt, s.phi));
    worst1 = std::max(worst1, (lhs - rhs).max_abs());
    const double l2 =
        dot(t, t) - dot(t, transpose(t)) - dot(t, pt);
    worst2 = std::max(worst2, std::fabs(l2 - dot(vt, vt)));
    CHECK(dot(vt, vt) ==
          doctest::Approx(-trace(compose(t, interior(vt, s.phi)))).epsilon(1e-12));
  }
  CHECK(worst1 < 1e-10);
  CHECK(worst2 < 1e-10);
}

TEST_CASE("symmetry tags are validated by enumeration") {
  Rng rng(43);
  const Mat h = random_sym(rng);
  CHECK(matches_symmetry_tag(h, 0.0));
  Mat bad = h;
  bad(0, 1) += 1.0;
  CHECK_FALSE(matches_symmetry_tag(bad, 1e-12));
  CHECK(matches_symmetry_tag(standard_phi(), 0.0));
  CHECK(matches_symmetry_tag(hodge_dual(standard_phi(), -1), 0.0));
}
