#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "g2forge/jet.hpp"
#include "g2forge/random.hpp"

using namespace g2forge;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

G2Field random_field(int n, std::uint64_t seed = 7, double amp = 0.05) {
  return make_field({0, 1}, {n, n}, {kTwoPi, kTwoPi}, amp, seed);
}

struct Residuals {
  double bianchi = 0, nabla_phi = 0, nabla_psi = 0, riemann_sym = 0;
  double scal = 0, ric = 0, f = 0, div_tt = 0, nabla_t_psi = 0;
};

// nabla phi - T _| psi and the nabla psi identity, frame components.
void torsion_consistency(const JetField& jf, std::size_t i, Residuals& r) {
  const FrameJet j = jf.frame_jet(i);
  const Form4 nphi = jf.frame_covariant_derivative(jf.field().phi(), i);
  for (int p = 0; p < kDim; ++p) {
    const Vec row = [&] {
      Vec v;
      for (int l = 0; l < kDim; ++l) v(l) = j.t(p, l);
      return v;
    }();
    const Form3 expect = contract_psi(row, j.psi);
    for (int n = 0; n < 343; ++n)
      r.nabla_phi = std::fmax(r.nabla_phi,
                              std::fabs(nphi[p * 343 + n] - expect[n]));
  }
}

double riemann_symmetry_defect(const FrameJet& j) {
  double d = 0.0;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c)
        for (int e = 0; e < kDim; ++e) {
          const double r = j.rm(a, b, c, e);
          d = std::fmax(d, std::fabs(r + j.rm(b, a, c, e)));
          d = std::fmax(d, std::fabs(r + j.rm(a, b, e, c)));
          d = std::fmax(d, std::fabs(r - j.rm(c, e, a, b)));
          d = std::fmax(d, std::fabs(r + j.rm(b, c, a, e) + j.rm(c, a, b, e)));
        }
  return d;
}

Residuals residuals(const G2Field& field) {
  const JetField jf(field);
  Residuals r;
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const G2Jet cj = jf.jet(i);
    const FrameJet j = to_frame(cj);
    r.bianchi = std::fmax(r.bianchi, g2_bianchi_residual(cj));
    r.riemann_sym = std::fmax(r.riemann_sym, riemann_symmetry_defect(j));
    const auto c = curvature_from_torsion(j);
    r.scal = std::fmax(r.scal, c.scal_residual);
    r.ric = std::fmax(r.ric, c.ric_residual);
    r.f = std::fmax(r.f, c.f_residual);
    r.div_tt = std::fmax(r.div_tt, c.div_tt_residual);
    r.nabla_t_psi = std::fmax(r.nabla_t_psi, c.nabla_t_psi_residual);
    if (i % 7 == 0) torsion_consistency(jf, i, r);
  }
  return r;
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace

TEST_CASE("constant fields have vanishing torsion and curvature") {
  const Grid grid({0, 3}, {8, 8}, {1.0, 2.0});
  for (double lambda : {1.0, 2.0}) {
    const G2Field f = constant_field(grid, standard_phi() * std::pow(lambda, 3));
    const JetField jf(f);
    for (std::size_t i = 0; i < jf.size(); i += 5) {
      const G2Jet j = jf.jet(i);
      CHECK(j.t.max_abs() == 0.0);
      CHECK(j.nabla_t.max_abs() == 0.0);
      CHECK(j.rm.max_abs() == 0.0);
      CHECK(g2_bianchi_residual(j) == 0.0);
    }
  }
}

TEST_CASE("make_field is deterministic and stays in the positive cone") {
  const G2Field a = make_field({0}, {64}, {kTwoPi}, 0.05, 7);
  const G2Field b = make_field({0}, {64}, {kTwoPi}, 0.05, 7);
  CHECK(a.phi() == b.phi());
  const JetField jf(a);
  double tmax = 0.0;
  for (std::size_t i = 0; i < jf.size(); ++i)
    tmax = std::fmax(tmax, jf.torsion(i).max_abs());
  CHECK(tmax > 0.0);
  const G2Field zero = make_field({0}, {64}, {kTwoPi}, 0.0, 7);
  CHECK(zero.is_constant());
  CHECK(JetField(zero).torsion(11).max_abs() == 0.0);
  CHECK_THROWS_AS(make_field({0}, {16}, {kTwoPi}, 40.0, 7), NotAG2Structure);
}

TEST_CASE("G2F1 container round trip") {
  const G2Field a = random_field(16, 3);
  const auto path = std::filesystem::temp_directory_path() / "g2forge_rt.g2f";
  write_field(a, path);
  const G2Field b = read_field(path);
  CHECK(b.grid() == a.grid());
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    err = std::fmax(err, (a.phi(i) - b.phi(i)).max_abs());
  CHECK(err == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("grid derivative stencils") {
  for (auto scheme : {DiffScheme::fd4, DiffScheme::spectral}) {
    const Grid g({2}, {32}, {3.0}, scheme);
    ScalarField f(g.size()), df(g.size());
    const double k = 2 * std::numbers::pi * 3 / 3.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      f[i] = std::sin(k * g.coordinate(i, 0));
      df[i] = k * std::cos(k * g.coordinate(i, 0));
    }
    const auto d = derivative(g, f, 0);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      err = std::fmax(err, std::fabs(d[i] - g.symbol(0, 3) / k * df[i]));
    CHECK(err < 1e-12);
    if (scheme == DiffScheme::spectral) CHECK(g.symbol(0, 3) == doctest::Approx(k));
  }
}

TEST_CASE("synthetic nearly-G2 jet satisfies the G2-Bianchi identity") {
  for (double c : {1.0, 0.3}) {
    const G2Jet j = synthetic_nearly_g2_jet(c);
    CHECK(g2_bianchi_residual(j) < 1e-12);
    const auto cc = curvature_from_torsion(to_frame(j));
    CHECK(cc.scal == doctest::Approx(42 * c * c).epsilon(1e-13));
    CHECK(cc.scal_from_torsion == doctest::Approx(42 * c * c).epsilon(1e-13));
    CHECK((cc.ric - identity_mat() * (6 * c * c)).max_abs() < 1e-12);
    CHECK(cc.ric_residual < 1e-12);
    CHECK(cc.f_residual < 1e-12);
    CHECK(cc.div_tt_residual < 1e-12);
    CHECK(cc.nabla_t_psi_residual < 1e-12);
  }
}

TEST_CASE("differential identities converge under refinement") {
  const Residuals r16 = residuals(random_field(16));
  const Residuals r32 = residuals(random_field(32));
  const Residuals r64 = residuals(random_field(64));
  auto check = [](const char* name, double a, double b, double c) {
    INFO(name << ": " << a << " " << b << " " << c);
    CHECK(order(a, b) > 1.9);
    CHECK(order(b, c) > 1.9);
  };
  check("G2-Bianchi", r16.bianchi, r32.bianchi, r64.bianchi);
  check("nabla phi = T psi", r16.nabla_phi, r32.nabla_phi, r64.nabla_phi);
  check("Riemann symmetries", r16.riemann_sym, r32.riemann_sym,
        r64.riemann_sym);
  check("Scal", r16.scal, r32.scal, r64.scal);
  check("Ric", r16.ric, r32.ric, r64.ric);
  check("F", r16.f, r32.f, r64.f);
  check("div T^t", r16.div_tt, r32.div_tt, r64.div_tt);
  check("<nabla T, psi>", r16.nabla_t_psi, r32.nabla_t_psi, r64.nabla_t_psi);
}

TEST_CASE("nabla psi identity and Lie derivative decomposition converge") {
  double prev_psi = 0.0, prev_lie = 0.0;
  for (int n : {16, 32, 64}) {
    const JetField jf(random_field(n, 11));
    TensorField<4> psi(jf.size());
    for (std::size_t i = 0; i < jf.size(); ++i) psi[i] = jf.psi(i);
    double rpsi = 0.0;
    for (std::size_t i = 0; i < jf.size(); i += 3) {
      const FrameJet j = jf.frame_jet(i);
      const auto dpsi = point_gradient(jf.grid(), psi, i);
      const Form3& gm = jf.gamma(i);
      // assemble nabla_d psi in the frame
      std::array<Form4, kDim> nabla_f{};
      for (int p = 0; p < kDim; ++p) {
        Form4 np = dpsi[p];
        for (std::size_t n4 = 0; n4 < 2401; ++n4) {
          std::size_t stride = 1;
          for (int slot = 3; slot >= 0; --slot) {
            const int is = static_cast<int>((n4 / stride) % kDim);
            const std::size_t base = n4 - is * stride;
            for (int m = 0; m < kDim; ++m)
              np[n4] -= gm(m, p, is) * psi[i][base + m * stride];
            stride *= kDim;
          }
        }
        const Form4 npf = jf.frame(i).to_frame(np);
        for (int d = 0; d < kDim; ++d)
          nabla_f[d].add_scaled(jf.frame(i).e()(p, d), npf);
      }
      for (int p = 0; p < kDim; ++p)
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b)
            for (int c = 0; c < kDim; ++c)
              for (int l = 0; l < kDim; ++l) {
                const double expect = -j.t(p, a) * j.phi(b, c, l) +
                                      j.t(p, b) * j.phi(a, c, l) -
                                      j.t(p, c) * j.phi(a, b, l) +
                                      j.t(p, l) * j.phi(a, b, c);
                rpsi = std::fmax(
                    rpsi, std::fabs(nabla_f[p](a, b, c, l) - expect));
              }
    }
    TensorField<1> v(jf.size());
    for (std::size_t i = 0; i < jf.size(); ++i) {
      const double x = jf.grid().coordinate(i, 0);
      const double y = jf.grid().coordinate(i, 1);
      for (int a = 0; a < kDim; ++a)
        v[i](a) = std::sin(x + a) * std::cos(2 * y - a) + 0.1 * a;
    }
    const double rlie = lie_derivative_residual(jf, v);
    if (n > 16) {
      INFO("n=" << n << " psi " << prev_psi << " -> " << rpsi << ", Lie "
                << prev_lie << " -> " << rlie);
      CHECK(order(prev_psi, rpsi) > 1.9);
      CHECK(order(prev_lie, rlie) > 1.9);
    }
    prev_psi = rpsi;
    prev_lie = rlie;
  }
}
