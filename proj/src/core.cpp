#include "g2forge/core.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "eigen_bridge.hpp"

namespace g2forge {

namespace {

int permutation_sign(const int* p, int n) {
  int s = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

struct FormTables {
  std::array<Triple, 35> triples{};
  std::array<Quad, 35> quads{};
  // For each flat index: independent slot (or -1) and permutation sign.
  std::array<int, 343> slot3{};
  std::array<int, 343> sign3{};
  std::array<int, 2401> slot4{};
  std::array<int, 2401> sign4{};
  // Complement of triple t is quad comp3[t] with sign of (t, quad).
  std::array<int, 35> comp3{};
  std::array<int, 35> comp3_sign{};
  // Complement of quad q is triple comp4[q] with sign of (quad, t).
  std::array<int, 35> comp4{};
  std::array<int, 35> comp4_sign{};

  FormTables() {
    int n = 0;
    for (int i = 0; i < 7; ++i)
      for (int j = i + 1; j < 7; ++j)
        for (int k = j + 1; k < 7; ++k) triples[n++] = {i, j, k};
    n = 0;
    for (int i = 0; i < 7; ++i)
      for (int j = i + 1; j < 7; ++j)
        for (int k = j + 1; k < 7; ++k)
          for (int l = k + 1; l < 7; ++l) quads[n++] = {i, j, k, l};
    slot3.fill(-1);
    sign3.fill(0);
    for (int t = 0; t < 35; ++t) {
      std::array<int, 3> p = triples[t];
      std::sort(p.begin(), p.end());
      do {
        const int flat = (p[0] * 7 + p[1]) * 7 + p[2];
        slot3[flat] = t;
        sign3[flat] = permutation_sign(p.data(), 3);
      } while (std::next_permutation(p.begin(), p.end()));
    }
    slot4.fill(-1);
    sign4.fill(0);
    for (int q = 0; q < 35; ++q) {
      std::array<int, 4> p = quads[q];
      do {
        const int flat = ((p[0] * 7 + p[1]) * 7 + p[2]) * 7 + p[3];
        slot4[flat] = q;
        sign4[flat] = permutation_sign(p.data(), 4);
      } while (std::next_permutation(p.begin(), p.end()));
    }
    for (int t = 0; t < 35; ++t) {
      std::array<int, 4> rest{};
      int r = 0;
      for (int i = 0; i < 7; ++i)
        if (i != triples[t][0] && i != triples[t][1] && i != triples[t][2])
          rest[r++] = i;
      const int q = slot4[((rest[0] * 7 + rest[1]) * 7 + rest[2]) * 7 + rest[3]];
      int full[7] = {triples[t][0], triples[t][1], triples[t][2],
                     rest[0],       rest[1],       rest[2],
                     rest[3]};
      comp3[t] = q;
      comp3_sign[t] = permutation_sign(full, 7);
      int full2[7] = {rest[0], rest[1], rest[2], rest[3],
                      triples[t][0], triples[t][1], triples[t][2]};
      comp4[q] = t;
      comp4_sign[q] = permutation_sign(full2, 7);
    }
  }
};

const FormTables& tables() {
  static const FormTables t;
  return t;
}

// Ordered partitions of {0..6} into increasing sets of sizes 2, 2, 3.
struct Partition {
  int a0, a1, b0, b1, c0, c1, c2;
  double sign;
};

const std::vector<Partition>& partitions() {
  static const std::vector<Partition> parts = [] {
    std::vector<Partition> out;
    for (int a0 = 0; a0 < 7; ++a0)
      for (int a1 = a0 + 1; a1 < 7; ++a1)
        for (int b0 = 0; b0 < 7; ++b0)
          for (int b1 = b0 + 1; b1 < 7; ++b1) {
            if (b0 == a0 || b0 == a1 || b1 == a0 || b1 == a1) continue;
            int c[3];
            int r = 0;
            for (int i = 0; i < 7; ++i)
              if (i != a0 && i != a1 && i != b0 && i != b1) c[r++] = i;
            int full[7] = {a0, a1, b0, b1, c[0], c[1], c[2]};
            out.push_back({a0, a1, b0, b1, c[0], c[1], c[2],
                           static_cast<double>(permutation_sign(full, 7))});
          }
    return out;
  }();
  return parts;
}

}  // namespace

const std::array<Triple, 35>& form3_basis() { return tables().triples; }
const std::array<Quad, 35>& form4_basis() { return tables().quads; }

std::array<double, 35> independent_components(const Form3& a) {
  std::array<double, 35> c{};
  const auto& t = tables().triples;
  for (int n = 0; n < 35; ++n) c[n] = a(t[n][0], t[n][1], t[n][2]);
  return c;
}

Form3 form3_from_components(const std::array<double, 35>& c) {
  const auto& tb = tables();
  Form3 out(Symmetry::antisymmetric);
  for (std::size_t n = 0; n < Form3::size; ++n)
    if (tb.slot3[n] >= 0) out[n] = tb.sign3[n] * c[tb.slot3[n]];
  return out;
}

Form4 form4_from_components(const std::array<double, 35>& c) {
  const auto& tb = tables();
  Form4 out(Symmetry::antisymmetric);
  for (std::size_t n = 0; n < Form4::size; ++n)
    if (tb.slot4[n] >= 0) out[n] = tb.sign4[n] * c[tb.slot4[n]];
  return out;
}

Form3 antisymmetrize(const Form3& a) {
  std::array<double, 35> c{};
  const auto& t = tables().triples;
  for (int n = 0; n < 35; ++n) {
    const int i = t[n][0], j = t[n][1], k = t[n][2];
    c[n] = (a(i, j, k) + a(j, k, i) + a(k, i, j) - a(j, i, k) - a(i, k, j) -
            a(k, j, i)) /
           6.0;
  }
  return form3_from_components(c);
}

Form3 standard_phi() {
  std::array<double, 35> c{};
  const auto& tb = tables();
  auto set = [&](int i, int j, int k, double v) {
    c[tb.slot3[((i - 1) * 7 + (j - 1)) * 7 + (k - 1)]] = v;
  };
  set(1, 2, 3, 1.0);
  set(1, 4, 5, 1.0);
  set(1, 6, 7, 1.0);
  set(2, 4, 6, 1.0);
  set(2, 5, 7, -1.0);
  set(3, 4, 7, -1.0);
  set(3, 5, 6, -1.0);
  return form3_from_components(c);
}

MetricData identity_metric(int orientation) {
  MetricData m;
  m.g = identity_mat();
  m.g_inv = identity_mat();
  m.vol_density = 1.0;
  m.orientation = orientation;
  return m;
}

MetricData metric_from_phi(const Form3& phi) {
  const auto& parts = partitions();
  Mat7 b;
  for (int i = 0; i < 7; ++i) {
    for (int j = i; j < 7; ++j) {
      double s = 0.0;
      for (const auto& p : parts)
        s += p.sign * phi(i, p.a0, p.a1) * phi(j, p.b0, p.b1) *
             phi(p.c0, p.c1, p.c2);
      b(i, j) = s;
      b(j, i) = s;
    }
  }
  const double det_b = b.determinant();
  if (!(std::fabs(det_b) > 0.0) || !std::isfinite(det_b))
    throw NotAG2Structure("B-form is degenerate");
  const int sigma = det_b > 0 ? -1 : 1;
  const double vol = std::pow(std::fabs(det_b) / std::pow(6.0, 7), 1.0 / 9.0);
  const Mat7 g = -b / (6.0 * sigma * vol);
  Eigen::SelfAdjointEigenSolver<Mat7> es(g, Eigen::EigenvaluesOnly);
  const auto ev = es.eigenvalues();
  if (!(ev(0) > 1e-10 * ev(6)))
    throw NotAG2Structure("induced metric is not positive definite");
  MetricData m;
  m.g = from_eigen(g);
  m.g.set_symmetry(Symmetry::symmetric);
  Mat7 gi = g.inverse();
  gi = 0.5 * (gi + gi.transpose()).eval();
  m.g_inv = from_eigen(gi);
  m.g_inv.set_symmetry(Symmetry::symmetric);
  m.vol_density = vol;
  m.orientation = sigma;
  return m;
}

template <int R>
Tensor<R> transform_indices(const Tensor<R>& a, const Mat& m) {
  Tensor<R> cur = a;
  Tensor<R> next;
  for (int p = 0; p < R; ++p) {
    const std::size_t stride = pow7(R - 1 - p);
    const std::size_t outer = pow7(p);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * 7 * stride;
      for (std::size_t in = 0; in < stride; ++in) {
        double col[7];
        for (int i = 0; i < 7; ++i) col[i] = cur[base + i * stride + in];
        for (int k = 0; k < 7; ++k) {
          double s = 0.0;
          for (int i = 0; i < 7; ++i) s += col[i] * m(i, k);
          next[base + k * stride + in] = s;
        }
      }
    }
    std::swap(cur, next);
  }
  cur.set_symmetry(a.symmetry());
  return cur;
}

template Tensor<1> transform_indices(const Tensor<1>&, const Mat&);
template Tensor<2> transform_indices(const Tensor<2>&, const Mat&);
template Tensor<3> transform_indices(const Tensor<3>&, const Mat&);
template Tensor<4> transform_indices(const Tensor<4>&, const Mat&);

Frame::Frame(const MetricData& m) {
  const Mat7 g = to_eigen(m.g);
  Eigen::LLT<Mat7> llt(g);
  const Mat7 l = llt.matrixL();
  const Mat7 lt_inv = l.transpose().triangularView<Eigen::Upper>().solve(
      Mat7::Identity());
  e_ = from_eigen(lt_inv);
  f_ = from_eigen(Mat7(l.transpose()));
}

Form4 hodge_dual(const Form3& phi, int orientation) {
  const auto& tb = tables();
  std::array<double, 35> c{};
  for (int t = 0; t < 35; ++t) {
    const auto& tr = tb.triples[t];
    c[tb.comp3[t]] = orientation * tb.comp3_sign[t] * phi(tr[0], tr[1], tr[2]);
  }
  return form4_from_components(c);
}

Form3 hodge_dual(const Form4& psi, int orientation) {
  const auto& tb = tables();
  std::array<double, 35> c{};
  for (int q = 0; q < 35; ++q) {
    const auto& qu = tb.quads[q];
    c[tb.comp4[q]] =
        orientation * tb.comp4_sign[q] * psi(qu[0], qu[1], qu[2], qu[3]);
  }
  return form3_from_components(c);
}

Form4 hodge_dual(const Form3& phi, const MetricData& m) {
  Frame f(m);
  return f.to_coords(hodge_dual(f.to_frame(phi), m.orientation));
}

Form3 hodge_dual(const Form4& psi, const MetricData& m) {
  Frame f(m);
  return f.to_coords(hodge_dual(f.to_frame(psi), m.orientation));
}

Form3 transport(const Mat& a, const Form3& phi) {
  const Mat7 inv = to_eigen(a).inverse();
  return transform_indices(phi, from_eigen(inv));
}

Form3 diamond(const Mat& h, const Form3& phi) {
  std::array<double, 35> c{};
  const auto& t = tables().triples;
  for (int n = 0; n < 35; ++n) {
    const int i = t[n][0], j = t[n][1], k = t[n][2];
    double s = 0.0;
    for (int p = 0; p < 7; ++p)
      s += h(i, p) * phi(p, j, k) + h(j, p) * phi(i, p, k) +
           h(k, p) * phi(i, j, p);
    c[n] = s;
  }
  return form3_from_components(c);
}

Form3 diamond(const Mat& h, const Form3& phi, const MetricData& m) {
  Frame f(m);
  return f.to_coords(diamond(f.to_frame(h), f.to_frame(phi)));
}

Form3 contract_psi(const Vec& x, const Form4& psi) {
  std::array<double, 35> c{};
  const auto& t = tables().triples;
  for (int n = 0; n < 35; ++n) {
    double s = 0.0;
    for (int m = 0; m < 7; ++m) s += x(m) * psi(m, t[n][0], t[n][1], t[n][2]);
    c[n] = s;
  }
  return form3_from_components(c);
}

Form3 contract_psi(const Vec& x, const Form4& psi, const MetricData& m) {
  Frame f(m);
  return f.to_coords(contract_psi(f.to_frame(x), f.to_frame(psi)));
}

HX decompose_3form(const Form3& omega, const Form3& phi, const Form4& psi,
                   const MetricData& m) {
  Frame f(m);
  const Form3 phi_f = f.to_frame(phi);
  const Form4 psi_f = f.to_frame(psi);
  Eigen::Matrix<double, 35, 35> a;
  int col = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      Mat h;
      h(i, j) = 1.0;
      h(j, i) = 1.0;
      const auto c = independent_components(diamond(h, phi_f));
      for (int r = 0; r < 35; ++r) a(r, col) = c[r];
      ++col;
    }
  for (int i = 0; i < 7; ++i) {
    Vec x;
    x(i) = 1.0;
    const auto c = independent_components(contract_psi(x, psi_f));
    for (int r = 0; r < 35; ++r) a(r, col) = c[r];
    ++col;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 35, 35>> lu(a);
  lu.setThreshold(1e-10);
  if (lu.rank() < 35)
    throw SingularDecomposition("3-form decomposition matrix is singular");
  const auto rhs_c = independent_components(f.to_frame(omega));
  Eigen::Matrix<double, 35, 1> rhs;
  for (int r = 0; r < 35; ++r) rhs(r) = rhs_c[r];
  const Eigen::Matrix<double, 35, 1> sol = lu.solve(rhs);
  HX out;
  col = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      out.h(i, j) = sol(col);
      out.h(j, i) = sol(col);
      ++col;
    }
  for (int i = 0; i < 7; ++i) out.x(i) = sol(col++);
  out.h = f.to_coords(out.h);
  out.h.set_symmetry(Symmetry::symmetric);
  out.x = f.to_coords(out.x);
  return out;
}

Mat p_op(const Mat& eta, const Form4& psi) {
  Mat out;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      double s = 0.0;
      for (int a = 0; a < 7; ++a)
        for (int b = 0; b < 7; ++b) s += eta(a, b) * psi(a, b, i, j);
      out(i, j) = s;
    }
  return out;
}

Mat p_op(const Mat& eta, const Form4& psi, const MetricData& m) {
  Frame f(m);
  return f.to_coords(p_op(f.to_frame(eta), f.to_frame(psi)));
}

TwoFormSplit proj_2form(const Mat& alpha, const Form4& psi) {
  const Mat pa = p_op(alpha, psi);
  TwoFormSplit out;
  out.alpha7 = (2.0 * alpha - pa) * (1.0 / 6.0);
  out.alpha14 = (pa + 4.0 * alpha) * (1.0 / 6.0);
  return out;
}

TwoFormSplit proj_2form(const Mat& alpha, const Form4& psi,
                        const MetricData& m) {
  Frame f(m);
  TwoFormSplit s = proj_2form(f.to_frame(alpha), f.to_frame(psi));
  s.alpha7 = f.to_coords(s.alpha7);
  s.alpha14 = f.to_coords(s.alpha14);
  return s;
}

Vec v_op(const Mat& alpha, const Form3& phi) {
  Vec out;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const double a = alpha(i, j);
      if (a == 0.0) continue;
      for (int k = 0; k < 7; ++k) out(k) += a * phi(i, j, k);
    }
  return out;
}

Vec v_op(const Mat& alpha, const Form3& phi, const MetricData& m) {
  Frame f(m);
  return f.to_coords(v_op(f.to_frame(alpha), f.to_frame(phi)));
}

Vec curl(const Mat& nabla_a, const Form3& phi) { return v_op(nabla_a, phi); }

Mat curl(const Form3& nabla_a, const Form3& phi) {
  Mat out;
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b)
      for (int j = 0; j < 7; ++j) {
        const double ph = phi(a, b, j);
        if (ph == 0.0) continue;
        for (int i = 0; i < 7; ++i) out(i, j) += nabla_a(a, b, i) * ph;
      }
  return out;
}

Vec curl(const Mat& nabla_a, const Form3& phi, const MetricData& m) {
  Frame f(m);
  return f.to_coords(curl(f.to_frame(nabla_a), f.to_frame(phi)));
}

Mat curl(const Form3& nabla_a, const Form3& phi, const MetricData& m) {
  Frame f(m);
  return f.to_coords(curl(f.to_frame(nabla_a), f.to_frame(phi)));
}

Mat transpose(const Mat& a) {
  Mat out;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) out(i, j) = a(j, i);
  out.set_symmetry(a.symmetry());
  return out;
}

Mat sym(const Mat& a) {
  Mat out(Symmetry::symmetric);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) out(i, j) = 0.5 * (a(i, j) + a(j, i));
  return out;
}

Mat compose(const Mat& a, const Mat& b) {
  Mat out;
  for (int i = 0; i < 7; ++i)
    for (int p = 0; p < 7; ++p) {
      const double x = a(i, p);
      for (int j = 0; j < 7; ++j) out(i, j) += x * b(p, j);
    }
  return out;
}

double trace(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += a(i, i);
  return s;
}

Mat outer(const Vec& a, const Vec& b) {
  Mat out;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) out(i, j) = a(i) * b(j);
  return out;
}

Vec apply(const Mat& a, const Vec& v) {
  Vec out;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) out(i) += a(i, j) * v(j);
  return out;
}

Vec apply_transposed(const Mat& a, const Vec& v) {
  Vec out;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) out(i) += a(j, i) * v(j);
  return out;
}

Mat interior(const Vec& v, const Form3& phi) {
  Mat out(Symmetry::antisymmetric);
  for (int m = 0; m < 7; ++m)
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) out(i, j) += v(m) * phi(m, i, j);
  return out;
}

Mat circled_circ(const Mat& t, const Form3& phi) {
  // u(p, m, j) = t_im phi_ijp, w(q, j, m) = t_jn phi_mnq
  Form3 u;
  Form3 w;
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) {
      const double tab = t(a, b);
      if (tab == 0.0) continue;
      for (int c = 0; c < 7; ++c)
        for (int p = 0; p < 7; ++p) {
          u(p, b, c) += tab * phi(a, c, p);
          w(p, a, c) += tab * phi(c, b, p);
        }
    }
  Mat out;
  for (int p = 0; p < 7; ++p)
    for (int q = 0; q < 7; ++q) {
      double s = 0.0;
      for (int m = 0; m < 7; ++m)
        for (int j = 0; j < 7; ++j) s += u(p, m, j) * w(q, j, m);
      out(p, q) = s;
    }
  return out;
}

Mat trace_free(const Mat& a) {
  Mat out = a;
  const double t = trace(a) / 7.0;
  for (int i = 0; i < 7; ++i) out(i, i) -= t;
  return out;
}

double form3_inner_from_parts(const HX& a, const HX& b) {
  return 54.0 / 7.0 * trace(a.h) * trace(b.h) +
         12.0 * dot(trace_free(a.h), trace_free(b.h)) + 24.0 * dot(a.x, b.x);
}

double pair_inner(const HX& a, const HX& b) {
  return dot(a.h, b.h) + dot(a.x, b.x);
}

}  // namespace g2forge
