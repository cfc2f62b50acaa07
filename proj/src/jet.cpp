#include "g2forge/jet.hpp"

#include <cmath>

#include "g2forge/parallel.hpp"

namespace g2forge {

namespace {

template <int R>
double max_abs_diff(const Tensor<R>& a, const Tensor<R>& b) {
  return (a - b).max_abs();
}

}  // namespace

FrameJet to_frame(const G2Jet& j) {
  Frame f(j.m);
  FrameJet out;
  out.phi = f.to_frame(j.phi);
  out.psi = f.to_frame(j.psi);
  out.t = f.to_frame(j.t);
  out.nabla_t = f.to_frame(j.nabla_t);
  out.rm = f.to_frame(j.rm);
  out.orientation = j.m.orientation;
  return out;
}

G2Jet synthetic_nearly_g2_jet(double c) {
  G2Jet j;
  j.phi = standard_phi();
  j.m = metric_from_phi(j.phi);
  j.psi = hodge_dual(j.phi, j.m);
  j.t = j.m.g * c;
  const Mat& g = j.m.g;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l)
          j.rm(a, b, k, l) =
              -c * c * (g(a, k) * g(b, l) - g(a, l) * g(b, k));
  return j;
}

JetField::JetField(G2Field field) : field_(std::move(field)) {
  const std::size_t n = field_.size();
  frames_.reserve(n);
  g_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    frames_.emplace_back(field_.metric(i));
    g_[i] = field_.metric(i).g;
  }
  gamma_.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const auto dg = point_gradient(grid(), g_, i);
    const Mat& gi = field_.metric(i).g_inv;
    Form3 low;  // Gamma_lij = (d_i g_lj + d_j g_li - d_l g_ij) / 2
    for (int l = 0; l < kDim; ++l)
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b)
          low(l, a, b) = 0.5 * (dg[a](l, b) + dg[b](l, a) - dg[l](a, b));
    Form3 up;
    for (int k = 0; k < kDim; ++k)
      for (int l = 0; l < kDim; ++l) {
        const double w = gi(k, l);
        if (w == 0.0) continue;
        for (int ab = 0; ab < 49; ++ab) up[k * 49 + ab] += w * low[l * 49 + ab];
      }
    gamma_[i] = up;
  });
  torsion_.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const Frame& f = frames_[i];
    const Form4 nphi = f.to_frame(nabla_phi(i));
    const Form4 psi_f = f.to_frame(psi(i));
    Mat t;
    for (int p = 0; p < kDim; ++p)
      for (int q = 0; q < kDim; ++q) {
        double s = 0.0;
        for (int n3 = 0; n3 < 343; ++n3)
          s += nphi[p * 343 + n3] * psi_f[q * 343 + n3];
        t(p, q) = s / 24.0;
      }
    torsion_[i] = f.to_coords(t);
  });
}

Form4 JetField::psi(std::size_t i) const {
  return hodge_dual(field_.phi(i), field_.metric(i));
}

Form4 JetField::nabla_phi(std::size_t i) const {
  return covariant_derivative(field_.phi(), i);
}

template <int R>
Tensor<R + 1> JetField::covariant_derivative(const TensorField<R>& a,
                                             std::size_t i) const {
  const auto da = point_gradient(grid(), a, i);
  const Tensor<R>& ai = a[i];
  const Form3& gm = gamma_[i];
  constexpr std::size_t n = Tensor<R>::size;
  Tensor<R + 1> out;
  for (int p = 0; p < kDim; ++p) {
    for (std::size_t idx = 0; idx < n; ++idx) {
      double s = da[p][idx];
      // subtract Gamma^m_{p i_s} A_{.. m ..} for each slot s
      std::size_t stride = 1;
      for (int slot = R - 1; slot >= 0; --slot) {
        const int is = static_cast<int>((idx / stride) % kDim);
        const std::size_t base = idx - is * stride;
        for (int m = 0; m < kDim; ++m)
          s -= gm(m, p, is) * ai[base + m * stride];
        stride *= kDim;
      }
      out[p * n + idx] = s;
    }
  }
  return out;
}

template Tensor<1> JetField::covariant_derivative(const TensorField<0>&,
                                                  std::size_t) const;
template Tensor<2> JetField::covariant_derivative(const TensorField<1>&,
                                                  std::size_t) const;
template Tensor<3> JetField::covariant_derivative(const TensorField<2>&,
                                                  std::size_t) const;
template Tensor<4> JetField::covariant_derivative(const TensorField<3>&,
                                                  std::size_t) const;

G2Jet JetField::jet(std::size_t i) const {
  G2Jet j;
  j.phi = field_.phi(i);
  j.m = field_.metric(i);
  j.psi = psi(i);
  j.gamma = gamma_[i];
  j.t = torsion_[i];
  j.nabla_t = covariant_derivative(torsion_, i);
  j.point = grid().multi_index(i);

  const auto dgamma = point_gradient(grid(), gamma_, i);
  const Form3& gm = gamma_[i];
  Form4 up;  // R_ijk^l stored as (i, j, k, l)
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double s = dgamma[a](l, b, k) - dgamma[b](l, a, k);
          for (int m = 0; m < kDim; ++m)
            s += gm(m, b, k) * gm(l, a, m) - gm(m, a, k) * gm(l, b, m);
          up(a, b, k, l) = s;
        }
  const Mat& g = j.m.g;
  for (std::size_t n = 0; n < 343; ++n)
    for (int l = 0; l < kDim; ++l) {
      double s = 0.0;
      for (int m = 0; m < kDim; ++m) s += up[n * 7 + m] * g(m, l);
      j.rm[n * 7 + l] = s;
    }
  return j;
}

G2Jet jet_at(const G2Field& field, std::size_t point) {
  return JetField(field).jet(point);
}

double g2_bianchi_residual(const G2Jet& coords) {
  const FrameJet j = to_frame(coords);
  double r = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int jj = 0; jj < kDim; ++jj)
      for (int k = 0; k < kDim; ++k) {
        double s = j.nabla_t(i, jj, k) - j.nabla_t(jj, i, k);
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b)
            s -= (j.t(i, a) * j.t(jj, b) + 0.5 * j.rm(i, jj, a, b)) *
                 j.phi(a, b, k);
        r = std::fmax(r, std::fabs(s));
      }
  return r;
}

Mat nabla_vt(const FrameJet& j) {
  Mat out;
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      double s = 0.0;
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) {
          s += j.nabla_t(i, a, b) * j.phi(a, b, k);
          for (int l = 0; l < kDim; ++l)
            s += j.t(a, b) * j.t(i, l) * j.psi(l, a, b, k);
        }
      out(i, k) = s;
    }
  return out;
}

CurvatureCheck curvature_from_torsion(const FrameJet& j) {
  CurvatureCheck c;
  const Mat& t = j.t;
  for (int b = 0; b < kDim; ++b)
    for (int k = 0; k < kDim; ++k) {
      double s = 0.0;
      for (int a = 0; a < kDim; ++a) s += j.rm(a, b, k, a);
      c.ric(b, k) = s;
    }
  c.scal = trace(c.ric);
  for (int p = 0; p < kDim; ++p)
    for (int q = 0; q < kDim; ++q) {
      double s = 0.0;
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b)
          for (int cc = 0; cc < kDim; ++cc)
            for (int d = 0; d < kDim; ++d)
              s += j.rm(a, b, cc, d) * j.phi(a, b, p) * j.phi(cc, d, q);
      c.f(p, q) = s;
    }

  const Vec vt = v_op(t, j.phi);
  const Mat dvt = nabla_vt(j);
  const double div_vt = trace(dvt);
  const double tr_t = trace(t);
  const Mat tt = transpose(t);
  const Mat pt = p_op(t, j.psi);
  c.scal_from_torsion =
      -2 * div_vt + tr_t * tr_t - dot(t, tt) - dot(t, pt);
  const double scal_alt =
      -2 * div_vt + tr_t * tr_t + dot(vt, vt) - dot(t, t);

  Mat k2, k3;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      double s2 = 0.0, s3 = 0.0;
      for (int p = 0; p < kDim; ++p)
        for (int q = 0; q < kDim; ++q) {
          s2 += j.nabla_t(p, a, q) * j.phi(p, b, q);
          s3 += j.nabla_t(p, q, a) * j.phi(p, q, b);
        }
      k2(a, b) = s2;
      k3(a, b) = s3;
    }
  const Mat lie_vt_g = dvt + transpose(dvt);
  c.ric_from_torsion = -sym(k2) - 0.5 * lie_vt_g + tr_t * sym(t) -
                       sym(compose(t, t));
  c.f_from_torsion = 4.0 * sym(k3) - 2.0 * sym(circled_circ(t, j.phi));

  c.scal_residual = std::fabs(c.scal - c.scal_from_torsion);
  c.scalar_torsion_residual = std::fabs(c.scal - scal_alt);
  c.ric_residual = max_abs_diff(c.ric, c.ric_from_torsion);
  c.f_residual = max_abs_diff(c.f, c.f_from_torsion);

  // (div T^t)_k = nabla_a T_ka, (grad tr T)_k = nabla_k T_aa
  Vec div_tt, grad_tr, lhs_psi;
  for (int k = 0; k < kDim; ++k)
    for (int a = 0; a < kDim; ++a) {
      div_tt(k) += j.nabla_t(a, k, a);
      grad_tr(k) += j.nabla_t(k, a, a);
    }
  for (int l = 0; l < kDim; ++l)
    for (int n = 0; n < 343; ++n) lhs_psi(l) += j.nabla_t[n] * j.psi[n * 7 + l];
  c.div_tt_residual = (div_tt - grad_tr - apply(t, vt)).max_abs();
  const Vec rhs_psi =
      tr_t * vt - v_op(compose(t, t), j.phi) - apply_transposed(t, vt);
  c.nabla_t_psi_residual = (lhs_psi - rhs_psi).max_abs();
  return c;
}

TensorField<3> lie_derivative_fd(const JetField& jf, const TensorField<1>& v) {
  const std::size_t n = jf.size();
  TensorField<1> vup(n);  // vector components V^m
  for (std::size_t i = 0; i < n; ++i)
    vup[i] = apply(jf.metric(i).g_inv, v[i]);
  TensorField<3> out(n);
  parallel_for(n, [&](std::size_t i) {
    const auto dv = point_gradient(jf.grid(), vup, i);
    const auto dphi = point_gradient(jf.grid(), jf.field().phi(), i);
    const Form3& phi = jf.field().phi(i);
    Form3 lie;  // V^m d_m phi_ijk + d_i V^m phi_mjk + ...
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c) {
          double s = 0.0;
          for (int m = 0; m < kDim; ++m)
            s += vup[i](m) * dphi[m](a, b, c) + dv[a](m) * phi(m, b, c) +
                 dv[b](m) * phi(a, m, c) + dv[c](m) * phi(a, b, m);
          lie(a, b, c) = s;
        }
    out[i] = lie;
  });
  return out;
}

double lie_derivative_residual(const JetField& jf, const TensorField<1>& v) {
  const std::size_t n = jf.size();
  const TensorField<3> lie = lie_derivative_fd(jf, v);
  std::vector<double> res(n);
  parallel_for(n, [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const FrameJet j = jf.frame_jet(i);
    const Mat nv = jf.frame_covariant_derivative(v, i);
    const Vec vf = f.to_frame(v[i]);
    const Mat h = sym(nv);  // (1/2) L_V g
    const Vec x = -0.5 * curl(nv, j.phi) + apply_transposed(j.t, vf);
    const Form3 formula = diamond(h, j.phi) + contract_psi(x, j.psi);
    res[i] = (f.to_frame(lie[i]) - formula).max_abs();
  });
  double r = 0.0;
  for (double x : res) r = std::fmax(r, x);
  return r;
}

}  // namespace g2forge
