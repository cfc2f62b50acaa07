#include "g2forge/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "g2forge/parallel.hpp"

namespace g2forge {

std::string to_string(FunctionalId fid) {
  switch (fid) {
    case FunctionalId::scal: return "Scal";
    case FunctionalId::trt2: return "TrT2";
    case FunctionalId::t2: return "T2";
    case FunctionalId::ttt: return "TTt";
    case FunctionalId::tpt: return "TPT";
    case FunctionalId::vt2: return "VT2";
    case FunctionalId::hilbert: return "Hilbert";
    case FunctionalId::normalized_hilbert: return "NormalizedHilbert";
  }
  return "?";
}

std::string to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::hat: return "HatP";
    case FlowVariant::tilde: return "TildeP";
    case FlowVariant::hat2: return "HatP2";
    case FlowVariant::tilde2: return "TildeP2";
  }
  return "?";
}

double DensityVector::value(FunctionalId fid) const {
  switch (fid) {
    case FunctionalId::scal: return scal;
    case FunctionalId::trt2: return trt2;
    case FunctionalId::t2: return t2;
    case FunctionalId::ttt: return ttt;
    case FunctionalId::tpt: return tpt;
    case FunctionalId::vt2: return vt2;
    case FunctionalId::hilbert:
    case FunctionalId::normalized_hilbert: return hilbert;
  }
  return 0.0;
}

TorsionData torsion_data(const FrameJet& j) {
  TorsionData d;
  d.t = j.t;
  d.tr_t = trace(j.t);
  d.vt = v_op(j.t, j.phi);
  d.nabla_vt = nabla_vt(j);
  d.div_vt = trace(d.nabla_vt);
  d.lie_vt_g = d.nabla_vt + transpose(d.nabla_vt);
  for (int k = 0; k < kDim; ++k)
    for (int a = 0; a < kDim; ++a) {
      d.div_t(k) += j.nabla_t(a, a, k);
      d.div_tt(k) += j.nabla_t(a, k, a);
      d.grad_tr_t(k) += j.nabla_t(k, a, a);
    }
  d.t_vt_phi = compose(j.t, interior(d.vt, j.phi));
  d.pt = p_op(j.t, j.psi);
  for (int b = 0; b < kDim; ++b)
    for (int k = 0; k < kDim; ++k) {
      double s = 0.0;
      for (int a = 0; a < kDim; ++a) s += j.rm(a, b, k, a);
      d.ric(b, k) = s;
    }
  d.scal = trace(d.ric);
  return d;
}

Mat f_tensor(const FrameJet& j) {
  // u(p, c, d) = R_abcd phi_abp, then F_pq = u(p, c, d) phi_cdq
  Form3 u;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int p = 0; p < kDim; ++p) {
        const double ph = j.phi(a, b, p);
        if (ph == 0.0) continue;
        for (int cd = 0; cd < 49; ++cd)
          u[p * 49 + cd] += ph * j.rm[(a * 7 + b) * 49 + cd];
      }
  Mat f;
  for (int p = 0; p < kDim; ++p)
    for (int q = 0; q < kDim; ++q) {
      double s = 0.0;
      for (int cd = 0; cd < 49; ++cd) s += u[p * 49 + cd] * j.phi[cd * 7 + q];
      f(p, q) = s;
    }
  return f;
}

namespace {

DensityVector densities_from(const FrameJet& j, const TorsionData& d) {
  DensityVector v;
  v.scal = d.scal;
  v.t2 = dot(j.t, j.t);
  v.trt2 = d.tr_t * d.tr_t;
  v.ttt = dot(j.t, transpose(j.t));
  v.tpt = dot(j.t, d.pt);
  v.vt2 = dot(d.vt, d.vt);
  v.hilbert = v.scal / 6 - v.t2 / 3 - v.trt2 / 6;
  v.hilbert_alt = -d.div_vt / 3 - v.t2 / 2 + v.vt2 / 6;
  v.hilbert_alt_residual = std::fabs(v.hilbert - v.hilbert_alt);
  return v;
}

Mat hat_p1_from(const TorsionData& d) {
  return -1.0 * d.ric - (1.0 / 3) * d.lie_vt_g - (2.0 / 3) * sym(d.t_vt_phi) +
         d.tr_t * sym(d.t);
}

Vec p2_from(const TorsionData& d) {
  return (2.0 / 3) * d.div_t + (1.0 / 3) * d.grad_tr_t +
         (d.tr_t / 3) * d.vt;
}

double hilbert_from(const TorsionData& d) {
  return d.scal / 6 - dot(d.t, d.t) / 3 - d.tr_t * d.tr_t / 6;
}

Mat tilde_p1_from(const TorsionData& d) {
  const double s = (dot(d.t, d.t) - dot(d.vt, d.vt) / 3) / 3;
  return hat_p1_from(d) + s * identity_mat();
}

}  // namespace

DensityVector densities(const FrameJet& j) {
  return densities_from(j, torsion_data(j));
}

Mat hat_p1(const FrameJet& j) { return hat_p1_from(torsion_data(j)); }

Mat p1(const FrameJet& j) {
  const TorsionData d = torsion_data(j);
  return hat_p1_from(d) + hilbert_from(d) * identity_mat();
}

Vec p2(const FrameJet& j) { return p2_from(torsion_data(j)); }

Mat tilde_p1(const FrameJet& j) { return tilde_p1_from(torsion_data(j)); }

GradientPair gradient(const FrameJet& j, FunctionalId fid, double volume,
                      double hilbert_total) {
  const TorsionData d = torsion_data(j);
  const Mat g = identity_mat();
  const Mat& t = j.t;
  const Mat tsym = sym(t);
  const Mat t_sq = compose(t, t);
  const double t2 = dot(t, t);
  const double trt2 = d.tr_t * d.tr_t;
  const double ttt = dot(t, transpose(t));
  GradientPair q;
  switch (fid) {
    case FunctionalId::scal:
      q.q1 = d.scal * g - 2.0 * d.ric;
      break;
    case FunctionalId::trt2:
      q.q1 = trt2 * g - 2 * d.tr_t * tsym;
      q.q2 = -2.0 * d.grad_tr_t - 2 * d.tr_t * d.vt;
      break;
    case FunctionalId::t2:
      q.q1 = 2.0 * d.ric + d.lie_vt_g + t2 * g - 2 * d.tr_t * tsym +
             2.0 * sym(d.t_vt_phi);
      q.q2 = -2.0 * d.div_t;
      break;
    case FunctionalId::ttt:
      q.q1 = 0.5 * f_tensor(j) + ttt * g + sym(circled_circ(t, j.phi)) -
             2.0 * sym(t_sq) + 2.0 * sym(compose(d.pt, t));
      q.q2 = -2.0 * d.div_tt - 2.0 * v_op(t_sq, j.phi);
      break;
    case FunctionalId::tpt:
      q.q1 = 2.0 * d.ric - 0.5 * f_tensor(j) + (trt2 - d.scal - ttt) * g -
             sym(circled_circ(t, j.phi)) - 2 * d.tr_t * tsym +
             2.0 * sym(t_sq) - 2.0 * sym(compose(d.pt, t));
      q.q2 = -2 * d.tr_t * d.vt + 2.0 * v_op(t_sq, j.phi) +
             2.0 * apply(t, d.vt);
      break;
    case FunctionalId::vt2:
      q.q1 = (d.scal - trt2 + t2) * g + d.lie_vt_g + 2.0 * sym(d.t_vt_phi);
      q.q2 = -2.0 * d.div_t + 2.0 * d.grad_tr_t + 2 * d.tr_t * d.vt;
      break;
    case FunctionalId::hilbert:
      q.q1 = hat_p1_from(d) + hilbert_from(d) * g;
      q.q2 = p2_from(d);
      break;
    case FunctionalId::normalized_hilbert: {
      const double s = std::pow(volume, -5.0 / 7);
      q.q1 = s * (hat_p1_from(d) + hilbert_from(d) * g -
                  (5.0 / 7) * (hilbert_total / volume) * g);
      q.q2 = s * p2_from(d);
      break;
    }
  }
  return q;
}

TraceRelations trace_relations(const FrameJet& j) {
  const TorsionData d = torsion_data(j);
  const double t2 = dot(d.t, d.t);
  const double trt2 = d.tr_t * d.tr_t;
  const double vt2 = dot(d.vt, d.vt);
  const double hil = hilbert_from(d);
  const Mat hp = hat_p1_from(d);
  const Mat tp = tilde_p1_from(d);
  const Mat p = hp + hil * identity_mat();
  TraceRelations r;
  r.hat_p1 = std::fabs(trace(hp) - (2.0 / 3 * d.div_vt - 2 * hil));
  r.tilde_p1 = std::fabs(trace(tp) - (4.0 / 3 * d.div_vt -
                                      20.0 / 3 * (-t2 / 2 + vt2 / 6)));
  r.p1 = std::fabs(trace(p) - (d.scal / 2 - trt2 / 2 + vt2 / 3 - 2 * t2));
  r.p1_alt = std::fabs(trace(p) - (-d.div_vt + 5.0 / 6 * vt2 - 2.5 * t2));
  r.p1_from_tilde = (p - (tp - 0.25 * trace(tp) * identity_mat())).max_abs();
  return r;
}

HX special_ricci_like(const FrameJet& j, double a) {
  const TorsionData d = torsion_data(j);
  return {-1.0 * d.ric + a * d.lie_vt_g,
          (1 + a) * d.div_t - a * d.grad_tr_t};
}

HX flow_rhs_parts(const FrameJet& j, FlowVariant v) {
  const TorsionData d = torsion_data(j);
  const double extra =
      (dot(d.t, d.t) - dot(d.vt, d.vt) / 3) / 3;
  switch (v) {
    case FlowVariant::hat: return {hat_p1_from(d), p2_from(d)};
    case FlowVariant::tilde: return {tilde_p1_from(d), p2_from(d)};
    case FlowVariant::hat2:
    case FlowVariant::tilde2: {
      HX out;
      out.h = -1.0 * d.ric - (2.0 / 3) * sym(d.t_vt_phi) + d.tr_t * sym(d.t);
      if (v == FlowVariant::tilde2) out.h += extra * identity_mat();
      out.x = d.div_t + (d.tr_t / 3) * d.vt +
              (1.0 / 3) * apply_transposed(d.t, d.vt);
      return out;
    }
  }
  return {};
}

Form3 flow_rhs(const FrameJet& j, FlowVariant v) {
  const HX p = flow_rhs_parts(j, v);
  return diamond(p.h, j.phi) + contract_psi(p.x, j.psi);
}

// ---------------------------------------------------------------------------
// Bianchi-type operators

namespace {

Vec div2(const Form3& nabla_h) {
  Vec out;
  for (int a = 0; a < kDim; ++a)
    for (int k = 0; k < kDim; ++k) out(k) += nabla_h(a, a, k);
  return out;
}

Vec grad_trace(const Form3& nabla_h) {
  Vec out;
  for (int k = 0; k < kDim; ++k)
    for (int a = 0; a < kDim; ++a) out(k) += nabla_h(k, a, a);
  return out;
}

// 1/2 curl X - 1/2 X _| P(T) - T(X)
Vec vector_terms(const FrameJet& j, const Vec& x, const Mat& nabla_x) {
  return 0.5 * curl(nabla_x, j.phi) -
         0.5 * apply_transposed(p_op(j.t, j.psi), x) - apply(j.t, x);
}

}  // namespace

Vec l_op(const FrameJet& j, const DeformationJet& d) {
  return div2(d.nabla_h) + vector_terms(j, d.x, d.nabla_x);
}

Vec tilde_b(const FrameJet& j, const DeformationJet& d) {
  return div2(d.nabla_h) - 0.25 * grad_trace(d.nabla_h) +
         vector_terms(j, d.x, d.nabla_x);
}

HX l_star(const FrameJet& j, const Vec& y, const Mat& nabla_y) {
  return {-1.0 * sym(nabla_y),
          0.5 * curl(nabla_y, j.phi) - apply_transposed(j.t, y)};
}

HX k_op(const FrameJet& j, const Vec& y, const Mat& nabla_y) {
  HX out = l_star(j, y, nabla_y);
  out.h += (trace(nabla_y) / 7) * identity_mat();
  return out;
}

FrameJet first_order_jet(const JetField& jf, std::size_t i) {
  const Frame& f = jf.frame(i);
  FrameJet j;
  j.phi = f.to_frame(jf.field().phi(i));
  j.orientation = jf.metric(i).orientation;
  j.psi = hodge_dual(j.phi, j.orientation);
  j.t = f.to_frame(jf.torsion(i));
  j.nabla_t = jf.frame_covariant_derivative(jf.torsion(), i);
  return j;
}

namespace {

DeformationJet deformation_jet(const JetField& jf, const TensorField<2>& h,
                               const TensorField<1>& x, std::size_t i) {
  const Frame& f = jf.frame(i);
  DeformationJet d;
  d.h = f.to_frame(h[i]);
  d.x = f.to_frame(x[i]);
  d.nabla_h = jf.frame_covariant_derivative(h, i);
  d.nabla_x = jf.frame_covariant_derivative(x, i);
  return d;
}

template <class Op>
TensorField<1> vector_field_op(const JetField& jf, const TensorField<2>& h,
                               const TensorField<1>& x, Op op) {
  TensorField<1> out(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) {
    const FrameJet j = first_order_jet(jf, i);
    out[i] = jf.frame(i).to_coords(op(j, deformation_jet(jf, h, x, i)));
  });
  return out;
}

template <class Op>
DeformationField pair_field_op(const JetField& jf, const TensorField<1>& y,
                               Op op) {
  DeformationField out{TensorField<2>(jf.size()), TensorField<1>(jf.size())};
  parallel_for(jf.size(), [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const FrameJet j = first_order_jet(jf, i);
    const HX r = op(j, f.to_frame(y[i]), jf.frame_covariant_derivative(y, i));
    out.h[i] = f.to_coords(r.h);
    out.x[i] = f.to_coords(r.x);
  });
  return out;
}

}  // namespace

TensorField<1> l_op(const JetField& jf, const TensorField<2>& h,
                    const TensorField<1>& x) {
  return vector_field_op(jf, h, x, [](const FrameJet& j,
                                      const DeformationJet& d) {
    return l_op(j, d);
  });
}

TensorField<1> tilde_b(const JetField& jf, const TensorField<2>& h,
                       const TensorField<1>& x) {
  return vector_field_op(jf, h, x, [](const FrameJet& j,
                                      const DeformationJet& d) {
    return tilde_b(j, d);
  });
}

DeformationField l_star(const JetField& jf, const TensorField<1>& y) {
  return pair_field_op(jf, y, [](const FrameJet& j, const Vec& v,
                                 const Mat& nv) { return l_star(j, v, nv); });
}

DeformationField k_op(const JetField& jf, const TensorField<1>& y) {
  return pair_field_op(jf, y, [](const FrameJet& j, const Vec& v,
                                 const Mat& nv) { return k_op(j, v, nv); });
}

BianchiResiduals bianchi_residuals(const JetField& jf) {
  std::vector<FrameJet> jets(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) { jets[i] = jf.frame_jet(i); });
  return bianchi_residuals(jf, jets);
}

BianchiResiduals bianchi_residuals(const JetField& jf,
                                   const std::vector<FrameJet>& jets) {
  const std::size_t n = jf.size();
  TensorField<2> p1f(n), tp1f(n);
  TensorField<1> p2f(n);
  parallel_for(n, [&](std::size_t i) {
    const TorsionData d = torsion_data(jets[i]);
    const Frame& f = jf.frame(i);
    p1f[i] = f.to_coords(Mat(hat_p1_from(d) + hilbert_from(d) * identity_mat()));
    tp1f[i] = f.to_coords(tilde_p1_from(d));
    p2f[i] = f.to_coords(p2_from(d));
  });
  std::vector<double> rl(n), rb(n);
  parallel_for(n, [&](std::size_t i) {
    const FrameJet& j = jets[i];
    rl[i] = l_op(j, deformation_jet(jf, p1f, p2f, i)).max_abs();
    rb[i] = tilde_b(j, deformation_jet(jf, tp1f, p2f, i)).max_abs();
  });
  BianchiResiduals r;
  for (std::size_t i = 0; i < n; ++i) {
    r.l_of_p = std::fmax(r.l_of_p, rl[i]);
    r.tilde_b_of_tilde_p = std::fmax(r.tilde_b_of_tilde_p, rb[i]);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Symbols

Vec35 pack(const HX& d) {
  Vec35 v;
  int n = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j)
      v(n++) = i == j ? d.h(i, i) : std::sqrt(2.0) * d.h(i, j);
  for (int k = 0; k < kDim; ++k) v(n++) = d.x(k);
  return v;
}

HX unpack(const Vec35& v) {
  HX d;
  int n = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) {
      const double c = i == j ? v(n) : v(n) / std::sqrt(2.0);
      d.h(i, j) = c;
      d.h(j, i) = c;
      ++n;
    }
  for (int k = 0; k < kDim; ++k) d.x(k) = v(n++);
  return d;
}

Vec symbol_b_xi(double a, const Vec& xi, const HX& d) {
  return (1 + a) * apply(d.h, xi) - (a + 0.5) * trace(d.h) * xi -
         a * v_op(outer(xi, d.x), standard_phi());
}

Vec symbol_tilde_b(const Vec& xi, const HX& d) {
  return apply(d.h, xi) - 0.25 * trace(d.h) * xi +
         0.5 * v_op(outer(xi, d.x), standard_phi());
}

HX symbol_special_rl(double a, const Vec& xi, const HX& d) {
  const Vec b = symbol_b_xi(a, xi, d);
  const double xi2 = dot(xi, xi);
  return {xi2 * d.h - 2.0 * sym(outer(xi, b)),
          xi2 * d.x + v_op(outer(xi, b), standard_phi())};
}

Mat35 symbol_special_rl_matrix(double a, const Vec& xi) {
  Mat35 m;
  for (int n = 0; n < 35; ++n)
    m.col(n) = pack(symbol_special_rl(a, xi, unpack(Vec35::Unit(n))));
  return m;
}

Vec l_symbol(const Vec& xi, const HX& d) {
  return apply(d.h, xi) + 0.5 * v_op(outer(xi, d.x), standard_phi());
}

HX l_star_symbol(const Vec& xi, const Vec& y) {
  return {-1.0 * sym(outer(xi, y)), 0.5 * v_op(outer(xi, y), standard_phi())};
}

HX k_symbol(const Vec& xi, const Vec& y) {
  HX out = l_star_symbol(xi, y);
  out.h += (dot(xi, y) / 7) * identity_mat();
  return out;
}

namespace {

template <class Map>
Matrix7 vector_symbol(Map map) {
  Matrix7 m;
  for (int k = 0; k < kDim; ++k) {
    Vec e;
    e(k) = 1.0;
    const Vec col = map(e);
    for (int i = 0; i < kDim; ++i) m(i, k) = col(i);
  }
  return m;
}

}  // namespace

Matrix7 symbol_llstar(const Vec& xi) {
  return vector_symbol(
      [&](const Vec& y) { return l_symbol(xi, l_star_symbol(xi, y)); });
}

Matrix7 symbol_lk(const Vec& xi) {
  return vector_symbol(
      [&](const Vec& y) { return l_symbol(xi, k_symbol(xi, y)); });
}

int kernel_dimension(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return static_cast<int>(m.cols());
  int k = static_cast<int>(m.cols() - s.size());
  for (int i = 0; i < s.size(); ++i)
    if (s(i) < rel_tol * s(0)) ++k;
  return k;
}

// ---------------------------------------------------------------------------
// Uniqueness system

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RationalMatrix& m) {
  std::vector<int> pivots;
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && m[p][c] == Rational(0)) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    const Rational lead = m[r][c];
    for (auto& x : m[r]) x /= lead;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == Rational(0)) continue;
      const Rational f = m[i][c];
      for (int k = 0; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<Rational> multiply(const RationalMatrix& m,
                               const std::vector<Rational>& v) {
  std::vector<Rational> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t k = 0; k < v.size(); ++k) out[i] += m[i][k] * v[k];
  return out;
}

}  // namespace

UniquenessSolution uniqueness_system_solve() {
  using R = Rational;
  UniquenessSolution s;
  // unknowns (alpha, beta, gamma, delta, epsilon, zeta)
  s.system = {{R(1, 2), R(1), R(-1, 2), R(1, 4), R(0), R(0)},
              {R(0), R(0), R(1), R(1, 2), R(0), R(0)}};

  RationalMatrix red = s.system;
  const std::vector<int> pivots = rref(red);
  const int cols = static_cast<int>(s.system[0].size());
  for (int free = 0; free < cols; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end())
      continue;
    std::vector<R> v(cols);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -red[r][free];
    s.nullspace.push_back(v);
  }

  // alpha = -1, gamma = a, delta = 1 + a, epsilon = -a, zeta = 0, solved
  // for u = (a, beta): x = x0 + M u
  const std::vector<R> x0 = {R(-1), R(0), R(0), R(1), R(0), R(0)};
  const std::vector<R> col_a = {R(0), R(0), R(1), R(1), R(-1), R(0)};
  const std::vector<R> col_b = {R(0), R(1), R(0), R(0), R(0), R(0)};
  const auto sa = multiply(s.system, col_a);
  const auto sb = multiply(s.system, col_b);
  const auto sx = multiply(s.system, x0);
  const R det = sa[0] * sb[1] - sb[0] * sa[1];
  if (det == R(0)) throw std::runtime_error("uniqueness system is singular");
  s.a = (-sx[0] * sb[1] + sb[0] * sx[1]) / det;
  s.beta = (-sa[0] * sx[1] + sx[0] * sa[1]) / det;

  s.spanning = {{R(-2), R(1), R(0), R(0), R(0), R(0)},
                {R(-1), R(0), R(-1, 2), R(1), R(0), R(0)},
                {R(0), R(0), R(0), R(0), R(1), R(0)},
                {R(0), R(0), R(0), R(0), R(0), R(1)}};
  for (const auto& v : s.spanning) {
    R worst = 0;
    for (const R& e : multiply(s.system, v))
      worst = std::max(worst, boost::abs(e));
    s.spanning_residuals.push_back(worst);
  }
  return s;
}

}  // namespace g2forge
