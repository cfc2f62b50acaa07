#pragma once

#include <array>

#include "g2forge/errors.hpp"
#include "g2forge/tensor.hpp"

namespace g2forge {

struct MetricData {
  Mat g;
  Mat g_inv;
  double vol_density = 1.0;  // sqrt(det g) against dx^0...dx^6
  int orientation = 1;       // sign of the volume form against dx^0...dx^6
};

// Index bookkeeping for the 35 independent components of 3- and 4-forms.
using Triple = std::array<int, 3>;
using Quad = std::array<int, 4>;
const std::array<Triple, 35>& form3_basis();
const std::array<Quad, 35>& form4_basis();
std::array<double, 35> independent_components(const Form3& a);
Form3 form3_from_components(const std::array<double, 35>& c);
Form4 form4_from_components(const std::array<double, 35>& c);
Form3 antisymmetrize(const Form3& a);

// phi_0 = e123 + e145 + e167 + e246 - e257 - e347 - e356 (1-indexed).
Form3 standard_phi();

MetricData metric_from_phi(const Form3& phi);
MetricData identity_metric(int orientation);

// Orthonormal coframe for a metric: E^T g E = 1, built from the Cholesky
// factor. All tensors handled here are covariant.
class Frame {
 public:
  explicit Frame(const MetricData& m);
  template <int R>
  Tensor<R> to_frame(const Tensor<R>& a) const;
  template <int R>
  Tensor<R> to_coords(const Tensor<R>& a) const;
  const Mat& e() const { return e_; }

 private:
  Mat e_;  // e_(i, a)
  Mat f_;  // inverse, f_(a, i)
};

template <int R>
Tensor<R> transform_indices(const Tensor<R>& a, const Mat& m);

template <int R>
Tensor<R> Frame::to_frame(const Tensor<R>& a) const {
  return transform_indices(a, e_);
}
template <int R>
Tensor<R> Frame::to_coords(const Tensor<R>& a) const {
  return transform_indices(a, f_);
}

// Hodge star of 3- and 4-forms.
Form4 hodge_dual(const Form3& phi, const MetricData& m);
Form3 hodge_dual(const Form4& psi, const MetricData& m);
// Orthonormal-frame versions; the volume form is orientation * e^0...e^6.
Form4 hodge_dual(const Form3& phi, int orientation);
Form3 hodge_dual(const Form4& psi, int orientation);

// (A . phi)(u, v, w) = phi(A^-1 u, A^-1 v, A^-1 w).
Form3 transport(const Mat& a, const Form3& phi);

// Overloads without MetricData assume an orthonormal frame.
Form3 diamond(const Mat& h, const Form3& phi);
Form3 diamond(const Mat& h, const Form3& phi, const MetricData& m);
Form3 contract_psi(const Vec& x, const Form4& psi);
Form3 contract_psi(const Vec& x, const Form4& psi, const MetricData& m);

struct HX {
  Mat h;
  Vec x;
};
HX decompose_3form(const Form3& omega, const Form3& phi, const Form4& psi,
                   const MetricData& m);

struct TwoFormSplit {
  Mat alpha7;
  Mat alpha14;
};
TwoFormSplit proj_2form(const Mat& alpha, const Form4& psi);
TwoFormSplit proj_2form(const Mat& alpha, const Form4& psi,
                        const MetricData& m);

Vec v_op(const Mat& alpha, const Form3& phi);
Vec v_op(const Mat& alpha, const Form3& phi, const MetricData& m);
Mat p_op(const Mat& eta, const Form4& psi);
Mat p_op(const Mat& eta, const Form4& psi, const MetricData& m);

// curl(A)_{i1..ik} = nabla_a A_{b i1..i(k-1)} phi_{ab ik}; the argument is
// the covariant derivative with the derivative index first.
Vec curl(const Mat& nabla_a, const Form3& phi);
Mat curl(const Form3& nabla_a, const Form3& phi);
Vec curl(const Mat& nabla_a, const Form3& phi, const MetricData& m);
Mat curl(const Form3& nabla_a, const Form3& phi, const MetricData& m);

// Metric inner product of covariant tensors (full contraction, no 1/k!).
template <int R>
double inner(const Tensor<R>& a, const Tensor<R>& b, const MetricData& m) {
  Frame f(m);
  return dot(f.to_frame(a), f.to_frame(b));
}

// Inner product of 3-forms expressed through their (h, X) parts:
// (54/7) tr h tr w + 12 <h0, w0> + 24 <X, Y> (orthonormal frame).
double form3_inner_from_parts(const HX& a, const HX& b);
// <(h,X), (w,Y)> = <h,w> + <X,Y> (orthonormal frame).
double pair_inner(const HX& a, const HX& b);

// Orthonormal-frame matrix helpers.
Mat transpose(const Mat& a);
Mat sym(const Mat& a);
Mat compose(const Mat& a, const Mat& b);
double trace(const Mat& a);
Mat outer(const Vec& a, const Vec& b);
Vec apply(const Mat& a, const Vec& v);             // a_ij v_j
Vec apply_transposed(const Mat& a, const Vec& v);  // a_ji v_j
Mat interior(const Vec& v, const Form3& phi);      // v_m phi_mij
Mat circled_circ(const Mat& t, const Form3& phi);  // t_im t_jn phi_ijp phi_mnq
Mat trace_free(const Mat& a);

}  // namespace g2forge
