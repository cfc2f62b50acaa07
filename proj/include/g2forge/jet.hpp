#pragma once

#include <array>
#include <vector>

#include "g2forge/core.hpp"
#include "g2forge/field.hpp"

namespace g2forge {

// Differential data of a G2-structure at one point, in coordinate
// components. gamma(k, i, j) = Gamma^k_ij; nabla_t(i, j, k) = nabla_i T_jk;
// rm(i, j, k, l) = R_ijkl with R_ijk^l = d_i Gamma^l_jk - d_j Gamma^l_ik +
// Gamma^m_jk Gamma^l_im - Gamma^m_ik Gamma^l_jm and R_ijkl = R_ijk^m g_ml,
// so that Ric_jk = R_ajka is positive on spheres.
struct G2Jet {
  Form3 phi;
  Form4 psi;
  MetricData m;
  Form3 gamma;
  Mat t;
  Form3 nabla_t;
  Form4 rm;
  std::array<int, 2> point{0, 0};
};

// The same data in an orthonormal coframe, where every contraction is
// Euclidean. Pointwise operators consume this form.
struct FrameJet {
  Form3 phi;
  Form4 psi;
  Mat t;
  Form3 nabla_t;
  Form4 rm;
  int orientation = 1;
};

FrameJet to_frame(const G2Jet& j);

// Algebraic nearly-G2 data at the standard form: T = c g, nabla T = 0,
// R_ijkl = -c^2 (g_ik g_jl - g_il g_jk).
G2Jet synthetic_nearly_g2_jet(double c);

// Geometry of a sampled field: per-point frames, Christoffel symbols and
// torsion, with jets assembled on demand from finite differences.
class JetField {
 public:
  explicit JetField(G2Field field);

  const G2Field& field() const { return field_; }
  const Grid& grid() const { return field_.grid(); }
  std::size_t size() const { return field_.size(); }
  const MetricData& metric(std::size_t i) const { return field_.metric(i); }
  const Frame& frame(std::size_t i) const { return frames_[i]; }
  const Form3& gamma(std::size_t i) const { return gamma_[i]; }
  const Mat& torsion(std::size_t i) const { return torsion_[i]; }
  const TensorField<2>& torsion() const { return torsion_; }
  Form4 psi(std::size_t i) const;

  G2Jet jet(std::size_t i) const;
  FrameJet frame_jet(std::size_t i) const { return to_frame(jet(i)); }

  // nabla_p A_{i...} in coordinates, derivative index first.
  template <int R>
  Tensor<R + 1> covariant_derivative(const TensorField<R>& a,
                                     std::size_t i) const;
  // Same, transformed to the orthonormal frame at i.
  template <int R>
  Tensor<R + 1> frame_covariant_derivative(const TensorField<R>& a,
                                           std::size_t i) const {
    return frames_[i].to_frame(covariant_derivative(a, i));
  }

 private:
  Form4 nabla_phi(std::size_t i) const;

  G2Field field_;
  std::vector<Frame> frames_;
  TensorField<2> g_;
  TensorField<3> gamma_;
  TensorField<2> torsion_;
};

G2Jet jet_at(const G2Field& field, std::size_t point);

// max_k |nabla_i T_jk - nabla_j T_ik - (T_ia T_jb + R_ijab / 2) phi_abk|.
double g2_bianchi_residual(const G2Jet& j);

// Curvature quantities from Rm next to their torsion-side expressions.
struct CurvatureCheck {
  double scal = 0.0;     // from Rm
  Mat ric;               // from Rm (frame components)
  Mat f;                 // F_jk = R_abcd phi_abj phi_cdk (frame components)
  double scal_from_torsion = 0.0;
  Mat ric_from_torsion;
  Mat f_from_torsion;
  double scal_residual = 0.0;
  double ric_residual = 0.0;
  double f_residual = 0.0;
  double div_tt_residual = 0.0;       // div T^t - grad tr T - T(VT)
  double nabla_t_psi_residual = 0.0;  // <nabla T, psi> identity
  double scalar_torsion_residual = 0.0;
};

CurvatureCheck curvature_from_torsion(const FrameJet& j);

// nabla_i (VT)_k = nabla_i T_ab phi_abk + T_ab T_il psi_labk (frame).
Mat nabla_vt(const FrameJet& j);

// L_V phi by finite differences of the coordinate components; v is a
// 1-form in coordinates.
TensorField<3> lie_derivative_fd(const JetField& jf, const TensorField<1>& v);

// 1/2 L_V g diamond phi + (-1/2 curl V + V _| T) _| psi minus the
// finite-difference L_V phi, max over the grid; v in coordinates.
double lie_derivative_residual(const JetField& jf, const TensorField<1>& v);

}  // namespace g2forge
