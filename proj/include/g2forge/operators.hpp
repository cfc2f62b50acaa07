#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include "g2forge/jet.hpp"

namespace g2forge {

enum class FunctionalId {
  scal,
  trt2,
  t2,
  ttt,
  tpt,
  vt2,
  hilbert,
  normalized_hilbert
};
inline constexpr std::array<FunctionalId, 8> kAllFunctionals = {
    FunctionalId::scal, FunctionalId::trt2,   FunctionalId::t2,
    FunctionalId::ttt,  FunctionalId::tpt,    FunctionalId::vt2,
    FunctionalId::hilbert, FunctionalId::normalized_hilbert};
std::string to_string(FunctionalId fid);

// Pointwise integrands. hilbert_alt = -(1/3) div VT - |T|^2/2 + |VT|^2/6.
struct DensityVector {
  double scal = 0, t2 = 0, trt2 = 0, ttt = 0, tpt = 0, vt2 = 0, hilbert = 0;
  double hilbert_alt = 0;
  double hilbert_alt_residual = 0;
  double value(FunctionalId fid) const;
};

DensityVector densities(const FrameJet& j);

// First-order torsion quantities and Ricci curvature at a point (frame).
struct TorsionData {
  Mat t;
  double tr_t = 0;
  Vec vt;
  Mat nabla_vt;        // nabla_i (VT)_k
  double div_vt = 0;
  Mat lie_vt_g;        // L_VT g
  Vec div_t;           // nabla_a T_ak
  Vec div_tt;          // nabla_a T_ka
  Vec grad_tr_t;
  Mat t_vt_phi;        // T o (VT _| phi)
  Mat pt;              // P(T)
  Mat ric;
  double scal = 0;
};
TorsionData torsion_data(const FrameJet& j);

// F_pq = R_ijkl phi_ijp phi_klq.
Mat f_tensor(const FrameJet& j);

Mat hat_p1(const FrameJet& j);
Mat p1(const FrameJet& j);
Vec p2(const FrameJet& j);
Mat tilde_p1(const FrameJet& j);

struct GradientPair {
  Mat q1;
  Vec q2;
};

// L2 gradient of the functional: d/dt int f dmu = int <h,q1> + <X,q2> dmu.
// The normalized functional needs the total volume and Hilbert value.
GradientPair gradient(const FrameJet& j, FunctionalId fid, double volume = 1.0,
                      double hilbert_total = 0.0);

struct TraceRelations {
  double hat_p1 = 0;    // tr P^_1 - (2/3 div VT - 2 F)
  double tilde_p1 = 0;  // tr P~_1 - (4/3 div VT - 20/3 (-|T|^2/2 + |VT|^2/6))
  double p1 = 0;        // tr P_1 - (Scal/2 - (tr T)^2/2 + |VT|^2/3 - 2|T|^2)
  double p1_alt = 0;    // tr P_1 - (-div VT + 5/6 |VT|^2 - 5/2 |T|^2)
  double p1_from_tilde = 0;  // max |P_1 - (P~_1 - tr P~_1 g / 4)|
};
TraceRelations trace_relations(const FrameJet& j);

// (-Ric + a L_VT g) diamond phi + ((1 + a) div T - a grad tr T) _| psi as
// its (h, X) parts.
HX special_ricci_like(const FrameJet& j, double a);

enum class FlowVariant { hat, tilde, hat2, tilde2 };
std::string to_string(FlowVariant v);
HX flow_rhs_parts(const FrameJet& j, FlowVariant v);
Form3 flow_rhs(const FrameJet& j, FlowVariant v);

// A deformation and its covariant derivatives at one point (frame).
struct DeformationJet {
  Mat h;
  Vec x;
  Form3 nabla_h;  // nabla_a h_bc
  Mat nabla_x;    // nabla_a X_b
};

Vec l_op(const FrameJet& j, const DeformationJet& d);
Vec tilde_b(const FrameJet& j, const DeformationJet& d);
HX l_star(const FrameJet& j, const Vec& y, const Mat& nabla_y);
HX k_op(const FrameJet& j, const Vec& y, const Mat& nabla_y);

// Whole-field versions. Arguments and results are coordinate components.
TensorField<1> l_op(const JetField& jf, const TensorField<2>& h,
                    const TensorField<1>& x);
TensorField<1> tilde_b(const JetField& jf, const TensorField<2>& h,
                       const TensorField<1>& x);
struct DeformationField {
  TensorField<2> h;
  TensorField<1> x;
};
DeformationField l_star(const JetField& jf, const TensorField<1>& y);
DeformationField k_op(const JetField& jf, const TensorField<1>& y);

// Torsion of the field at a point in frame components without curvature.
FrameJet first_order_jet(const JetField& jf, std::size_t i);

struct BianchiResiduals {
  double l_of_p = 0;             // max |L(P_1, P_2)|
  double tilde_b_of_tilde_p = 0;  // max |B~(P~_1, P_2)|
};
BianchiResiduals bianchi_residuals(const JetField& jf);
// Same, reusing precomputed frame jets.
BianchiResiduals bianchi_residuals(const JetField& jf,
                                   const std::vector<FrameJet>& jets);

// Principal symbols at the standard form, with nabla replaced by xi.
using Mat35 = Eigen::Matrix<double, 35, 35>;
using Vec35 = Eigen::Matrix<double, 35, 1>;
using Matrix7 = Eigen::Matrix<double, 7, 7>;

// Coordinates on pairs (h, X): 28 upper-triangular h entries (off-diagonal
// scaled by sqrt 2, so the pair inner product is Euclidean) then X.
Vec35 pack(const HX& d);
HX unpack(const Vec35& v);

HX symbol_special_rl(double a, const Vec& xi, const HX& d);
Vec symbol_b_xi(double a, const Vec& xi, const HX& d);
Vec symbol_tilde_b(const Vec& xi, const HX& d);
Mat35 symbol_special_rl_matrix(double a, const Vec& xi);
Matrix7 symbol_llstar(const Vec& xi);
Matrix7 symbol_lk(const Vec& xi);

// Symbols of L, L* and K (flat, nabla -> xi).
Vec l_symbol(const Vec& xi, const HX& d);
HX l_star_symbol(const Vec& xi, const Vec& y);
HX k_symbol(const Vec& xi, const Vec& y);

// Kernel dimension by singular values below rel_tol * largest.
int kernel_dimension(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

using Rational = boost::rational<long long>;
using RationalMatrix = std::vector<std::vector<Rational>>;

struct UniquenessSolution {
  RationalMatrix system;        // rows: equations over (alpha..zeta)
  RationalMatrix nullspace;     // basis vectors
  Rational a;
  Rational beta;
  RationalMatrix spanning;      // the four listed spanning vectors
  std::vector<Rational> spanning_residuals;  // max |system * v| per vector
};
UniquenessSolution uniqueness_system_solve();

}  // namespace g2forge
