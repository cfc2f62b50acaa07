#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "g2forge/jet.hpp"
#include "g2forge/operators.hpp"
#include "g2forge/random.hpp"

namespace g2forge {

// A deformation (h, X) of a sampled field, coordinate components. The
// 3-form direction at each point is h diamond phi + X _| psi.
struct Deformation {
  TensorField<2> h;
  TensorField<1> x;

  std::size_t size() const { return h.size(); }
  Deformation& operator+=(const Deformation& o);
  Deformation& operator-=(const Deformation& o);
  Deformation& operator*=(double s);
  friend Deformation operator+(Deformation a, const Deformation& b) {
    return a += b;
  }
  friend Deformation operator-(Deformation a, const Deformation& b) {
    return a -= b;
  }
  friend Deformation operator*(double s, Deformation a) { return a *= s; }
};

Deformation zero_deformation(std::size_t n);

// Random symmetric h and X built from cos/sin modes with integer
// wavenumbers |k| <= max_mode along each active axis (constant term
// included). Coefficients are N(0, amplitude^2).
Deformation random_deformation(const Grid& grid, Rng& rng, double amplitude,
                               int max_mode = 2);

// The 3-form field h diamond phi + X _| psi.
TensorField<3> direction(const G2Field& field, const Deformation& d);
// phi + t * direction.
G2Field displaced(const G2Field& field, const TensorField<3>& omega,
                  double t);

// Integral of h.a + x.b against the field's measure (metric contractions).
double l2_pairing(const G2Field& field, const Deformation& a,
                  const Deformation& b);

// Quadrature of the functional densities; the normalized Hilbert value
// divides by Vol^(5/7).
double evaluate(const G2Field& field, FunctionalId fid);
std::array<double, 8> evaluate_all(const G2Field& field);
std::array<double, 8> evaluate_all(const JetField& jf,
                                   const std::vector<FrameJet>& jets);

struct VariationCheck {
  double fd_value = 0;
  double pairing_value = 0;
  double rel_err = 0;  // absolute difference when both are below 1e-12
  double eta = 0;      // accepted step
};

double relative_error(double a, double b);

// Central differences with Richardson pairs over eta = 1e-2, 5e-3, ...,
// accepted once two successive extrapolations agree to 1e-7 relative.
VariationCheck first_variation_fd(const G2Field& field, const Deformation& d,
                                  FunctionalId fid);
std::array<VariationCheck, 8> first_variation_fd_all(const G2Field& field,
                                                     const Deformation& d);

// Integral of <h, Q1> + <X, Q2> for the functional's gradient.
double gradient_pairing(const JetField& jf, const std::vector<FrameJet>& jets,
                        const Deformation& d, FunctionalId fid);

// Grid max of d/dt F - (<h, P^_1> + <X, P_2> + div A), F the pointwise
// Hilbert density and
// A = -1/3 grad tr h + 1/3 div h - 2/3 V(h o T) - 2/3 T(X) - 1/3 tr T X.
double lagrangian_variation_residual(const G2Field& field,
                                     const Deformation& d);

// The divergence term A of the pointwise identity (coordinates).
TensorField<1> lagrangian_divergence_term(const JetField& jf,
                                          const Deformation& d);

struct Split {
  Deformation conformal;
  Deformation diffeo;
  Deformation tt;
};

// Conformal + image of K + (ker L with zero trace), computed per Fourier
// mode on a constant carrier. Zero and Nyquist modes put their trace part
// in the conformal piece and the rest in the TT piece.
Split split_deformation(const G2Field& field, const Deformation& d);

struct SecondVariationCheck {
  double fd_hessian = 0;
  double k_pairing = 0;
  double rel_err = 0;
  double eta = 0;
};

// Mixed central difference of the normalized Hilbert functional against
// int <K1(h, X), w> + <K2(h, X), Y> at a flat carrier, with
// K1 = Lap h - 2/3 L_B g + 1/3 (-Lap tr h + div div h) g,
// K2 = Lap X + 2/3 curl B, B = div h - 1/4 grad tr h + 1/2 curl X.
SecondVariationCheck second_variation_fd(const G2Field& field,
                                         const Deformation& d1,
                                         const Deformation& d2);
double k_pairing(const G2Field& field, const Deformation& d1,
                 const Deformation& d2);

// int ((12/25)|grad v|^2 + (1/5) tr P_1 v^2) dmu.
double conformal_energy(const G2Field& field, const ScalarField& v);

struct ConformalCrossCheck {
  double energy = 0;
  double direct = 0;         // Hilbert functional of v^(6/5) phi on the grid
  double torsion_change = 0;  // int e^{5f} F(T + grad f _| phi) dmu, no div term
};
ConformalCrossCheck conformal_cross_check(const G2Field& field,
                                          const ScalarField& v);

enum class Quantity { scal, ric, lie_vt_g, div_t, grad_tr_t, vt, torsion };
inline constexpr std::array<Quantity, 7> kAllQuantities = {
    Quantity::scal,      Quantity::ric, Quantity::lie_vt_g, Quantity::div_t,
    Quantity::grad_tr_t, Quantity::vt,  Quantity::torsion};
std::string to_string(Quantity q);

struct LinearizationCheck {
  std::vector<double> fd_field;       // flattened coordinate components
  std::vector<double> formula_field;
  double max_err = 0;
  double scale = 0;  // max |formula_field|
};

LinearizationCheck linearize_quantity(const G2Field& field,
                                      const Deformation& d, Quantity q);

// Flat Fourier checks of the static / torsion-free equivalence for TT
// single modes and of int |curl h|^2 = -int <Lap h, h> for trace-free,
// divergence-free h.
struct StaticModeSweep {
  int modes = 0;
  int mismatches = 0;          // modes where the two conditions disagree
  double curl_identity = 0;    // max relative error
};
StaticModeSweep static_mode_sweep(int max_mode, std::uint64_t seed);

}  // namespace g2forge
