#pragma once

#include "g2forge/core.hpp"

namespace g2forge {

// Contraction identities of a G2-structure in coordinates, indices raised
// with g^-1. Residuals are max |lhs - rhs| divided by
// max(1, |g|, |phi|, |psi|)^2.
struct ContractionIdentities {
  double phi_phi_0 = 0;  // phi_ijk phi^ijk, 42
  double psi_psi_0 = 0;  // psi_ijkl psi^ijkl, 168
  double phi_phi_1 = 0;  // phi_ipq phi_j^pq = 6 g_ij
  double psi_psi_1 = 0;  // psi_ipqr psi_j^pqr = 24 g_ij
  double phi_phi_2 = 0;  // phi_ijp phi_kl^p = g_ik g_jl - g_il g_jk - psi_ijkl
  double psi_psi_2 = 0;  // psi_ijpq psi_kl^pq = 4 (g_ik g_jl - g_il g_jk) - 2 psi_ijkl
  double phi_psi_1 = 0;  // phi_ijk psi_abc^k = six g phi terms
  double phi_psi_2 = 0;  // phi_i^jk psi_abjk = -4 phi_iab
  double phi_psi_3 = 0;  // phi^ijk psi_aijk = 0
  double scale = 1;
};

ContractionIdentities contraction_identities(const Form3& phi, const Form4& psi,
                                             const MetricData& m);

// Largest residual, with the two full contractions as relative errors.
double max_residual(const ContractionIdentities& c);

}  // namespace g2forge
