#include "g2forge/identities.hpp"

#include <algorithm>
#include <cmath>

namespace g2forge {

namespace {

template <int R>
Tensor<R> raise_slot(const Tensor<R>& a, int slot, const Mat& gi) {
  std::size_t stride = 1;
  for (int q = slot + 1; q < R; ++q) stride *= kDim;
  Tensor<R> out;
  for (std::size_t n = 0; n < Tensor<R>::size; ++n) {
    const int k = static_cast<int>((n / stride) % kDim);
    const std::size_t base = n - k * stride;
    double s = 0.0;
    for (int i = 0; i < kDim; ++i) s += a[base + i * stride] * gi(i, k);
    out[n] = s;
  }
  return out;
}

template <int R>
Tensor<R> raise_last(Tensor<R> a, int count, const Mat& gi) {
  for (int s = R - count; s < R; ++s) a = raise_slot(a, s, gi);
  return a;
}

}  // namespace

ContractionIdentities contraction_identities(const Form3& phi, const Form4& psi,
                                             const MetricData& m) {
  const Mat& g = m.g;
  const Mat& gi = m.g_inv;
  ContractionIdentities c;
  c.scale = std::pow(std::max({1.0, g.max_abs(), phi.max_abs(), psi.max_abs()}), 2);
  auto rec = [&](double& slot, double lhs, double rhs) {
    slot = std::fmax(slot, std::fabs(lhs - rhs) / c.scale);
  };

  const Form3 phi1 = raise_last(phi, 1, gi);
  const Form3 phi2 = raise_last(phi, 2, gi);
  const Form3 phi3 = raise_last(phi, 3, gi);
  const Form4 psi1 = raise_last(psi, 1, gi);
  const Form4 psi2 = raise_last(psi, 2, gi);
  const Form4 psi3 = raise_last(psi, 3, gi);
  const Form4 psi4 = raise_last(psi, 4, gi);

  c.phi_phi_0 = dot(phi, phi3);
  c.psi_psi_0 = dot(psi, psi4);

  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double a = 0.0, b = 0.0;
      for (int p = 0; p < kDim; ++p)
        for (int q = 0; q < kDim; ++q) {
          a += phi(i, p, q) * phi2(j, p, q);
          for (int r = 0; r < kDim; ++r) b += psi(i, p, q, r) * psi3(j, p, q, r);
        }
      rec(c.phi_phi_1, a, 6 * g(i, j));
      rec(c.psi_psi_1, b, 24 * g(i, j));
    }

  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double a = 0.0, b = 0.0;
          for (int p = 0; p < kDim; ++p) {
            a += phi(i, j, p) * phi1(k, l, p);
            for (int q = 0; q < kDim; ++q) b += psi(i, j, p, q) * psi2(k, l, p, q);
          }
          const double gg = g(i, k) * g(j, l) - g(i, l) * g(j, k);
          rec(c.phi_phi_2, a, gg - psi(i, j, k, l));
          rec(c.psi_psi_2, b, 4 * gg - 2 * psi(i, j, k, l));
        }

  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b)
          for (int d = 0; d < kDim; ++d) {
            double lhs = 0.0;
            for (int k = 0; k < kDim; ++k) lhs += phi(i, j, k) * psi1(a, b, d, k);
            const double rhs = g(i, a) * phi(j, b, d) + g(i, b) * phi(a, j, d) +
                               g(i, d) * phi(a, b, j) - g(j, a) * phi(i, b, d) -
                               g(j, b) * phi(a, i, d) - g(j, d) * phi(a, b, i);
            rec(c.phi_psi_1, lhs, rhs);
          }

  for (int i = 0; i < kDim; ++i)
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) {
        double lhs = 0.0;
        for (int j = 0; j < kDim; ++j)
          for (int k = 0; k < kDim; ++k) lhs += phi2(i, j, k) * psi(a, b, j, k);
        rec(c.phi_psi_2, lhs, -4 * phi(i, a, b));
      }

  for (int a = 0; a < kDim; ++a) {
    double lhs = 0.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) lhs += phi3(i, j, k) * psi(a, i, j, k);
    rec(c.phi_psi_3, lhs, 0.0);
  }
  return c;
}

double max_residual(const ContractionIdentities& c) {
  return std::max({std::fabs(c.phi_phi_0 - 42) / 42, std::fabs(c.psi_psi_0 - 168) / 168,
                   c.phi_phi_1, c.psi_psi_1, c.phi_phi_2, c.psi_psi_2,
                   c.phi_psi_1, c.phi_psi_2, c.phi_psi_3});
}

}  // namespace g2forge
