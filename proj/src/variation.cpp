#include "g2forge/variation.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "g2forge/parallel.hpp"

namespace g2forge {

Deformation& Deformation::operator+=(const Deformation& o) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] += o.h[i];
    x[i] += o.x[i];
  }
  return *this;
}

Deformation& Deformation::operator-=(const Deformation& o) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] -= o.h[i];
    x[i] -= o.x[i];
  }
  return *this;
}

Deformation& Deformation::operator*=(double s) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] *= s;
    x[i] *= s;
  }
  return *this;
}

Deformation zero_deformation(std::size_t n) {
  return {TensorField<2>(n), TensorField<1>(n)};
}

Deformation random_deformation(const Grid& grid, Rng& rng, double amplitude,
                               int max_mode) {
  std::vector<std::array<int, 2>> modes;
  if (grid.active_count() == 0) {
    modes.push_back({0, 0});
  } else if (grid.active_count() == 1) {
    for (int k = 0; k <= max_mode; ++k) modes.push_back({k, 0});
  } else {
    for (int k0 = 0; k0 <= max_mode; ++k0)
      for (int k1 = -max_mode; k1 <= max_mode; ++k1)
        if (k0 > 0 || k1 >= 0) modes.push_back({k0, k1});
  }
  Deformation d = zero_deformation(grid.size());
  for (const auto& m : modes) {
    Mat hc, hs;
    Vec xc, xs;
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        hc(i, j) = hc(j, i) = amplitude * rng.normal();
        hs(i, j) = hs(j, i) = amplitude * rng.normal();
      }
    for (int k = 0; k < kDim; ++k) {
      xc(k) = amplitude * rng.normal();
      xs(k) = amplitude * rng.normal();
    }
    const bool constant = m[0] == 0 && m[1] == 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double theta = 0.0;
      for (int s = 0; s < grid.active_count(); ++s)
        theta += 2 * std::numbers::pi * m[s] * grid.coordinate(i, s) /
                 grid.periods()[s];
      const double c = std::cos(theta);
      const double sn = constant ? 0.0 : std::sin(theta);
      d.h[i].add_scaled(c, hc);
      d.h[i].add_scaled(sn, hs);
      d.x[i].add_scaled(c, xc);
      d.x[i].add_scaled(sn, xs);
    }
  }
  for (auto& h : d.h) h.set_symmetry(Symmetry::symmetric);
  return d;
}

TensorField<3> direction(const G2Field& field, const Deformation& d) {
  TensorField<3> omega(field.size());
  parallel_for(field.size(), [&](std::size_t i) {
    const MetricData& m = field.metric(i);
    const Form4 psi = hodge_dual(field.phi(i), m);
    omega[i] = diamond(d.h[i], field.phi(i), m) + contract_psi(d.x[i], psi, m);
  });
  return omega;
}

G2Field displaced(const G2Field& field, const TensorField<3>& omega,
                  double t) {
  TensorField<3> phi = field.phi();
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i].add_scaled(t, omega[i]);
  return G2Field(field.grid(), std::move(phi));
}

double l2_pairing(const G2Field& field, const Deformation& a,
                  const Deformation& b) {
  ScalarField dens(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Frame f(field.metric(i));
    dens[i] = (dot(f.to_frame(a.h[i]), f.to_frame(b.h[i])) +
               dot(f.to_frame(a.x[i]), f.to_frame(b.x[i]))) *
              field.metric(i).vol_density;
  }
  return integrate(field.grid(), dens);
}

namespace {

std::vector<FrameJet> frame_jets(const JetField& jf) {
  std::vector<FrameJet> jets(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) { jets[i] = jf.frame_jet(i); });
  return jets;
}

constexpr std::size_t kNormalized = 7;

}  // namespace

std::array<double, 8> evaluate_all(const JetField& jf,
                                   const std::vector<FrameJet>& jets) {
  std::array<ScalarField, 7> dens;
  for (auto& v : dens) v.resize(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) {
    const DensityVector d = densities(jets[i]);
    const double mu = jf.metric(i).vol_density;
    for (std::size_t f = 0; f < 7; ++f)
      dens[f][i] = d.value(kAllFunctionals[f]) * mu;
  });
  std::array<double, 8> out{};
  for (std::size_t f = 0; f < 7; ++f) out[f] = integrate(jf.grid(), dens[f]);
  out[kNormalized] = out[6] / std::pow(jf.field().volume(), 5.0 / 7);
  return out;
}

std::array<double, 8> evaluate_all(const G2Field& field) {
  const JetField jf(field);
  return evaluate_all(jf, frame_jets(jf));
}

double evaluate(const G2Field& field, FunctionalId fid) {
  return evaluate_all(field)[static_cast<std::size_t>(fid)];
}

double relative_error(double a, double b) {
  const double scale = std::fmax(std::fabs(a), std::fabs(b));
  if (scale < 1e-12) return std::fabs(a - b);
  return std::fabs(a - b) / scale;
}

double gradient_pairing(const JetField& jf, const std::vector<FrameJet>& jets,
                        const Deformation& d, FunctionalId fid) {
  double volume = 1.0, hilbert_total = 0.0;
  if (fid == FunctionalId::normalized_hilbert) {
    volume = jf.field().volume();
    hilbert_total = evaluate_all(jf, jets)[6];
  }
  ScalarField dens(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const GradientPair q = gradient(jets[i], fid, volume, hilbert_total);
    dens[i] = (dot(f.to_frame(d.h[i]), q.q1) + dot(f.to_frame(d.x[i]), q.q2)) *
              jf.metric(i).vol_density;
  });
  return integrate(jf.grid(), dens);
}

namespace {

constexpr double kEtaMax = 1e-2;
constexpr double kEtaMin = 1e-7;
constexpr double kRichardsonTol = 1e-7;
constexpr double kRichardsonFloor = 1e-12;

// Richardson-stabilized limit of a difference quotient family D(eta) with
// even error expansion: (4D(e/2) - D(e))/3 and (4D(e/4) - D(e/2))/3 must
// agree. Steps whose displaced forms leave the positivity cone are skipped.
struct RichardsonResult {
  std::vector<double> value;
  std::vector<double> eta;
};

using Quotient = std::function<std::vector<double>(double)>;
// accept(r1, r2, eta) consumes one level of extrapolations and returns
// true when nothing is left to resolve.
using Acceptor = std::function<bool(const std::vector<double>&,
                                    const std::vector<double>&, double)>;

void richardson_loop(const Quotient& quotient, const Acceptor& accept,
                     const std::string& what) {
  std::vector<double> d0, d1, d2;
  bool have = false;
  for (double eta = kEtaMax; eta >= kEtaMin; eta /= 2) {
    try {
      if (have) {
        d0 = std::move(d1);
        d1 = std::move(d2);
        d2 = quotient(eta / 4);
      } else {
        d0 = quotient(eta);
        d1 = quotient(eta / 2);
        d2 = quotient(eta / 4);
        have = true;
      }
    } catch (const NotAG2Structure&) {
      have = false;
      continue;
    }
    std::vector<double> r1(d0.size()), r2(d0.size());
    for (std::size_t k = 0; k < d0.size(); ++k) {
      r1[k] = (4 * d1[k] - d0[k]) / 3;
      r2[k] = (4 * d2[k] - d1[k]) / 3;
    }
    if (accept(r1, r2, eta)) return;
  }
  throw StepUnderflow(what + ": no Richardson-consistent step in [1e-7, 1e-2]");
}

bool consistent(double diff, double scale) {
  return diff <= kRichardsonTol * scale + kRichardsonFloor;
}

// Each quantity accepted on its own.
RichardsonResult richardson(const Quotient& quotient, std::size_t count,
                            const std::string& what) {
  RichardsonResult r{std::vector<double>(count, 0.0),
                     std::vector<double>(count, 0.0)};
  std::vector<bool> done(count, false);
  std::size_t remaining = count;
  richardson_loop(
      quotient,
      [&](const std::vector<double>& r1, const std::vector<double>& r2,
          double eta) {
        for (std::size_t k = 0; k < count; ++k) {
          if (done[k]) continue;
          const double scale = std::fmax(std::fabs(r1[k]), std::fabs(r2[k]));
          if (consistent(std::fabs(r1[k] - r2[k]), scale)) {
            r.value[k] = r2[k];
            r.eta[k] = eta;
            done[k] = true;
            --remaining;
          }
        }
        return remaining == 0;
      },
      what);
  return r;
}

// A whole field accepted at once, in the grid max norm.
RichardsonResult richardson_field(const Quotient& quotient,
                                  const std::string& what) {
  RichardsonResult r;
  richardson_loop(
      quotient,
      [&](const std::vector<double>& r1, const std::vector<double>& r2,
          double eta) {
        double diff = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < r1.size(); ++k) {
          diff = std::fmax(diff, std::fabs(r1[k] - r2[k]));
          scale = std::fmax(scale, std::fmax(std::fabs(r1[k]), std::fabs(r2[k])));
        }
        if (!consistent(diff, scale)) return false;
        r.value = r2;
        r.eta = {eta};
        return true;
      },
      what);
  return r;
}

}  // namespace

std::array<VariationCheck, 8> first_variation_fd_all(const G2Field& field,
                                                     const Deformation& d) {
  const TensorField<3> omega = direction(field, d);
  const JetField jf(field);
  const std::vector<FrameJet> jets = frame_jets(jf);
  auto quotient = [&](double t) {
    const auto plus = evaluate_all(displaced(field, omega, t));
    const auto minus = evaluate_all(displaced(field, omega, -t));
    std::vector<double> q(8);
    for (std::size_t f = 0; f < 8; ++f) q[f] = (plus[f] - minus[f]) / (2 * t);
    return q;
  };
  const RichardsonResult fd = richardson(quotient, 8, "first_variation_fd");
  std::array<VariationCheck, 8> out;
  for (std::size_t f = 0; f < 8; ++f) {
    out[f].fd_value = fd.value[f];
    out[f].eta = fd.eta[f];
    out[f].pairing_value = gradient_pairing(jf, jets, d, kAllFunctionals[f]);
    out[f].rel_err = relative_error(out[f].fd_value, out[f].pairing_value);
  }
  return out;
}

VariationCheck first_variation_fd(const G2Field& field, const Deformation& d,
                                  FunctionalId fid) {
  return first_variation_fd_all(field, d)[static_cast<std::size_t>(fid)];
}

TensorField<1> lagrangian_divergence_term(const JetField& jf,
                                          const Deformation& d) {
  TensorField<1> a(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const Form3 phi = f.to_frame(jf.field().phi(i));
    const Mat t = f.to_frame(jf.torsion(i));
    const Mat h = f.to_frame(d.h[i]);
    const Vec x = f.to_frame(d.x[i]);
    const Form3 nh = jf.frame_covariant_derivative(d.h, i);
    Vec grad_tr, div;
    for (int k = 0; k < kDim; ++k)
      for (int c = 0; c < kDim; ++c) {
        grad_tr(k) += nh(k, c, c);
        div(k) += nh(c, c, k);
      }
    const Vec v = -(1.0 / 3) * grad_tr + (1.0 / 3) * div -
                  (2.0 / 3) * v_op(compose(h, t), phi) -
                  (2.0 / 3) * apply(t, x) - (trace(t) / 3) * x;
    a[i] = f.to_coords(v);
  });
  return a;
}

double lagrangian_variation_residual(const G2Field& field,
                                     const Deformation& d) {
  const TensorField<3> omega = direction(field, d);
  auto density = [&](double t) {
    const JetField jf(displaced(field, omega, t));
    std::vector<double> out(jf.size());
    parallel_for(jf.size(), [&](std::size_t i) {
      out[i] = densities(jf.frame_jet(i)).hilbert;
    });
    return out;
  };
  auto quotient = [&](double t) {
    const auto plus = density(t), minus = density(-t);
    std::vector<double> q(plus.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = (plus[i] - minus[i]) / (2 * t);
    return q;
  };
  const RichardsonResult fd =
      richardson_field(quotient, "lagrangian_variation_residual");

  const JetField jf(field);
  const TensorField<1> a = lagrangian_divergence_term(jf, d);
  std::vector<double> res(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const FrameJet j = jf.frame_jet(i);
    const double div_a = trace(jf.frame_covariant_derivative(a, i));
    const double rhs = dot(f.to_frame(d.h[i]), hat_p1(j)) +
                       dot(f.to_frame(d.x[i]), p2(j)) + div_a;
    res[i] = std::fabs(fd.value[i] - rhs);
  });
  double worst = 0.0;
  for (double r : res) worst = std::fmax(worst, r);
  return worst;
}

// ---------------------------------------------------------------------------
// Flat carriers

namespace {

void require_flat(const G2Field& field, const char* what) {
  if (!field.is_constant())
    throw NonFlatCarrier(std::string(what) + ": carrier field is not constant");
}

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

// In-place multidimensional FFT over the grid's row-major layout.
void fft(const Grid& grid, Spectrum& data, bool inverse) {
  Eigen::FFT<double> engine;
  const auto& shape = grid.shape();
  auto run = [&](std::vector<Complex>& line) {
    std::vector<Complex> out;
    if (inverse)
      engine.inv(out, line);
    else
      engine.fwd(out, line);
    line = std::move(out);
  };
  if (grid.active_count() == 1) {
    run(data);
  } else if (grid.active_count() == 2) {
    const int n0 = shape[0], n1 = shape[1];
    std::vector<Complex> line(n1);
    for (int r = 0; r < n0; ++r) {
      for (int c = 0; c < n1; ++c) line[c] = data[r * n1 + c];
      run(line);
      for (int c = 0; c < n1; ++c) data[r * n1 + c] = line[c];
    }
    line.resize(n0);
    for (int c = 0; c < n1; ++c) {
      for (int r = 0; r < n0; ++r) line[r] = data[r * n1 + c];
      run(line);
      for (int r = 0; r < n0; ++r) data[r * n1 + c] = line[r];
    }
  }
}

// Discrete symbol covector of the Fourier mode at flat index n, in frame
// components of the constant carrier.
Vec mode_covector(const Grid& grid, const Frame& frame, std::size_t n) {
  const auto idx = grid.multi_index(n);
  Vec xi;
  for (int s = 0; s < grid.active_count(); ++s)
    xi(grid.axes()[s]) = grid.symbol(s, grid.wavenumber(s, idx[s]));
  return frame.to_frame(xi);
}

// K_xi (L_xi K_xi)^-1 L_xi applied to a frame pair.
HX diffeo_projection(const Vec& xi, const HX& d) {
  const Matrix7 lk = symbol_lk(xi);
  const Vec l = l_symbol(xi, d);
  Eigen::Matrix<double, 7, 1> rhs;
  for (int k = 0; k < kDim; ++k) rhs(k) = l(k);
  const Eigen::Matrix<double, 7, 1> y = lk.partialPivLu().solve(rhs);
  Vec v;
  for (int k = 0; k < kDim; ++k) v(k) = y(k);
  return k_symbol(xi, v);
}

}  // namespace

Split split_deformation(const G2Field& field, const Deformation& d) {
  require_flat(field, "split_deformation");
  const Frame frame(field.metric(0));
  if ((frame.to_frame(field.phi(0)) - standard_phi()).max_abs() > 1e-10)
    throw std::invalid_argument(
        "split_deformation: carrier frame form is not the standard form");
  const Grid& grid = field.grid();
  const std::size_t n = field.size();

  Split out{zero_deformation(n), zero_deformation(n), zero_deformation(n)};
  // frame components of the trace-free part: 49 h entries then 7 X entries
  std::vector<Spectrum> spec(56, Spectrum(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Mat h = frame.to_frame(d.h[i]);
    const Vec x = frame.to_frame(d.x[i]);
    const double tr = trace(h);
    out.conformal.h[i] = frame.to_coords(Mat((tr / 7) * identity_mat()));
    const Mat h0 = trace_free(h);
    for (int c = 0; c < 49; ++c) spec[c][i] = h0[c];
    for (int c = 0; c < 7; ++c) spec[49 + c][i] = x[c];
  }
  for (auto& s : spec) fft(grid, s, false);

  std::vector<Spectrum> diffeo(56, Spectrum(n));
  for (std::size_t m = 0; m < n; ++m) {
    const Vec xi = mode_covector(grid, frame, m);
    if (norm(xi) < 1e-12) continue;
    for (int part = 0; part < 2; ++part) {
      HX p;
      for (int c = 0; c < 49; ++c)
        p.h[c] = part == 0 ? spec[c][m].real() : spec[c][m].imag();
      for (int c = 0; c < 7; ++c)
        p.x[c] = part == 0 ? spec[49 + c][m].real() : spec[49 + c][m].imag();
      const HX q = diffeo_projection(xi, p);
      const Complex unit = part == 0 ? Complex(1, 0) : Complex(0, 1);
      for (int c = 0; c < 49; ++c) diffeo[c][m] += unit * q.h[c];
      for (int c = 0; c < 7; ++c) diffeo[49 + c][m] += unit * q.x[c];
    }
  }
  for (auto& s : diffeo) fft(grid, s, true);

  for (std::size_t i = 0; i < n; ++i) {
    Mat h;
    Vec x;
    for (int c = 0; c < 49; ++c) h[c] = diffeo[c][i].real();
    for (int c = 0; c < 7; ++c) x[c] = diffeo[49 + c][i].real();
    h = sym(h);
    out.diffeo.h[i] = frame.to_coords(h);
    out.diffeo.x[i] = frame.to_coords(x);
    out.tt.h[i] = d.h[i] - out.conformal.h[i] - out.diffeo.h[i];
    out.tt.x[i] = d.x[i] - out.diffeo.x[i];
  }
  return out;
}

namespace {

// First and second covariant derivatives of a deformation in frame
// components; on a constant carrier they are plain partial derivatives.
struct FlatJets {
  std::vector<Mat> h;
  std::vector<Vec> x;
  std::vector<Form3> nh;   // nabla_a h_bc
  std::vector<Mat> nx;     // nabla_a X_b
  std::vector<Form4> nnh;  // nabla_a nabla_b h_cd
  std::vector<Form3> nnx;  // nabla_a nabla_b X_c
};

FlatJets flat_jets(const JetField& jf, const Deformation& d) {
  const std::size_t n = jf.size();
  TensorField<3> nh_c(n);
  TensorField<2> nx_c(n);
  parallel_for(n, [&](std::size_t i) {
    nh_c[i] = jf.covariant_derivative(d.h, i);
    nx_c[i] = jf.covariant_derivative(d.x, i);
  });
  FlatJets fj{std::vector<Mat>(n),   std::vector<Vec>(n),
              std::vector<Form3>(n), std::vector<Mat>(n),
              std::vector<Form4>(n), std::vector<Form3>(n)};
  parallel_for(n, [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    fj.h[i] = f.to_frame(d.h[i]);
    fj.x[i] = f.to_frame(d.x[i]);
    fj.nh[i] = f.to_frame(nh_c[i]);
    fj.nx[i] = f.to_frame(nx_c[i]);
    fj.nnh[i] = jf.frame_covariant_derivative(nh_c, i);
    fj.nnx[i] = jf.frame_covariant_derivative(nx_c, i);
  });
  return fj;
}

struct PointDerivs {
  Mat lap_h;
  Vec lap_x;
  double lap_tr = 0, div_div = 0;
  Vec div_h, grad_tr, curl_x, div_x_grad;
  Mat nabla_div_h;   // nabla_m (div h)_k
  Mat hess_tr;       // nabla_m nabla_k tr h
  Mat nabla_curl_x;  // nabla_m (curl X)_k
  Mat nabla_x;
};

PointDerivs point_derivs(const FlatJets& fj, std::size_t i,
                         const Form3& phi) {
  PointDerivs p;
  const Form4& nnh = fj.nnh[i];
  const Form3& nnx = fj.nnx[i];
  const Form3& nh = fj.nh[i];
  p.nabla_x = fj.nx[i];
  for (int c = 0; c < kDim; ++c)
    for (int e = 0; e < kDim; ++e)
      for (int a = 0; a < kDim; ++a) p.lap_h(c, e) += nnh(a, a, c, e);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      p.lap_tr += nnh(a, a, b, b);
      p.div_div += nnh(a, b, a, b);
    }
  for (int k = 0; k < kDim; ++k)
    for (int a = 0; a < kDim; ++a) {
      p.lap_x(k) += nnx(a, a, k);
      p.div_h(k) += nh(a, a, k);
      p.grad_tr(k) += nh(k, a, a);
      p.div_x_grad(k) += nnx(k, a, a);
    }
  p.curl_x = curl(fj.nx[i], phi);
  for (int m = 0; m < kDim; ++m)
    for (int k = 0; k < kDim; ++k)
      for (int a = 0; a < kDim; ++a) {
        p.nabla_div_h(m, k) += nnh(m, a, a, k);
        p.hess_tr(m, k) += nnh(m, k, a, a);
        for (int b = 0; b < kDim; ++b)
          p.nabla_curl_x(m, k) += nnx(m, a, b) * phi(a, b, k);
      }
  return p;
}

Mat lie_g(const Mat& nabla_v) { return nabla_v + transpose(nabla_v); }

}  // namespace

double k_pairing(const G2Field& field, const Deformation& d1,
                 const Deformation& d2) {
  require_flat(field, "k_pairing");
  const JetField jf(field);
  const FlatJets fj = flat_jets(jf, d1);
  ScalarField dens(field.size());
  parallel_for(field.size(), [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const Form3 phi = f.to_frame(field.phi(i));
    const PointDerivs p = point_derivs(fj, i, phi);
    // B = div h - 1/4 grad tr h + 1/2 curl X and its derivative
    const Mat nabla_b =
        p.nabla_div_h - 0.25 * p.hess_tr + 0.5 * p.nabla_curl_x;
    const Mat k1 = p.lap_h - (2.0 / 3) * lie_g(nabla_b) +
                   ((-p.lap_tr + p.div_div) / 3) * identity_mat();
    const Vec k2 = p.lap_x + (2.0 / 3) * curl(nabla_b, phi);
    dens[i] = (dot(k1, f.to_frame(d2.h[i])) + dot(k2, f.to_frame(d2.x[i]))) *
              field.metric(i).vol_density;
  });
  return integrate(field.grid(), dens) *
         std::pow(field.volume(), -5.0 / 7);
}

SecondVariationCheck second_variation_fd(const G2Field& field,
                                         const Deformation& d1,
                                         const Deformation& d2) {
  require_flat(field, "second_variation_fd");
  const TensorField<3> w1 = direction(field, d1), w2 = direction(field, d2);
  auto value = [&](double s, double t) {
    TensorField<3> phi = field.phi();
    for (std::size_t i = 0; i < phi.size(); ++i) {
      phi[i].add_scaled(s, w1[i]);
      phi[i].add_scaled(t, w2[i]);
    }
    return evaluate_all(G2Field(field.grid(), std::move(phi)))[kNormalized];
  };
  auto quotient = [&](double e) {
    const double v = value(e, e) - value(e, -e) - value(-e, e) + value(-e, -e);
    return std::vector<double>{v / (4 * e * e)};
  };
  const RichardsonResult fd = richardson(quotient, 1, "second_variation_fd");
  SecondVariationCheck r;
  r.fd_hessian = fd.value[0];
  r.eta = fd.eta[0];
  r.k_pairing = k_pairing(field, d1, d2);
  r.rel_err = relative_error(r.fd_hessian, r.k_pairing);
  return r;
}

// ---------------------------------------------------------------------------
// Conformal energy

namespace {

void require_positive(const ScalarField& v) {
  for (double x : v)
    if (!(x > 0))
      throw NonPositiveConformalFactor("conformal factor must be positive");
}

double grad_norm2(const JetField& jf, const ScalarField& v, std::size_t i) {
  const auto g = point_gradient(jf.grid(), v, i);
  const Mat& ginv = jf.metric(i).g_inv;
  double s = 0.0;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) s += ginv(a, b) * g[a] * g[b];
  return s;
}

}  // namespace

double conformal_energy(const G2Field& field, const ScalarField& v) {
  require_positive(v);
  const JetField jf(field);
  ScalarField dens(field.size());
  parallel_for(field.size(), [&](std::size_t i) {
    const double tr_p1 = trace(p1(jf.frame_jet(i)));
    dens[i] = ((12.0 / 25) * grad_norm2(jf, v, i) + 0.2 * tr_p1 * v[i] * v[i]) *
              jf.metric(i).vol_density;
  });
  return integrate(field.grid(), dens);
}

ConformalCrossCheck conformal_cross_check(const G2Field& field,
                                          const ScalarField& v) {
  ConformalCrossCheck r;
  r.energy = conformal_energy(field, v);

  TensorField<3> phi = field.phi();
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= std::pow(v[i], 1.2);
  r.direct = evaluate(G2Field(field.grid(), std::move(phi)),
                      FunctionalId::hilbert);

  // e^f = v^(2/5); T' = e^f (T + grad f _| phi), and in the frame of the
  // rescaled metric the Hilbert density (less its divergence) picks up
  // e^{-2f} while dmu picks up e^{7f}.
  const JetField jf(field);
  ScalarField dens(field.size());
  parallel_for(field.size(), [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const Form3 ph = f.to_frame(field.phi(i));
    const auto g = point_gradient(field.grid(), v, i);
    Vec grad_f;
    for (int a = 0; a < kDim; ++a) grad_f(a) = 0.4 * g[a] / v[i];
    const Mat s = f.to_frame(jf.torsion(i)) + interior(f.to_frame(grad_f), ph);
    const Vec vs = v_op(s, ph);
    dens[i] = v[i] * v[i] * (-0.5 * dot(s, s) + dot(vs, vs) / 6) *
              jf.metric(i).vol_density;
  });
  r.torsion_change = integrate(field.grid(), dens);
  return r;
}

// ---------------------------------------------------------------------------
// Linearized quantities

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::scal: return "Scal";
    case Quantity::ric: return "Ric";
    case Quantity::lie_vt_g: return "LieVTg";
    case Quantity::div_t: return "divT";
    case Quantity::grad_tr_t: return "gradTrT";
    case Quantity::vt: return "VT";
    case Quantity::torsion: return "torsion";
  }
  return "?";
}

namespace {

std::size_t quantity_width(Quantity q) {
  switch (q) {
    case Quantity::scal: return 1;
    case Quantity::div_t:
    case Quantity::grad_tr_t:
    case Quantity::vt: return 7;
    default: return 49;
  }
}

void append_coords(std::vector<double>& out, std::size_t at, const Frame& f,
                   const Mat& m) {
  const Mat c = f.to_coords(m);
  for (int k = 0; k < 49; ++k) out[at + k] = c[k];
}

void append_coords(std::vector<double>& out, std::size_t at, const Frame& f,
                   const Vec& v) {
  const Vec c = f.to_coords(v);
  for (int k = 0; k < 7; ++k) out[at + k] = c[k];
}

std::vector<double> quantity_field(const G2Field& field, Quantity q) {
  const JetField jf(field);
  const std::size_t w = quantity_width(q);
  std::vector<double> out(field.size() * w);
  parallel_for(field.size(), [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const FrameJet j = jf.frame_jet(i);
    const TorsionData d = torsion_data(j);
    const std::size_t at = i * w;
    switch (q) {
      case Quantity::scal: out[at] = d.scal; break;
      case Quantity::ric: append_coords(out, at, f, d.ric); break;
      case Quantity::lie_vt_g: append_coords(out, at, f, d.lie_vt_g); break;
      case Quantity::div_t: append_coords(out, at, f, d.div_t); break;
      case Quantity::grad_tr_t: append_coords(out, at, f, d.grad_tr_t); break;
      case Quantity::vt: append_coords(out, at, f, d.vt); break;
      case Quantity::torsion: append_coords(out, at, f, d.t); break;
    }
  });
  return out;
}

}  // namespace

LinearizationCheck linearize_quantity(const G2Field& field,
                                      const Deformation& d, Quantity q) {
  require_flat(field, "linearize_quantity");
  const TensorField<3> omega = direction(field, d);
  auto quotient = [&](double t) {
    const auto plus = quantity_field(displaced(field, omega, t), q);
    const auto minus = quantity_field(displaced(field, omega, -t), q);
    std::vector<double> r(plus.size());
    for (std::size_t k = 0; k < r.size(); ++k)
      r[k] = (plus[k] - minus[k]) / (2 * t);
    return r;
  };
  LinearizationCheck out;
  out.fd_field = richardson_field(quotient, "linearize_quantity").value;

  const JetField jf(field);
  const FlatJets fj = flat_jets(jf, d);
  const std::size_t w = quantity_width(q);
  out.formula_field.assign(field.size() * w, 0.0);
  parallel_for(field.size(), [&](std::size_t i) {
    const Frame& f = jf.frame(i);
    const Form3 phi = f.to_frame(field.phi(i));
    const PointDerivs p = point_derivs(fj, i, phi);
    const std::size_t at = i * w;
    switch (q) {
      case Quantity::scal:
        out.formula_field[at] = 2 * (-p.lap_tr + p.div_div);
        break;
      case Quantity::ric:
        append_coords(out.formula_field, at, f,
                      Mat(-1.0 * p.lap_h +
                          lie_g(p.nabla_div_h - 0.5 * p.hess_tr)));
        break;
      case Quantity::lie_vt_g:
        append_coords(out.formula_field, at, f,
                      lie_g(-1.0 * p.nabla_div_h + p.hess_tr +
                            p.nabla_curl_x));
        break;
      case Quantity::div_t:
        append_coords(out.formula_field, at, f,
                      Vec(p.lap_x + curl(p.nabla_div_h, phi)));
        break;
      case Quantity::grad_tr_t:
        append_coords(out.formula_field, at, f, p.div_x_grad);
        break;
      case Quantity::vt:
        append_coords(out.formula_field, at, f,
                      Vec(p.grad_tr - p.div_h + p.curl_x));
        break;
      case Quantity::torsion: {
        Mat dt = p.nabla_x;
        const Form3& nh = fj.nh[i];
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b)
            for (int c = 0; c < kDim; ++c) {
              const double ph = phi(a, b, c);
              if (ph == 0.0) continue;
              for (int r = 0; r < kDim; ++r) dt(r, c) += nh(a, b, r) * ph;
            }
        append_coords(out.formula_field, at, f, dt);
        break;
      }
    }
  });
  for (std::size_t k = 0; k < out.fd_field.size(); ++k) {
    out.max_err = std::fmax(
        out.max_err, std::fabs(out.fd_field[k] - out.formula_field[k]));
    out.scale = std::fmax(out.scale, std::fabs(out.formula_field[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Static modes

namespace {

// curl(h)_ij + xi_i X_j with curl(h)_ij = xi_a h_bi phi_abj.
Mat torsion_symbol(const Vec& xi, const HX& d, const Form3& phi) {
  Mat c = outer(xi, d.x);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int j = 0; j < kDim; ++j)
        for (int i = 0; i < kDim; ++i) c(i, j) += xi(a) * d.h(b, i) * phi(a, b, j);
  return c;
}

}  // namespace

StaticModeSweep static_mode_sweep(int max_mode, std::uint64_t seed) {
  Rng rng(seed);
  const Form3 phi = standard_phi();
  StaticModeSweep r;
  for (int k0 = -max_mode; k0 <= max_mode; ++k0)
    for (int k1 = -max_mode; k1 <= max_mode; ++k1)
      for (int k2 = -max_mode; k2 <= max_mode; ++k2) {
        Vec xi;
        xi(0) = 2 * std::numbers::pi * k0;
        xi(3) = 2 * std::numbers::pi * k1;
        xi(6) = 2 * std::numbers::pi * k2;
        const double xi2 = dot(xi, xi);
        HX d{trace_free(random_sym(rng)), random_vec(rng)};
        if (xi2 > 0) {
          const HX p = diffeo_projection(xi, d);
          d.h -= p.h;
          d.x -= p.x;
        }
        const double size = std::sqrt(dot(d.h, d.h) + dot(d.x, d.x));
        const bool is_static = xi2 * size < 1e-10;
        const bool torsion_free =
            torsion_symbol(xi, d, phi).max_abs() < 1e-10 * std::fmax(1.0, size);
        ++r.modes;
        if (is_static != torsion_free) ++r.mismatches;

        if (xi2 > 0) {
          // trace-free h with h(xi) = 0
          const Vec u = (1 / std::sqrt(xi2)) * xi;
          const Mat proj = identity_mat() - outer(u, u);
          Mat h = compose(compose(proj, random_sym(rng)), proj);
          h -= (trace(h) / 6) * proj;
          const Mat c = torsion_symbol(xi, HX{h, Vec{}}, phi);
          const double lhs = dot(c, c);
          const double rhs = xi2 * dot(h, h);
          r.curl_identity =
              std::fmax(r.curl_identity, std::fabs(lhs - rhs) / rhs);
        }
      }
  return r;
}

}  // namespace g2forge
