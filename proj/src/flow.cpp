#include "g2forge/flow.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "g2forge/parallel.hpp"

namespace g2forge {

double scaling_rate(double c, FlowVariant variant) {
  const FrameJet j = to_frame(synthetic_nearly_g2_jet(c));
  const Form3 rhs = flow_rhs(j, variant);
  return dot(rhs, j.phi) / dot(j.phi, j.phi);
}

ScalingOdeResult scaling_ode_check(double c0, FlowVariant variant,
                                   double t_end, double dt) {
  if (variant != FlowVariant::hat && variant != FlowVariant::tilde)
    throw std::invalid_argument("scaling_ode_check: variant must be HatP or TildeP");
  if (!(dt > 0) || !(t_end >= 0))
    throw std::invalid_argument("scaling_ode_check: need dt > 0, t_end >= 0");
  const double c2 = c0 * c0;
  const bool hat = variant == FlowVariant::hat;
  const double cubic_rate = hat ? c2 : (10.0 / 3) * c2;
  const double exact_rate = hat ? 2 * c2 : (20.0 / 3) * c2;
  auto rhs = [&](double mu) {
    return scaling_rate(c0 / std::cbrt(mu), variant) * mu;
  };

  ScalingOdeResult r;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  double mu = 1.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double k1 = rhs(mu);
    const double k2 = rhs(mu + 0.5 * dt * k1);
    const double k3 = rhs(mu + 0.5 * dt * k2);
    const double k4 = rhs(mu + dt * k3);
    const double next = mu + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!(next > 0) || next < mu)
      throw StepRejected("scaling_ode_check: scale lost positivity or monotonicity");
    mu = next;
    const double t = n * dt;
    const double cubic = std::pow(1 + cubic_rate * t, 3);
    const double exact = std::pow(1 + exact_rate * t, 1.5);
    r.max_rel_err_cubic =
        std::fmax(r.max_rel_err_cubic, std::fabs(mu - cubic) / cubic);
    r.max_rel_err_exact =
        std::fmax(r.max_rel_err_exact, std::fabs(mu - exact) / exact);
    const double c = c0 / std::cbrt(mu);
    const double hil = densities(to_frame(synthetic_nearly_g2_jet(c))).hilbert;
    r.max_energy_err = std::fmax(r.max_energy_err, std::fabs(hil + 3.5 * c * c));
  }
  r.steps = steps;
  r.final_mu = mu;
  return r;
}

TensorField<3> flow_rhs_field(const JetField& jf,
                              const std::vector<FrameJet>& jets,
                              FlowVariant variant) {
  TensorField<3> out(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) {
    out[i] = form3_from_components(independent_components(
        jf.frame(i).to_coords(flow_rhs(jets[i], variant))));
  });
  return out;
}

namespace {

std::vector<FrameJet> frame_jets(const JetField& jf) {
  std::vector<FrameJet> jets(jf.size());
  parallel_for(jf.size(), [&](std::size_t i) { jets[i] = jf.frame_jet(i); });
  return jets;
}

}  // namespace

TensorField<3> flow_rhs_field(const G2Field& field, FlowVariant variant) {
  const JetField jf(field);
  return flow_rhs_field(jf, frame_jets(jf), variant);
}

double gauge_relation_residual(const JetField& jf,
                               const std::vector<FrameJet>& jets) {
  TensorField<1> vt(jf.size());
  for (std::size_t i = 0; i < jf.size(); ++i)
    vt[i] = jf.frame(i).to_coords(v_op(jets[i].t, jets[i].phi));
  const TensorField<3> lie = lie_derivative_fd(jf, vt);
  const TensorField<3> a = flow_rhs_field(jf, jets, FlowVariant::hat);
  const TensorField<3> b = flow_rhs_field(jf, jets, FlowVariant::hat2);
  double worst = 0.0;
  for (std::size_t i = 0; i < jf.size(); ++i) {
    Form3 r = a[i] - b[i];
    r.add_scaled(2.0 / 3, lie[i]);
    worst = std::fmax(worst, r.max_abs());
  }
  return worst;
}

FlowMonitors compute_monitors(const G2Field& field) {
  const JetField jf(field);
  const std::vector<FrameJet> jets = frame_jets(jf);
  FlowMonitors m;
  m.vol = field.volume();
  ScalarField hil(jf.size());
  m.scal_min = INFINITY;
  m.scal_max = -INFINITY;
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const DensityVector d = densities(jets[i]);
    hil[i] = d.hilbert * jf.metric(i).vol_density;
    m.max_t2 = std::fmax(m.max_t2, d.t2);
    m.scal_min = std::fmin(m.scal_min, d.scal);
    m.scal_max = std::fmax(m.scal_max, d.scal);
  }
  m.hilbert = integrate(field.grid(), hil);
  const BianchiResiduals b = bianchi_residuals(jf, jets);
  m.bianchi_l = b.l_of_p;
  m.bianchi_tb = b.tilde_b_of_tilde_p;
  return m;
}

namespace {

TensorField<3> axpy(const TensorField<3>& x, double a,
                    const TensorField<3>& y) {
  TensorField<3> out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].add_scaled(a, y[i]);
  return out;
}

std::string snapshot_name(std::size_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.g2f", step);
  return buf;
}

}  // namespace

FlowRun integrate(const G2Field& initial, const FlowConfig& cfg) {
  const Grid& grid = initial.grid();
  if (grid.active_count() != 1)
    throw std::invalid_argument("integrate: the field must have one active axis");
  if (!(cfg.dt > 0) || !(cfg.t_end >= 0) || cfg.monitor_every == 0)
    throw std::invalid_argument("integrate: need dt > 0, t_end >= 0, monitor_every >= 1");
  const double h = grid.spacing(0);
  if (cfg.dt > cfg.sigma * h * h)
    throw StabilityBoundViolated(
        "integrate: dt = " + std::to_string(cfg.dt) + " exceeds sigma * h^2 = " +
        std::to_string(cfg.sigma * h * h));
  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));

  FlowRun run;
  run.states.push_back({0, 0.0, initial, compute_monitors(initial)});
  TensorField<3> phi = initial.phi();
  auto rhs = [&](const TensorField<3>& p) {
    return flow_rhs_field(G2Field(grid, p), cfg.variant);
  };
  for (std::size_t n = 1; n <= steps; ++n) {
    try {
      const TensorField<3> k1 = rhs(phi);
      const TensorField<3> k2 = rhs(axpy(phi, 0.5 * cfg.dt, k1));
      const TensorField<3> k3 = rhs(axpy(phi, 0.5 * cfg.dt, k2));
      const TensorField<3> k4 = rhs(axpy(phi, cfg.dt, k3));
      TensorField<3> next = phi;
      for (std::size_t i = 0; i < next.size(); ++i) {
        next[i].add_scaled(cfg.dt / 6, k1[i]);
        next[i].add_scaled(cfg.dt / 3, k2[i]);
        next[i].add_scaled(cfg.dt / 3, k3[i]);
        next[i].add_scaled(cfg.dt / 6, k4[i]);
      }
      G2Field accepted(grid, next);
      phi = std::move(next);
      if (n % cfg.monitor_every == 0 || n == steps) {
        FlowMonitors m = compute_monitors(accepted);
        run.states.push_back({n, n * cfg.dt, std::move(accepted), m});
      }
    } catch (const NotAG2Structure&) {
      run.positivity_lost_at = n;
      break;
    }
  }

  if (cfg.out_dir) {
    std::filesystem::create_directories(*cfg.out_dir);
    write_monitor_csv(run.states, *cfg.out_dir / "monitors.csv");
    for (const FlowState& s : run.states)
      write_field(s.field, *cfg.out_dir / snapshot_name(s.step));
  }
  if (run.positivity_lost_at && cfg.throw_on_positivity_loss)
    throw PositivityLost("integrate: positivity lost at step " +
                             std::to_string(*run.positivity_lost_at),
                         *run.positivity_lost_at);
  return run;
}

void write_monitor_csv(const std::vector<FlowState>& states,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "step,t,vol,hilbert,maxT2,scal_min,scal_max,bianchi_L,bianchi_tB\n";
  char buf[512];
  for (const FlowState& s : states) {
    const FlowMonitors& m = s.monitors;
    std::snprintf(buf, sizeof buf,
                  "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  s.step, s.t, m.vol, m.hilbert, m.max_t2, m.scal_min,
                  m.scal_max, m.bianchi_l, m.bianchi_tb);
    out << buf;
  }
}

}  // namespace g2forge
