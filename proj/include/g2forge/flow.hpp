#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "g2forge/jet.hpp"
#include "g2forge/operators.hpp"

namespace g2forge {

// RK4 for phi = mu phi_0 with the right-hand side taken from the synthetic
// nearly-G2 jet at the current scale: T = (c0 / lambda) g for mu = lambda^3,
// so d mu / dt = kappa(c0 / lambda) mu.
struct ScalingOdeResult {
  std::size_t steps = 0;
  double final_mu = 1.0;
  // against (c0^2 t + 1)^3 (HatP) or ((10/3) c0^2 t + 1)^3 (TildeP)
  double max_rel_err_cubic = 0.0;
  // against (1 + 2 c0^2 t)^(3/2) (HatP) or (1 + (20/3) c0^2 t)^(3/2) (TildeP)
  double max_rel_err_exact = 0.0;
  // max |Hilbert density + (7/2) c(t)^2| along the solution
  double max_energy_err = 0.0;
};

ScalingOdeResult scaling_ode_check(double c0, FlowVariant variant,
                                   double t_end, double dt);

// d mu / dt divided by mu for the synthetic jet with torsion constant c.
double scaling_rate(double c, FlowVariant variant);

// Flow right-hand side of a sampled field, coordinate components.
TensorField<3> flow_rhs_field(const JetField& jf,
                              const std::vector<FrameJet>& jets,
                              FlowVariant variant);
TensorField<3> flow_rhs_field(const G2Field& field, FlowVariant variant);

// Grid max of |rhs(HatP) - rhs(HatP2) + (2/3) L_VT phi| (coordinates), the
// Lie derivative taken by finite differences.
double gauge_relation_residual(const JetField& jf,
                               const std::vector<FrameJet>& jets);

struct FlowMonitors {
  double vol = 0;
  double hilbert = 0;
  double max_t2 = 0;
  double scal_min = 0;
  double scal_max = 0;
  double bianchi_l = 0;
  double bianchi_tb = 0;
};

FlowMonitors compute_monitors(const G2Field& field);

struct FlowState {
  std::size_t step = 0;
  double t = 0;
  G2Field field;
  FlowMonitors monitors;
};

struct FlowConfig {
  FlowVariant variant = FlowVariant::hat;
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t monitor_every = 1;
  double sigma = 0.25;  // dt <= sigma * spacing^2
  bool throw_on_positivity_loss = true;
  // When set: monitors.csv plus a snapshot_<step>.g2f per recorded state.
  std::optional<std::filesystem::path> out_dir;
};

struct FlowRun {
  std::vector<FlowState> states;  // step 0, every monitor_every, and last
  std::optional<std::size_t> positivity_lost_at;
};

// Classical RK4 method of lines on a 1-axis field.
FlowRun integrate(const G2Field& initial, const FlowConfig& cfg);

void write_monitor_csv(const std::vector<FlowState>& states,
                       const std::filesystem::path& path);

}  // namespace g2forge
