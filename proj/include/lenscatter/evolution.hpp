#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lenscatter/hermite.hpp"
#include "lenscatter/observables.hpp"

namespace lenscatter {

// Lens-frame field at lens time t in (-pi/2, pi/2).
struct LensState {
  SpectralField field;
  double t_lens = 0.0;
};

struct EvolutionConfig {
  int d = 1;
  double sigma = 2.0;
  int sign = +1;          // +1 defocusing, -1 focusing
  double tau = 1e-2;
  double t_start = 0.0;
  double t_end = 0.0;
  double coupling = 1.0;  // scales the nonlinearity; 0 switches it off
  int record_stride = 0;  // 0: no per-step observable rows
  double mass_drift_tol = 1e-2;  // relative; exceeding it aborts the run
};

struct AbortInfo {
  int step;
  double t_lens;
  std::string reason;
};

struct PropagationResult {
  LensState state;
  std::vector<ObservableRecord> series;
  std::optional<AbortInfo> abort;
  int steps = 0;
};

// Exact flow of i v_t = (-(1/2) dxx + x^2/2) v over tau: the diagonal phases
// exp(-i (m + d/2) tau). Advances t_lens by tau.
void linear_step(LensState& v, double tau, int d);

// int_t^{t+tau} cos(s)^q ds. Closed forms for q = 0 and q = -1, adaptive
// Simpson refinement to 1e-12 otherwise. The interval must stay inside
// [-pi/2, pi/2]; endpoints may touch only when q >= 0.
double cosine_weight(double t, double tau, double exponent);

// Exact flow of the inhomogeneous nonlinear part over [t, t+tau]: pointwise
// phase exp(-i sign W |v|^{2 sigma}) at the quadrature nodes, with W the
// cosine weight for exponent d sigma - 2. Leaves t_lens unchanged.
void nonlinear_step(LensState& v, double tau, const EvolutionConfig& cfg,
                    const TransformPlan& plan);

// Lie splitting, nonlinear substep first, from cfg.t_start to cfg.t_end with
// a final partial step when tau does not divide the interval. Aborts (with
// the offending step recorded) on non-finite coefficients or mass drift
// beyond cfg.mass_drift_tol; the returned state is the last finished step.
PropagationResult propagate(const LensState& v0, const EvolutionConfig& cfg,
                            const TransformPlan& plan);

}  // namespace lenscatter
