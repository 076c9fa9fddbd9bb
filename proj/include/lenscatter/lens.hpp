#pragma once

#include <stdexcept>

#include "lenscatter/evolution.hpp"
#include "lenscatter/hermite.hpp"

namespace lenscatter {

struct ScatterConfig {
  int d = 1;
  double sigma = 2.0;
  int sign = +1;
  double tau = 1e-2;
  double coupling = 1.0;
  int record_stride = 0;
  double mass_drift_tol = 1e-2;
  // short-range runs cover (-pi/2, pi/2); the long-range pipeline starts and
  // ends a distance endpoint_offset (= tau unless set) inside the endpoints,
  // absorbing the logarithmic phase there
  bool long_range = false;
  double endpoint_offset = 0.0;

  EvolutionConfig evolution(double t_start, double t_end) const {
    return {d,        sigma,         sign,           tau,
            t_start,  t_end,         coupling,       record_stride,
            mass_drift_tol};
  }
};

// Endpoint dictionaries between asymptotic data and the lens frame: unitary
// coefficient maps, exact up to the constant-phase roundoff.
//   inject_minus:  a_m -> e^{i d pi/4} i^m a_m          (state at t = -pi/2)
//   extract_plus:  b_m -> e^{i d pi/4} i^m b_m          (from state at +pi/2)
LensState inject_minus(const SpectralField& u_minus, int d);
SpectralField extract_plus(const LensState& end_state, int d);

// Modified endpoint maps for the borderline d*sigma = 1 case: the same
// dictionaries with the logarithmic phase exp(+- i sign |.|^2 log tan(pi/2 -
// offset)) applied pointwise at the nodes. The extracted phase carries an
// offset-dependent convention; moduli are convention-free.
LensState inject_minus_long_range(const SpectralField& u_minus,
                                  const ScatterConfig& cfg,
                                  const TransformPlan& plan);
SpectralField extract_plus_long_range(const LensState& end_state,
                                      const ScatterConfig& cfg,
                                      const TransformPlan& plan);

struct ScatterOutcome {
  SpectralField u_plus;
  std::vector<ObservableRecord> series;
  std::optional<AbortInfo> abort;
};

struct PropagationAborted : std::runtime_error {
  AbortInfo info;
  explicit PropagationAborted(const AbortInfo& a);
};

// The scattering map u_- -> u_+. Throws on propagation abort; use
// scatter_recording to inspect a failed or instrumented run.
SpectralField scatter(const SpectralField& u_minus, const ScatterConfig& cfg,
                      const TransformPlan& plan);
ScatterOutcome scatter_recording(const SpectralField& u_minus,
                                 const ScatterConfig& cfg,
                                 const TransformPlan& plan);

}  // namespace lenscatter
