#include "lenscatter/lens.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lenscatter {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// e^{i d pi/4} i^m a_m, the shared form of both endpoint dictionaries
SpectralField endpoint_phases(const SpectralField& f, int d) {
  SpectralField out = inverse_fourier(f);  // i^m component swaps
  const cplx c = std::polar(1.0, 0.25 * std::numbers::pi * d);
  for (cplx& a : out.coeffs) a *= c;
  return out;
}

void check_long_range(const ScatterConfig& cfg) {
  if (std::abs(cfg.d * cfg.sigma - 1.0) > 1e-12)
    throw std::invalid_argument("long-range maps need d * sigma = 1");
  double off = cfg.endpoint_offset > 0 ? cfg.endpoint_offset : cfg.tau;
  if (!(off > 0.0) || off > 0.25 * std::numbers::pi)
    throw std::invalid_argument("long-range endpoint offset outside (0, pi/4]");
}

double long_range_log(const ScatterConfig& cfg) {
  double off = cfg.endpoint_offset > 0 ? cfg.endpoint_offset : cfg.tau;
  return std::log(std::tan(kHalfPi - off));
}

}  // namespace

LensState inject_minus(const SpectralField& u_minus, int d) {
  return {endpoint_phases(u_minus, d), -kHalfPi};
}

SpectralField extract_plus(const LensState& end_state, int d) {
  if (std::abs(end_state.t_lens - kHalfPi) > 1e-9)
    throw std::invalid_argument("extract_plus needs the state at t = +pi/2");
  return endpoint_phases(end_state.field, d);
}

LensState inject_minus_long_range(const SpectralField& u_minus,
                                  const ScatterConfig& cfg,
                                  const TransformPlan& plan) {
  check_long_range(cfg);
  const double L = long_range_log(cfg);
  const double off = cfg.endpoint_offset > 0 ? cfg.endpoint_offset : cfg.tau;
  // hat(u_-)(-x), then the logarithmic phase pointwise, then back
  SpectralField g = reflect(fourier(u_minus));
  std::vector<cplx> vals = plan.synthesize(g);
  const cplx c = std::polar(1.0, 0.25 * std::numbers::pi * cfg.d);
  for (cplx& z : vals) {
    z *= std::polar(1.0, cfg.sign * cfg.coupling * L * std::norm(z));
    z *= c;
  }
  return {plan.analyze(vals), -kHalfPi + off};
}

SpectralField extract_plus_long_range(const LensState& end_state,
                                      const ScatterConfig& cfg,
                                      const TransformPlan& plan) {
  check_long_range(cfg);
  const double off = cfg.endpoint_offset > 0 ? cfg.endpoint_offset : cfg.tau;
  if (std::abs(end_state.t_lens - (kHalfPi - off)) > 1e-9)
    throw std::invalid_argument(
        "extract_plus_long_range needs the state at t = pi/2 - offset");
  const double L = long_range_log(cfg);
  std::vector<cplx> vals = plan.synthesize(end_state.field);
  const cplx c = std::polar(1.0, 0.25 * std::numbers::pi * cfg.d);
  for (cplx& z : vals) {
    z *= std::polar(1.0, cfg.sign * cfg.coupling * L * std::norm(z));
    z *= c;
  }
  return inverse_fourier(plan.analyze(vals));
}

ScatterOutcome scatter_recording(const SpectralField& u_minus,
                                 const ScatterConfig& cfg,
                                 const TransformPlan& plan) {
  if (u_minus.modes() != plan.modes())
    throw std::invalid_argument("field/plan mode count mismatch");
  ScatterOutcome out;
  if (cfg.long_range) {
    const double off = cfg.endpoint_offset > 0 ? cfg.endpoint_offset : cfg.tau;
    LensState v = inject_minus_long_range(u_minus, cfg, plan);
    PropagationResult r =
        propagate(v, cfg.evolution(-kHalfPi + off, kHalfPi - off), plan);
    out.series = std::move(r.series);
    out.abort = r.abort;
    if (!out.abort)
      out.u_plus = extract_plus_long_range(r.state, cfg, plan);
    return out;
  }
  if (cfg.d * cfg.sigma <= 1.0 + 1e-12 && cfg.coupling != 0.0)
    throw std::invalid_argument(
        "short-range scatter needs d * sigma > 1; use the long-range maps");
  LensState v = inject_minus(u_minus, cfg.d);
  PropagationResult r = propagate(v, cfg.evolution(-kHalfPi, kHalfPi), plan);
  out.series = std::move(r.series);
  out.abort = r.abort;
  if (!out.abort) out.u_plus = extract_plus(r.state, cfg.d);
  return out;
}

PropagationAborted::PropagationAborted(const AbortInfo& a)
    : std::runtime_error("propagation aborted at step " +
                         std::to_string(a.step) + ", t_lens = " +
                         std::to_string(a.t_lens) + ": " + a.reason),
      info(a) {}

SpectralField scatter(const SpectralField& u_minus, const ScatterConfig& cfg,
                      const TransformPlan& plan) {
  ScatterOutcome out = scatter_recording(u_minus, cfg, plan);
  if (out.abort) throw PropagationAborted(*out.abort);
  return std::move(out.u_plus);
}

}  // namespace lenscatter
