#include "lenscatter/evolution.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lenscatter {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

std::vector<cplx> linear_phases(int M, double tau, int d) {
  std::vector<cplx> ph(M);
  for (int m = 0; m < M; ++m) ph[m] = std::polar(1.0, -(m + 0.5 * d) * tau);
  return ph;
}

void apply_phases(SpectralField& f, const std::vector<cplx>& ph) {
  for (int m = 0; m < f.modes(); ++m) f.coeffs[m] *= ph[m];
}

double cospow(double s, double q) { return std::pow(std::cos(s), q); }

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(double a, double b, double fa, double fm, double fb,
                double whole, double q, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = cospow(lm, q), frm = cospow(rm, q);
  double left = simpson(a, m, fa, flm, fm);
  double right = simpson(m, b, fm, frm, fb);
  double err = left + right - whole;
  if (depth <= 0 || std::abs(err) < 15.0 * tol)
    return left + right + err / 15.0;
  return adaptive(a, m, fa, flm, fm, left, q, 0.5 * tol, depth - 1) +
         adaptive(m, b, fm, frm, fb, right, q, 0.5 * tol, depth - 1);
}

double pow_2sigma(double abs2, double sigma) {
  if (sigma == 1.0) return abs2;
  if (sigma == 2.0) return abs2 * abs2;
  return std::pow(abs2, sigma);
}

}  // namespace

void linear_step(LensState& v, double tau, int d) {
  apply_phases(v.field, linear_phases(v.field.modes(), tau, d));
  v.t_lens += tau;
}

double cosine_weight(double t, double tau, double exponent) {
  if (!(tau >= 0.0)) throw std::invalid_argument("negative step in cosine_weight");
  const double a = t, b = t + tau;
  const double eps = 1e-14;
  if (a < -kHalfPi - eps || b > kHalfPi + eps)
    throw std::domain_error("cosine_weight interval leaves [-pi/2, pi/2]");
  if (exponent < 0.0 &&
      (a <= -kHalfPi + 1e-15 || b >= kHalfPi - 1e-15))
    throw std::domain_error(
        "cosine_weight with negative exponent touching +-pi/2");
  if (exponent == 0.0) return tau;
  if (exponent == -1.0) {
    // antiderivative of sec: log tan(s/2 + pi/4)
    auto F = [](double s) { return std::log(std::tan(0.5 * s + 0.25 * std::numbers::pi)); };
    return F(b) - F(a);
  }
  if (tau == 0.0) return 0.0;
  double fa = cospow(a, exponent), fb = cospow(b, exponent);
  double fm = cospow(0.5 * (a + b), exponent);
  double whole = simpson(a, b, fa, fm, fb);
  return adaptive(a, b, fa, fm, fb, whole, exponent, 1e-12, 48);
}

void nonlinear_step(LensState& v, double tau, const EvolutionConfig& cfg,
                    const TransformPlan& plan) {
  if (cfg.coupling == 0.0) return;
  const double W = cosine_weight(v.t_lens, tau, cfg.d * cfg.sigma - 2.0);
  std::vector<cplx> vals = plan.synthesize(v.field);
  const double amp = cfg.sign * cfg.coupling * W;
  for (cplx& z : vals) {
    double phase = -amp * pow_2sigma(std::norm(z), cfg.sigma);
    z *= std::polar(1.0, phase);
  }
  v.field = plan.analyze(vals);
}

PropagationResult propagate(const LensState& v0, const EvolutionConfig& cfg,
                            const TransformPlan& plan) {
  if (std::abs(v0.t_lens - cfg.t_start) > 1e-12)
    throw std::invalid_argument("initial state is not at t_start");
  if (!(cfg.t_end > cfg.t_start)) throw std::invalid_argument("empty interval");
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("step size must be positive");
  if (v0.field.modes() != plan.modes())
    throw std::invalid_argument("field/plan mode count mismatch");

  PropagationResult out;
  out.state = v0;
  const double mass0 = l2_norm(v0.field);
  if (!std::isfinite(mass0)) {
    out.abort = AbortInfo{0, v0.t_lens, "non-finite coefficients"};
    return out;
  }
  const std::vector<cplx> full_phases =
      linear_phases(plan.modes(), cfg.tau, cfg.d);

  if (cfg.record_stride > 0)
    out.series.push_back(record_state(v0.field, v0.t_lens, cfg.d, plan));

  const double len = cfg.t_end - cfg.t_start;
  const long nfull = static_cast<long>(std::floor(len / cfg.tau + 1e-12));
  const bool partial = len - nfull * cfg.tau > 1e-12;
  const long nsteps = nfull + (partial ? 1 : 0);

  for (long n = 0; n < nsteps; ++n) {
    const bool last = n == nsteps - 1;
    const double step = (last && partial) ? cfg.t_end - out.state.t_lens
                                          : cfg.tau;
    nonlinear_step(out.state, step, cfg, plan);
    if (last && partial)
      apply_phases(out.state.field, linear_phases(plan.modes(), step, cfg.d));
    else
      apply_phases(out.state.field, full_phases);
    out.state.t_lens = last ? cfg.t_end : cfg.t_start + (n + 1) * cfg.tau;
    ++out.steps;

    const double mass = l2_norm(out.state.field);
    if (!std::isfinite(mass)) {
      out.abort = AbortInfo{static_cast<int>(n), out.state.t_lens,
                            "non-finite coefficients"};
      break;
    }
    if (std::abs(mass - mass0) > cfg.mass_drift_tol * std::max(mass0, 1e-300)) {
      out.abort = AbortInfo{static_cast<int>(n), out.state.t_lens,
                            "mass drift beyond tolerance"};
      break;
    }
    if (cfg.record_stride > 0 && ((n + 1) % cfg.record_stride == 0 || last))
      out.series.push_back(
          record_state(out.state.field, out.state.t_lens, cfg.d, plan));
  }
  return out;
}

}  // namespace lenscatter
