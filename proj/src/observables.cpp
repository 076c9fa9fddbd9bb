#include "lenscatter/observables.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lenscatter {

Invariants invariants_of(const SpectralField& f, int d) {
  (void)d;
  SpectralField df = differentiate(f);
  SpectralField xf = multiply_by_x(f);
  Invariants inv;
  inv.mass = l2_norm(f);
  double k = 0.0;
  for (const cplx& c : df.coeffs) k += std::norm(c);
  inv.kinetic = k;
  inv.momentum = l2_inner(df, f).imag();
  inv.centre = l2_inner(xf, f).real();
  return inv;
}

double energy_of(const SpectralField& f, double sigma, int sign,
                 const TransformPlan& plan) {
  if (sigma <= 0) throw std::invalid_argument("sigma must be positive");
  Invariants inv = invariants_of(f, 1);
  double p = 2.0 * sigma + 2.0;
  double lp = lp_norm(plan, f, p);
  return 0.5 * inv.kinetic + sign / (sigma + 1.0) * std::pow(lp, p);
}

namespace {

double moment_side(const SpectralField& u, int d, const TransformPlan& plan) {
  SpectralField xu = multiply_by_x(u);
  double x2 = 0.0;
  for (const cplx& c : xu.coeffs) x2 += std::norm(c);
  double p = 2.0 + 4.0 / d;
  double lp = lp_norm(plan, fourier(u), p);
  return x2 + (2.0 * d / (2.0 + d)) * std::pow(lp, p);
}

}  // namespace

double moment_identity_gap(const SpectralField& u_minus,
                           const SpectralField& u_plus, int d,
                           const TransformPlan& plan) {
  return std::abs(moment_side(u_minus, d, plan) -
                  moment_side(u_plus, d, plan));
}

LensDiagnostics lens_diagnostics(const SpectralField& v, double t_lens,
                                 int d) {
  (void)d;
  SpectralField dv = differentiate(v);
  SpectralField xv = multiply_by_x(v);
  const double c = std::cos(t_lens), s = std::sin(t_lens);
  const int M = v.modes();
  double a2 = 0.0, j2 = 0.0;
  for (int m = 0; m < M; ++m) {
    // i * dv enters with opposite signs in the two combinations
    cplx idv = cplx(-dv.coeffs[m].imag(), dv.coeffs[m].real());
    a2 += std::norm(s * xv.coeffs[m] - c * idv);
    j2 += std::norm(c * xv.coeffs[m] + s * idv);
  }
  return {std::sqrt(a2), std::sqrt(j2)};
}

ObservableRecord record_state(const SpectralField& v, double t_lens, int d,
                              const TransformPlan& plan) {
  ObservableRecord r;
  Invariants inv = invariants_of(v, d);
  r.t_lens = t_lens;
  r.mass = inv.mass;
  r.kinetic = inv.kinetic;
  r.momentum = inv.momentum;
  r.centre = inv.centre;
  r.sigma_norm = sigma_norm(v, 1, d);
  r.j_norm = lens_diagnostics(v, t_lens, d).j_norm;
  double linf = 0.0;
  for (const cplx& val : plan.synthesize(v))
    linf = std::max(linf, std::abs(val));
  r.linf = linf;
  return r;
}

double growth_slope(const std::vector<ObservableRecord>& series, double tan_lo,
                    double tan_hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const ObservableRecord& r : series) {
    double tt = std::tan(r.t_lens);
    if (tt < tan_lo || tt > tan_hi || r.j_norm <= 0.0) continue;
    double x = std::log1p(tt), y = std::log(r.j_norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 4)
    throw std::invalid_argument("growth_slope needs at least 4 rows in window");
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("degenerate slope window");
  return (n * sxy - sx * sy) / denom;
}

const char* const kObservableCsvHeader =
    "t_lens,mass,kinetic,momentum,centre,sigma_norm,j_norm,linf";

void write_observable_csv(std::ostream& os,
                          const std::vector<ObservableRecord>& series) {
  os << kObservableCsvHeader << '\n';
  char buf[400];
  for (const ObservableRecord& r : series) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.t_lens, r.mass, r.kinetic, r.momentum, r.centre,
                  r.sigma_norm, r.j_norm, r.linf);
    os << buf;
  }
}

}  // namespace lenscatter
