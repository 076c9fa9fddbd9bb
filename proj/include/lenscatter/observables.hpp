#pragma once

#include <iosfwd>
#include <vector>

#include "lenscatter/hermite.hpp"

namespace lenscatter {

// The four scattering invariants of a field u:
//   mass     ||u||_L2
//   kinetic  ||u'||_L2^2
//   momentum Im <u', u>
//   centre   int x |u|^2
struct Invariants {
  double mass, kinetic, momentum, centre;
};

Invariants invariants_of(const SpectralField& f, int d);

// (1/2)||u'||^2 + sign/(sigma+1) ||u||_{L^{2 sigma + 2}}^{2 sigma + 2}
double energy_of(const SpectralField& f, double sigma, int sign,
                 const TransformPlan& plan);

// Gap in the identity relating ||x u||^2 and the L^{2+4/d} norm of the
// Fourier transform between the two asymptotic states (exact at sigma = 2/d).
double moment_identity_gap(const SpectralField& u_minus,
                           const SpectralField& u_plus, int d,
                           const TransformPlan& plan);

// For v at lens time t:
//   sigma_part_a = || x v sin t - i cos t v' ||   (= ||grad u|| at tan t)
//   j_norm       = || x v cos t + i sin t v' ||   (= ||J u||   at tan t)
struct LensDiagnostics {
  double sigma_part_a, j_norm;
};

LensDiagnostics lens_diagnostics(const SpectralField& v, double t_lens, int d);

// One CSV row of the per-step series: t_lens, invariants of the lens-frame
// field, its Sigma^1 norm, the J diagnostic, and max |v| over nodes.
struct ObservableRecord {
  double t_lens, mass, kinetic, momentum, centre, sigma_norm, j_norm, linf;
};

ObservableRecord record_state(const SpectralField& v, double t_lens, int d,
                              const TransformPlan& plan);

// Least-squares slope of log(j_norm) against log(1 + tan t_lens) over rows
// with tan t_lens in [tan_lo, tan_hi]; needs at least four rows there.
double growth_slope(const std::vector<ObservableRecord>& series, double tan_lo,
                    double tan_hi);

extern const char* const kObservableCsvHeader;
void write_observable_csv(std::ostream& os,
                          const std::vector<ObservableRecord>& series);

}  // namespace lenscatter
