#pragma once

#include <vector>

#include "lenscatter/hermite.hpp"
#include "lenscatter/lens.hpp"

namespace lenscatter {

// Profile data for a solitary solution v(t) = e^{-i nu t} psi of the lens
// equation whose scattering map is a pure rotation by theta. The admissible
// frequencies are nu = d/2 - theta/pi + 2j, j >= 1, all above d/2.
struct RotatingPointSpec {
  int j;
  double theta;
  int d;
  double sigma;
  double nu;
};

double nu_from_theta(int j, double theta, int d);
RotatingPointSpec make_rotating_spec(int j, double theta, int d, double sigma);

struct StationaryOptions {
  double tol = 1e-10;   // on the L2 norm of the residual
  int max_iter = 200;
  double coupling = 1.0;  // scales the nonlinear term; 0 for the linear probe
};

struct StationarySolution {
  SpectralField psi;  // real and even by construction
  double nu = 0.0;
  double sigma = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Damped Newton with a finite-difference Jacobian on the even-real subspace
// for (lambda_m - nu) psi_m + coupling [|psi|^{2 sigma} psi]_m = 0.
StationarySolution solve_stationary(const RotatingPointSpec& spec, int M,
                                    const SpectralField& init,
                                    const StationaryOptions& opts = {});

// Gaussian ansatz c h_0 with c balancing the mode-0 projection; a reliable
// Newton basin for every nu > d/2.
SpectralField default_stationary_init(const RotatingPointSpec& spec, int M);

// Warm-started path from base.sigma to sigma_target in `steps` increments;
// returns every solution along the path, base first.
std::vector<StationarySolution> continue_in_sigma(
    const RotatingPointSpec& spec, const StationarySolution& base,
    double sigma_target, int steps, const StationaryOptions& opts = {});

// Best-fit rotation angle: theta = arg <u_+, u_->, residual
// ||u_+ - e^{i theta} u_-||. Degenerate when the inner product is ~0, in
// which case theta is reported as 0 and any angle gives the same residual.
struct ThetaFit {
  double theta;
  double residual;
  bool degenerate;
};

ThetaFit fit_theta(const SpectralField& u_minus, const SpectralField& u_plus);

// Asymptotic datum whose scattering image is e^{i theta} u_-:
// (u_-)_m = e^{-i d pi/4} (-i)^m e^{i nu pi/2} psi_m.
SpectralField u_minus_from_psi(const StationarySolution& sol,
                               const RotatingPointSpec& spec);

// Levenberg-Marquardt on F(alpha, theta) = S(alpha) - e^{i theta} alpha over
// the real and imaginary parts of alpha and theta, with Broyden updates
// between finite-difference Jacobians. Budget is counted in evaluations of S.
struct RefineOptions {
  int max_evals = 600;
  double tol = 1e-9;
  bool verbose = false;
};

struct RefineResult {
  SpectralField u_minus;
  double theta = 0.0;
  double residual = 0.0;     // ||S(u_-) - e^{i theta} u_-||
  bool converged = false;
  int evals = 0;
  std::vector<double> residual_log;  // accepted-step history
};

RefineResult refine_rotating_point(const SpectralField& init_u_minus,
                                   double init_theta,
                                   const ScatterConfig& cfg,
                                   const TransformPlan& plan,
                                   const RefineOptions& opts = {});

}  // namespace lenscatter
