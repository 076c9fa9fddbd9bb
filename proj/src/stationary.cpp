#include "lenscatter/stationary.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lenscatter {

namespace {

constexpr double kPi = std::numbers::pi;

// Residual of the even-real elliptic system in the K = ceil(M/2) unknowns
// b_n = psi_{2n}.
struct EvenRealProblem {
  const TransformPlan& plan;
  double nu, sigma, coupling;
  int d, M, K;

  EvenRealProblem(const TransformPlan& p, double nu_, double sigma_,
                  double coupling_, int d_)
      : plan(p), nu(nu_), sigma(sigma_), coupling(coupling_), d(d_),
        M(p.modes()), K((p.modes() + 1) / 2) {}

  SpectralField field_of(const Eigen::VectorXd& b) const {
    SpectralField f = zero_field(M);
    for (int n = 0; n < K; ++n) f.coeffs[2 * n] = b[n];
    return f;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& b) const {
    SpectralField f = field_of(b);
    std::vector<cplx> vals = plan.synthesize(f);
    for (cplx& z : vals) {
      double re = z.real();
      z = std::pow(re * re, sigma) * re;
    }
    SpectralField nl = plan.analyze(vals);
    Eigen::VectorXd r(K);
    for (int n = 0; n < K; ++n)
      r[n] = (0.5 * d + 2 * n - nu) * b[n] + coupling * nl.coeffs[2 * n].real();
    return r;
  }
};

// Damped Newton with a forward-difference Jacobian. Returns true once the
// residual norm is at or below tol; false when the line search stalls, the
// Jacobian degenerates, or max_iter runs out.
bool newton_solve(const EvenRealProblem& prob, Eigen::VectorXd& b, double tol,
                  int max_iter, int& iterations, double& rn) {
  Eigen::VectorXd r = prob.residual(b);
  rn = r.norm();
  for (int it = 0; it < max_iter && rn > tol; ++it) {
    Eigen::MatrixXd J(prob.K, prob.K);
    for (int n = 0; n < prob.K; ++n) {
      double h = 1e-7 * std::max(1.0, std::abs(b[n]));
      Eigen::VectorXd bp = b;
      bp[n] += h;
      J.col(n) = (prob.residual(bp) - r) / h;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    if (qr.rank() < prob.K) return false;
    Eigen::VectorXd delta = qr.solve(-r);
    double lam = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half, lam *= 0.5) {
      Eigen::VectorXd bt = b + lam * delta;
      Eigen::VectorXd rt = prob.residual(bt);
      if (rt.norm() < rn * (1.0 - 1e-4 * lam)) {
        b = bt;
        r = rt;
        rn = rt.norm();
        accepted = true;
        break;
      }
    }
    ++iterations;
    if (!accepted) return false;
  }
  return rn <= tol;
}

}  // namespace

double nu_from_theta(int j, double theta, int d) {
  if (j < 1) throw std::invalid_argument("rotation index j must be >= 1");
  if (!std::isfinite(theta)) throw std::invalid_argument("non-finite theta");
  double nu = 0.5 * d - theta / kPi + 2.0 * j;
  if (!(nu > 0.5 * d))
    throw std::invalid_argument("frequency nu must exceed d/2");
  return nu;
}

RotatingPointSpec make_rotating_spec(int j, double theta, int d,
                                     double sigma) {
  if (sigma <= 0) throw std::invalid_argument("sigma must be positive");
  return {j, theta, d, sigma, nu_from_theta(j, theta, d)};
}

SpectralField default_stationary_init(const RotatingPointSpec& spec, int M) {
  // c solving (lambda_0 - nu) + c^{2 sigma} int h_0^{2 sigma + 2} = 0
  double p = 2.0 * spec.sigma + 2.0;
  // int h_0^p = pi^{-p/4} sqrt(2 pi / p)
  double q = std::pow(kPi, -0.25 * p) * std::sqrt(2.0 * kPi / p);
  double c = std::pow((spec.nu - 0.5 * spec.d) / q, 1.0 / (2.0 * spec.sigma));
  SpectralField f = zero_field(M);
  f.coeffs[0] = c;
  return f;
}

StationarySolution solve_stationary(const RotatingPointSpec& spec, int M,
                                    const SpectralField& init,
                                    const StationaryOptions& opts) {
  TransformPlan plan(M);
  if (init.modes() != M) throw std::invalid_argument("init has wrong mode count");
  double norm = l2_norm(init);
  if (norm == 0.0) throw std::invalid_argument("init must be nonzero");
  for (int m = 0; m < M; ++m) {
    if (std::abs(init.coeffs[m].imag()) > 1e-12 * norm)
      throw std::invalid_argument("init must be real");
    if (m % 2 && std::abs(init.coeffs[m]) > 1e-12 * norm)
      throw std::invalid_argument("init must be even");
  }

  EvenRealProblem prob(plan, spec.nu, spec.sigma, opts.coupling, spec.d);
  Eigen::VectorXd b(prob.K);
  for (int n = 0; n < prob.K; ++n) b[n] = init.coeffs[2 * n].real();

  StationarySolution sol;
  double rn = 0.0;
  bool ok = newton_solve(prob, b, opts.tol, opts.max_iter, sol.iterations, rn);

  // Far up the branch a bare Gaussian seed can leave the Newton basin.
  // Fall back to continuation in nu from the weakly nonlinear end, where
  // the seed is nearly exact, marching to the target in rungs of <= 1/2.
  const double nu_lo = 0.5 * spec.d + 0.5;
  if (!ok && spec.nu > nu_lo + 1e-12) {
    RotatingPointSpec rung = spec;
    rung.nu = nu_lo;
    SpectralField seed = default_stationary_init(rung, M);
    for (int n = 0; n < prob.K; ++n) b[n] = seed.coeffs[2 * n].real();
    const int rungs = static_cast<int>(std::ceil((spec.nu - nu_lo) / 0.5));
    ok = true;
    for (int k = 0; k <= rungs && ok; ++k) {
      double nu_k = nu_lo + (spec.nu - nu_lo) * k / rungs;
      EvenRealProblem pk(plan, nu_k, spec.sigma, opts.coupling, spec.d);
      ok = newton_solve(pk, b, opts.tol, opts.max_iter, sol.iterations, rn);
    }
  }
  if (!ok)
    throw std::runtime_error("stationary solve did not converge, residual " +
                             std::to_string(rn));
  sol.psi = prob.field_of(b);
  sol.nu = spec.nu;
  sol.sigma = spec.sigma;
  sol.residual = rn;
  return sol;
}

std::vector<StationarySolution> continue_in_sigma(
    const RotatingPointSpec& spec, const StationarySolution& base,
    double sigma_target, int steps, const StationaryOptions& opts) {
  if (steps < 0) throw std::invalid_argument("negative continuation steps");
  std::vector<StationarySolution> path{base};
  if (steps == 0 || sigma_target == base.sigma) return path;
  const int M = base.psi.modes();
  for (int i = 1; i <= steps; ++i) {
    RotatingPointSpec s = spec;
    s.sigma = base.sigma + (sigma_target - base.sigma) * i / steps;
    path.push_back(solve_stationary(s, M, path.back().psi, opts));
  }
  return path;
}

ThetaFit fit_theta(const SpectralField& u_minus, const SpectralField& u_plus) {
  cplx ip = l2_inner(u_plus, u_minus);
  double scale = l2_norm(u_plus) * l2_norm(u_minus);
  ThetaFit fit;
  fit.degenerate = std::abs(ip) <= 1e-13 * std::max(scale, 1e-300);
  fit.theta = fit.degenerate ? 0.0 : std::arg(ip);
  SpectralField diff = u_plus;
  cplx rot = std::polar(1.0, fit.theta);
  for (int m = 0; m < diff.modes(); ++m) diff.coeffs[m] -= rot * u_minus.coeffs[m];
  fit.residual = l2_norm(diff);
  return fit;
}

SpectralField u_minus_from_psi(const StationarySolution& sol,
                               const RotatingPointSpec& spec) {
  SpectralField out = fourier(sol.psi);
  cplx c = std::polar(1.0, -0.25 * kPi * spec.d + 0.5 * kPi * spec.nu);
  for (cplx& a : out.coeffs) a *= c;
  return out;
}

namespace {

Eigen::VectorXd pack(const SpectralField& f, double theta) {
  const int M = f.modes();
  Eigen::VectorXd z(2 * M + 1);
  for (int m = 0; m < M; ++m) {
    z[2 * m] = f.coeffs[m].real();
    z[2 * m + 1] = f.coeffs[m].imag();
  }
  z[2 * M] = theta;
  return z;
}

SpectralField unpack_field(const Eigen::VectorXd& z, int M) {
  SpectralField f = zero_field(M);
  for (int m = 0; m < M; ++m) f.coeffs[m] = cplx(z[2 * m], z[2 * m + 1]);
  return f;
}

}  // namespace

RefineResult refine_rotating_point(const SpectralField& init_u_minus,
                                   double init_theta, const ScatterConfig& cfg,
                                   const TransformPlan& plan,
                                   const RefineOptions& opts) {
  const int M = init_u_minus.modes();
  if (l2_norm(init_u_minus) == 0.0)
    throw std::invalid_argument("refinement needs a nonzero initial state");
  const int NZ = 2 * M + 1, NF = 2 * M;
  int evals = 0;

  auto eval = [&](const Eigen::VectorXd& z, Eigen::VectorXd& f) -> bool {
    SpectralField u = unpack_field(z, M);
    ScatterOutcome o = scatter_recording(u, cfg, plan);
    ++evals;
    if (o.abort) return false;
    cplx rot = std::polar(1.0, z[NZ - 1]);
    f.resize(NF);
    for (int m = 0; m < M; ++m) {
      cplx r = o.u_plus.coeffs[m] - rot * u.coeffs[m];
      f[2 * m] = r.real();
      f[2 * m + 1] = r.imag();
    }
    return true;
  };

  Eigen::VectorXd z = pack(init_u_minus, init_theta), f(NF);
  if (!eval(z, f))
    throw std::runtime_error("refinement initial scatter run aborted");
  double rn = f.norm();

  RefineResult best;
  auto record_best = [&](const Eigen::VectorXd& zz, double rr) {
    best.u_minus = unpack_field(zz, M);
    best.theta = zz[NZ - 1];
    best.residual = rr;
  };
  record_best(z, rn);
  best.residual_log.push_back(rn);

  Eigen::MatrixXd J(NF, NZ);
  auto fd_jacobian = [&]() -> bool {
    for (int i = 0; i < NZ && evals < opts.max_evals; ++i) {
      double h = 1e-7 * std::max(1.0, std::abs(z[i]));
      Eigen::VectorXd zp = z, fp(NF);
      zp[i] += h;
      if (!eval(zp, fp)) return false;
      J.col(i) = (fp - f) / h;
    }
    return evals < opts.max_evals;
  };
  if (!fd_jacobian()) {
    best.evals = evals;
    return best;
  }

  double mu = 1e-4;
  int rejects = 0, flat = 0;
  while (evals < opts.max_evals && rn > opts.tol) {
    Eigen::MatrixXd A = J.transpose() * J;
    A.diagonal() += mu * A.diagonal();
    Eigen::VectorXd g = J.transpose() * f;
    Eigen::VectorXd delta = A.ldlt().solve(-g);
    if (!delta.allFinite()) {
      mu *= 10;
      if (++rejects > 12) break;
      continue;
    }
    Eigen::VectorXd zt = z + delta, ft(NF);
    bool ok = eval(zt, ft);
    if (ok && ft.norm() < rn) {
      double improvement = (rn - ft.norm()) / rn;
      // Broyden update keeps the Jacobian roughly current between the
      // expensive finite-difference rebuilds
      Eigen::VectorXd df = ft - f;
      J += (df - J * delta) * delta.transpose() / delta.squaredNorm();
      z = zt;
      f = ft;
      rn = ft.norm();
      record_best(z, rn);
      best.residual_log.push_back(rn);
      mu = std::max(mu / 3.0, 1e-12);
      rejects = 0;
      flat = improvement < 1e-4 ? flat + 1 : 0;
      if (flat >= 6) break;  // residual floor reached
    } else {
      mu *= 4;
      if (++rejects >= 8) {
        if (!fd_jacobian()) break;
        mu = 1e-4;
        rejects = 0;
      }
    }
  }
  best.converged = rn <= opts.tol;
  best.evals = evals;
  return best;
}

}  // namespace lenscatter
