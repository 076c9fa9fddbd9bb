#include "lenscatter/hermite.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lenscatter {

namespace {

constexpr double kQuarterRootPiInv = 0.7511255444649424828587030047762276930510;

// Joint rescale bound for the three-term recurrence carry, a power of two so
// rescaling is exact; the outstanding scale is tracked as an integer count.
constexpr double kBig = 0x1p465;
constexpr double kBigInv = 0x1p-465;
constexpr double kLn2 = 0.6931471805599453094172321214581765680755;

void check_modes(int M) {
  if (M < 1 || M > kMaxModes)
    throw std::invalid_argument("mode count must be in [1, " +
                                std::to_string(kMaxModes) + "], got " +
                                std::to_string(M));
}

// Recurrence coefficients h_{m+1} = a_m x h_m - b_m h_{m-1}, precomputed once
// per M so the per-entry work in transforms is multiply-add only.
struct RecTables {
  std::vector<double> a, b;

  explicit RecTables(int M) : a(M), b(M) {
    for (int m = 0; m < M; ++m) {
      a[m] = std::sqrt(2.0 / (m + 1));
      b[m] = std::sqrt(static_cast<double>(m) / (m + 1));
    }
  }
};

// One step of the orthonormal-Hermite-function recurrence on the carried pair
// (p_{m-1}, p_m) with true value h_m = p_m * 2^(465 n) * exp(-x^2/2).
struct RecurrenceCarry {
  double x;
  double x2half;
  double pm1 = 0.0;
  double p = kQuarterRootPiInv;
  int n = 0;
  double escale;  // 2^(465 n) exp(-x^2/2), refreshed only when n changes

  explicit RecurrenceCarry(double x_) : x(x_), x2half(0.5 * x_ * x_) {
    refresh();
  }

  void refresh() { escale = std::exp(465.0 * n * kLn2 - x2half); }

  // value of h_m for the current index; underflow to 0 is accurate: the
  // rescale policy keeps |p * escale| within ~1e-160 of the true value
  double value() const { return p * escale; }

  void advance(const double* a, const double* b, int m) {  // index m -> m+1
    double next = a[m] * x * p - b[m] * pm1;
    pm1 = p;
    p = next;
    if (std::abs(p) > kBig) {
      p *= kBigInv;
      pm1 *= kBigInv;
      ++n;
      refresh();
    } else if (std::abs(p) < kBigInv && std::abs(pm1) < kBigInv &&
               (p != 0.0 || pm1 != 0.0)) {
      p *= kBig;
      pm1 *= kBig;
      --n;
      refresh();
    }
  }
};

void row_with_tables(const double* a, const double* b, double x, int M,
                     double* out) {
  RecurrenceCarry c(x);
  for (int m = 0; m < M; ++m) {
    out[m] = c.value();
    if (m + 1 < M) c.advance(a, b, m);
  }
}

}  // namespace

namespace detail {

void hermite_function_row(double x, int M, double* out) {
  RecTables t(M);
  row_with_tables(t.a.data(), t.b.data(), x, M, out);
}

std::vector<double> golub_welsch_nodes(int M) {
  // Jacobi matrix of the orthonormal Hermite polynomials: zero diagonal,
  // off-diagonal sqrt(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd sub(std::max(M - 1, 1));
  for (int k = 1; k < M; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(std::max(M - 1, 0)),
                            Eigen::EigenvaluesOnly);
  std::vector<double> nodes(es.eigenvalues().data(),
                            es.eigenvalues().data() + M);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

namespace {

// h_M and h_{M-1} as a carried pair sharing one scale; enough for Newton
// steps, where the scale cancels.
struct EdgePair {
  double pM, pMm1;
};

EdgePair edge_pair(const RecTables& t, double x, int M) {
  RecurrenceCarry c(x);
  for (int m = 0; m < M; ++m) c.advance(t.a.data(), t.b.data(), m);
  return {c.p, c.pm1};
}

// WKB count of zeros of h_M to the right of sqrt(2M+1)*s; solving
// phase(s) = (k - 1/4) pi / (2M+1) places the k-th zero from the edge.
double wkb_guess(int M, int k) {
  const double nu = 2.0 * M + 1.0;
  const double target = (k - 0.25) * std::numbers::pi / nu;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    double s = 0.5 * (lo + hi);
    double phase = 0.5 * (std::acos(s) - s * std::sqrt(1.0 - s * s));
    (phase > target ? lo : hi) = s;
  }
  return std::sqrt(nu) * 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> newton_nodes(int M) {
  const int half = M / 2;
  const double sq2M = std::sqrt(2.0 * M);
  const RecTables tables(M);
  std::vector<double> pos(half);
  for (int k = 1; k <= half; ++k) {
    double x = wkb_guess(M, k);
    double prev_guess = k > 1 ? wkb_guess(M, k - 1) : std::sqrt(2.0 * M + 1.0);
    double next_guess = k < half ? wkb_guess(M, k + 1) : 0.0;
    double cap = 0.5 * std::max(prev_guess - x, x - next_guess);
    for (int it = 0; it < 60; ++it) {
      EdgePair e = edge_pair(tables, x, M);
      double deriv = sq2M * e.pMm1 - x * e.pM;
      if (deriv == 0.0) break;
      double step = e.pM / deriv;
      if (std::abs(step) > cap) step = step > 0 ? cap : -cap;
      x -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    pos[k - 1] = x;
  }
  std::vector<double> nodes(M);
  for (int k = 0; k < half; ++k) {
    nodes[M - 1 - k] = pos[k];
    nodes[k] = -pos[k];
  }
  if (M % 2) nodes[half] = 0.0;
  return nodes;
}

}  // namespace detail

QuadratureRule build_quadrature(int M) {
  check_modes(M);
  QuadratureRule r;
  r.M = M;
  r.nodes = M <= 512 ? detail::golub_welsch_nodes(M) : detail::newton_nodes(M);
  // Enforce exact antisymmetry (Golub-Welsch eigenvalues are symmetric only
  // to solver precision).
  for (int k = 0; k < M / 2; ++k) {
    double s = 0.5 * (r.nodes[M - 1 - k] - r.nodes[k]);
    r.nodes[M - 1 - k] = s;
    r.nodes[k] = -s;
  }
  if (M % 2) r.nodes[M / 2] = 0.0;

  r.weights.resize(M);
  r.log_scaled_weights.resize(M);
  const RecTables tables(M);
  std::vector<double> row(M);
  for (int k = 0; k < M; ++k) {
    row_with_tables(tables.a.data(), tables.b.data(), r.nodes[k], M,
                    row.data());
    double christoffel = 0.0;  // sum h_m(x_k)^2 = exp(-x_k^2) / w_k
    for (int m = 0; m < M; ++m) christoffel += row[m] * row[m];
    double x2 = r.nodes[k] * r.nodes[k];
    r.log_scaled_weights[k] = -0.5 * x2 - std::log(christoffel);
    r.weights[k] = std::exp(-x2 - std::log(christoffel));
  }
  // Symmetric nodes get bit-equal weights; the recurrence is parity-exact,
  // but average anyway so the invariant never depends on rounding details.
  for (int k = 0; k < M / 2; ++k) {
    double w = 0.5 * (r.weights[k] + r.weights[M - 1 - k]);
    r.weights[k] = r.weights[M - 1 - k] = w;
    double lw = 0.5 * (r.log_scaled_weights[k] + r.log_scaled_weights[M - 1 - k]);
    r.log_scaled_weights[k] = r.log_scaled_weights[M - 1 - k] = lw;
  }
  return r;
}

SpectralField zero_field(int M) {
  check_modes(M);
  SpectralField f;
  f.coeffs.assign(M, cplx(0.0, 0.0));
  return f;
}

SpectralField basis_field(int M, int m) {
  SpectralField f = zero_field(M);
  if (m < 0 || m >= M) throw std::invalid_argument("basis index out of range");
  f.coeffs[m] = 1.0;
  return f;
}

TransformPlan::TransformPlan(int M)
    : TransformPlan(M, static_cast<long long>(M) * M * 8 <= (256LL << 20)) {}

TransformPlan::TransformPlan(int M, bool store_matrix)
    : rule_(build_quadrature(M)) {
  RecTables t(M);
  rec_a_ = std::move(t.a);
  rec_b_ = std::move(t.b);
  scaled_weights_.resize(M);
  for (int k = 0; k < M; ++k)
    scaled_weights_[k] =
        std::exp(rule_.log_scaled_weights[k] + 0.5 * rule_.nodes[k] * rule_.nodes[k]);
  if (store_matrix) {
    basis_.resize(static_cast<size_t>(M) * M);
    for (int k = 0; k < M; ++k)
      row_with_tables(rec_a_.data(), rec_b_.data(), rule_.nodes[k], M,
                      basis_.data() + static_cast<size_t>(k) * M);
  }
}

std::vector<cplx> TransformPlan::synthesize(const SpectralField& f) const {
  const int M = modes();
  if (f.modes() != M)
    throw std::invalid_argument("field/plan mode count mismatch");
  std::vector<cplx> vals(M);
  if (!basis_.empty()) {
    for (int k = 0; k < M; ++k) {
      const double* row = basis_.data() + static_cast<size_t>(k) * M;
      double re = 0.0, im = 0.0;
      for (int m = 0; m < M; ++m) {
        re += row[m] * f.coeffs[m].real();
        im += row[m] * f.coeffs[m].imag();
      }
      vals[k] = cplx(re, im);
    }
  } else {
    std::vector<double> row(M);
    for (int k = 0; k < M; ++k) {
      row_with_tables(rec_a_.data(), rec_b_.data(), rule_.nodes[k], M,
                      row.data());
      double re = 0.0, im = 0.0;
      for (int m = 0; m < M; ++m) {
        re += row[m] * f.coeffs[m].real();
        im += row[m] * f.coeffs[m].imag();
      }
      vals[k] = cplx(re, im);
    }
  }
  return vals;
}

SpectralField TransformPlan::analyze(const std::vector<cplx>& values) const {
  const int M = modes();
  if (static_cast<int>(values.size()) != M)
    throw std::invalid_argument("value/plan size mismatch");
  for (const cplx& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("non-finite node value in analyze");
  SpectralField out = zero_field(M);
  std::vector<double> row;
  if (basis_.empty()) row.resize(M);
  for (int k = 0; k < M; ++k) {
    const double* rp;
    if (!basis_.empty()) {
      rp = basis_.data() + static_cast<size_t>(k) * M;
    } else {
      row_with_tables(rec_a_.data(), rec_b_.data(), rule_.nodes[k], M,
                      row.data());
      rp = row.data();
    }
    const double gre = scaled_weights_[k] * values[k].real();
    const double gim = scaled_weights_[k] * values[k].imag();
    for (int m = 0; m < M; ++m)
      out.coeffs[m] += cplx(rp[m] * gre, rp[m] * gim);
  }
  return out;
}

std::vector<cplx> evaluate_at(const SpectralField& f,
                              const std::vector<double>& points) {
  const int M = f.modes();
  check_modes(M);
  std::vector<cplx> vals(points.size());
  const RecTables tables(M);
  std::vector<double> row(M);
  for (size_t k = 0; k < points.size(); ++k) {
    row_with_tables(tables.a.data(), tables.b.data(), points[k], M,
                    row.data());
    double re = 0.0, im = 0.0;
    for (int m = 0; m < M; ++m) {
      re += row[m] * f.coeffs[m].real();
      im += row[m] * f.coeffs[m].imag();
    }
    vals[k] = cplx(re, im);
  }
  return vals;
}

namespace {

// (-i)^m for dir=-1, (+i)^m for dir=+1, applied as exact component swaps.
SpectralField quarter_turns(const SpectralField& f, int dir) {
  SpectralField out = f;
  const int M = f.modes();
  for (int m = 0; m < M; ++m) {
    const cplx a = f.coeffs[m];
    switch (m & 3) {
      case 0: break;
      case 1: out.coeffs[m] = dir > 0 ? cplx(-a.imag(), a.real())
                                      : cplx(a.imag(), -a.real()); break;
      case 2: out.coeffs[m] = cplx(-a.real(), -a.imag()); break;
      case 3: out.coeffs[m] = dir > 0 ? cplx(a.imag(), -a.real())
                                      : cplx(-a.imag(), a.real()); break;
    }
  }
  return out;
}

}  // namespace

SpectralField fourier(const SpectralField& f) { return quarter_turns(f, -1); }
SpectralField inverse_fourier(const SpectralField& f) { return quarter_turns(f, +1); }

SpectralField reflect(const SpectralField& f) {
  SpectralField out = f;
  for (int m = 1; m < f.modes(); m += 2) out.coeffs[m] = -out.coeffs[m];
  return out;
}

SpectralField differentiate(const SpectralField& f) {
  const int M = f.modes();
  SpectralField out = zero_field(M);
  for (int m = 0; m < M; ++m) {
    cplx v = 0.0;
    if (m + 1 < M) v += std::sqrt(0.5 * (m + 1)) * f.coeffs[m + 1];
    if (m >= 1) v -= std::sqrt(0.5 * m) * f.coeffs[m - 1];
    out.coeffs[m] = v;
  }
  return out;
}

SpectralField multiply_by_x(const SpectralField& f) {
  const int M = f.modes();
  SpectralField out = zero_field(M);
  for (int m = 0; m < M; ++m) {
    cplx v = 0.0;
    if (m + 1 < M) v += std::sqrt(0.5 * (m + 1)) * f.coeffs[m + 1];
    if (m >= 1) v += std::sqrt(0.5 * m) * f.coeffs[m - 1];
    out.coeffs[m] = v;
  }
  return out;
}

double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (const cplx& a : f.coeffs) s += std::norm(a);
  return std::sqrt(s);
}

cplx l2_inner(const SpectralField& a, const SpectralField& b) {
  if (a.modes() != b.modes())
    throw std::invalid_argument("inner product mode count mismatch");
  cplx s = 0.0;
  for (int m = 0; m < a.modes(); ++m) s += a.coeffs[m] * std::conj(b.coeffs[m]);
  return s;
}

double sigma_norm(const SpectralField& f, int k, int d) {
  if (k < 0) throw std::invalid_argument("sigma_norm order must be >= 0");
  double s = 0.0;
  for (int m = 0; m < f.modes(); ++m)
    s += std::pow(0.5 * d + m, k) * std::norm(f.coeffs[m]);
  return std::sqrt(s);
}

double lp_norm(const TransformPlan& plan, const SpectralField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
  std::vector<cplx> vals = plan.synthesize(f);
  double s = 0.0;
  for (int k = 0; k < plan.modes(); ++k) {
    double a = std::abs(vals[k]);
    if (a == 0.0) continue;
    s += plan.scaled_weights()[k] * std::pow(a, p);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace lenscatter
