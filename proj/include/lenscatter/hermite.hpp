#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace lenscatter {

using cplx = std::complex<double>;

inline constexpr int kMaxModes = 16384;

// Gauss-Hermite rule for weight exp(-x^2). Nodes ascending and antisymmetric,
// x_k = -x_{M-1-k} exactly. Raw weights underflow to 0.0 once |x_k| exceeds
// ~27.3; log_scaled_weights = log(w_k) + x_k^2/2 stays finite for every
// supported M and is what the transforms use.
struct QuadratureRule {
  int M = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> log_scaled_weights;
};

QuadratureRule build_quadrature(int M);

// Coefficients in the Hermite-function basis h_m(x) = H_m(x) exp(-x^2/2),
// orthonormal in L^2(R); H_m are the orthonormal Hermite polynomials for
// weight exp(-x^2). h_m is an eigenfunction of -(1/2)d^2/dx^2 + x^2/2 with
// eigenvalue m + 1/2.
struct SpectralField {
  std::vector<cplx> coeffs;

  int modes() const { return static_cast<int>(coeffs.size()); }
};

SpectralField zero_field(int M);
SpectralField basis_field(int M, int m);

// Precomputed node-space <-> coefficient-space machinery for one M.
// analyze(synthesize(f)) and synthesize(analyze(v)) are identities up to
// roundoff: with M nodes and M modes the weighted Vandermonde is square
// orthogonal. The basis matrix is materialized when it fits comfortably in
// memory; otherwise both transforms stream the recurrence per node.
class TransformPlan {
 public:
  explicit TransformPlan(int M);
  TransformPlan(int M, bool store_matrix);

  const QuadratureRule& rule() const { return rule_; }
  int modes() const { return rule_.M; }
  // w_k exp(x_k^2): O(1) quantities, the quadrature weights against
  // |f|^2-type integrands with the Gaussian folded into the basis values.
  const std::vector<double>& scaled_weights() const { return scaled_weights_; }
  bool matrix_stored() const { return !basis_.empty(); }

  std::vector<cplx> synthesize(const SpectralField& f) const;
  SpectralField analyze(const std::vector<cplx>& values) const;

 private:
  QuadratureRule rule_;
  std::vector<double> scaled_weights_;
  std::vector<double> basis_;        // row-major [node][mode] h_m(x_k), or empty
  std::vector<double> rec_a_, rec_b_;  // recurrence coefficients for streaming
};

// Values of the field at arbitrary points, via the same stable recurrence.
std::vector<cplx> evaluate_at(const SpectralField& f,
                              const std::vector<double>& points);

// Coefficient-space operators. fourier multiplies alpha_m by (-i)^m
// (inverse_fourier by i^m) through exact component swaps, so four
// applications reproduce the input bit-for-bit and Parseval is exact.
SpectralField fourier(const SpectralField& f);
SpectralField inverse_fourier(const SpectralField& f);
SpectralField reflect(const SpectralField& f);

// d/dx and multiplication by x, truncated to the first M modes:
//   (f')_m  = sqrt((m+1)/2) a_{m+1} - sqrt(m/2) a_{m-1}
//   (x f)_m = sqrt((m+1)/2) a_{m+1} + sqrt(m/2) a_{m-1}
SpectralField differentiate(const SpectralField& f);
SpectralField multiply_by_x(const SpectralField& f);

double l2_norm(const SpectralField& f);
cplx l2_inner(const SpectralField& a, const SpectralField& b);  // sum a conj(b)

// sqrt(sum_m (d/2 + m)^k |a_m|^2), the discrete Sigma^k norm.
double sigma_norm(const SpectralField& f, int k, int d);

// (sum_k s_k |f(x_k)|^p)^(1/p) with s_k = w_k exp(x_k^2); p >= 1.
double lp_norm(const TransformPlan& plan, const SpectralField& f, double p);

namespace detail {
// Hermite function values h_m(x), m = 0..M-1, carried in rescaled variables
// so no intermediate over- or underflows for any |x| and M <= kMaxModes.
void hermite_function_row(double x, int M, double* out);
std::vector<double> golub_welsch_nodes(int M);
std::vector<double> newton_nodes(int M);
}  // namespace detail

}  // namespace lenscatter
