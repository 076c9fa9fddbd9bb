// Acceptance gate: one PASS/FAIL line per shipped claim, nonzero exit if any
// fail. Heavier claims run through the experiment drivers and are judged on
// the artifacts they write, the rest call the library directly.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lenscatter/experiments.hpp"
#include "lenscatter/lens.hpp"
#include "lenscatter/observables.hpp"
#include "lenscatter/random_data.hpp"
#include "lenscatter/stationary.hpp"

using namespace lenscatter;
using json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
const std::string kOutDir = "acceptance_out";

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::vector<double>> csv_rows(const std::string& path) {
  std::istringstream is(slurp(path));
  std::string line;
  std::getline(is, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

SpectralField unit_mass(SpectralField f, double mass = 1.0) {
  double n = l2_norm(f);
  for (cplx& a : f.coeffs) a *= mass / n;
  return f;
}

double dist(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  for (int m = 0; m < d.modes(); ++m) d.coeffs[m] -= b.coeffs[m];
  return l2_norm(d);
}

RunConfig gate_config(const std::string& experiment) {
  RunConfig cfg = default_config(experiment, false);
  cfg.out = kOutDir;
  cfg.stamp = "gate";
  return cfg;
}

std::string meta_path(const RunResult& r) {
  for (const auto& o : r.outputs)
    if (o.size() > 10 && o.substr(o.size() - 10) == ".meta.json") return o;
  throw std::runtime_error("run produced no metadata sidecar");
}

std::string csv_path(const RunResult& r) {
  for (const auto& o : r.outputs)
    if (o.size() > 4 && o.substr(o.size() - 4) == ".csv") return o;
  throw std::runtime_error("run produced no CSV");
}

struct Check {
  bool pass;
  std::string detail;
};

int failures = 0;

void run_criterion(int idx, const char* name, const std::function<Check()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  Check c{false, ""};
  try {
    c = fn();
  } catch (const std::exception& e) {
    c = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] %2d %-38s %s (%.1fs)\n", c.pass ? "PASS" : "FAIL", idx,
              name, c.detail.c_str(), secs);
  std::fflush(stdout);
  if (!c.pass) ++failures;
}

// criteria 8 and 9 share one sweep; the run happens once, here
std::string blowup_csv;
json blowup_runs;

}  // namespace

int main() {
  std::printf("scattering-solver acceptance gate\n");

  run_criterion(1, "zero-coupling scattering identity", [] {
    TransformPlan plan(64);
    double worst = 0;
    for (int s = 1; s <= 20; ++s) {
      SpectralField f =
          unit_mass(gen_random_state(RandomKind::unit_square, 64, s));
      for (double tau : {0.1, 0.01}) {
        ScatterConfig cfg;
        cfg.coupling = 0.0;
        cfg.tau = tau;
        worst = std::max(worst, dist(scatter(f, cfg, plan), f));
      }
    }
    return Check{worst <= 1e-10, "max |S(u)-u| = " + num(worst) + " <= 1e-10"};
  });

  run_criterion(2, "spectral transform integrity", [] {
    double worst_rt = 0;
    for (int M : {64, 256, 1024}) {
      TransformPlan plan(M);
      SpectralField f =
          unit_mass(gen_random_state(RandomKind::unit_square, M, 99));
      worst_rt = std::max(worst_rt, dist(plan.analyze(plan.synthesize(f)), f));
    }

    SpectralField g = gen_random_state(RandomKind::unit_square, 256, 7);
    SpectralField g4 = fourier(fourier(fourier(fourier(g))));
    bool bits = std::memcmp(g.coeffs.data(), g4.coeffs.data(),
                            sizeof(cplx) * 256) == 0;

    SpectralField f = zero_field(64);
    for (int m = 0; m < 64; ++m)
      f.coeffs[m] = std::exp(-0.5 * m) * cplx(std::cos(0.9 * m), std::sin(1.7 * m));
    SpectralField df = differentiate(f);
    const std::vector<double> xs = {-2.1, -0.5, 0.0, 0.9, 2.3};
    const double h = 1e-5;
    std::vector<double> xp = xs, xm = xs;
    for (double& x : xp) x += h;
    for (double& x : xm) x -= h;
    std::vector<cplx> fp = evaluate_at(f, xp), fm = evaluate_at(f, xm),
                      dv = evaluate_at(df, xs);
    double worst_fd = 0;
    for (size_t i = 0; i < xs.size(); ++i)
      worst_fd = std::max(worst_fd,
                          std::abs((fp[i] - fm[i]) / (2 * h) - dv[i]));

    bool pass = worst_rt <= 1e-10 && bits && worst_fd <= 1e-6;
    return Check{pass, "round trip " + num(worst_rt) +
                           ", quadruple Fourier bit-exact " +
                           (bits ? "yes" : "NO") + ", derivative vs FD " +
                           num(worst_fd)};
  });

  run_criterion(3, "invariant conservation across S", [] {
    RunConfig cfg = gate_config("conservation");  // M=200 tau=0.01, 50 samples
    RunResult r = run_experiment(cfg);
    if (r.exit_code != 0) return Check{false, "runner aborted: " + r.message};
    json meta = json::parse(slurp(meta_path(r)));
    double ratio = meta["summary"]["coarse_over_fine"].get<double>();
    int aborted = meta["summary"]["aborted_samples"].get<int>();

    double per_inv[4] = {0, 0, 0, 0};
    for (const auto& row : csv_rows(csv_path(r))) {
      if (static_cast<int>(row[2]) != cfg.em) continue;  // fine panel only
      for (int i = 0; i < 4; ++i) per_inv[i] = std::max(per_inv[i], row[3 + i]);
    }
    double worst = *std::max_element(per_inv, per_inv + 4);
    bool pass = worst <= 1e-3 && ratio >= 5.0 && aborted == 0;
    return Check{pass, "max fine gap " + num(worst) +
                           " <= 1e-3, coarse/fine ratio " + num(ratio) +
                           " >= 5"};
  });

  run_criterion(4, "second-moment identity, first order in tau", [] {
    // 64 modes of data on a 256-mode plan: headroom keeps collocation
    // aliasing below the tau error so the slope fit sees the true order
    TransformPlan plan(256);
    SpectralField seed = unit_mass(
        gen_random_state(RandomKind::lambda_weighted, 64, 12345), 0.5);
    SpectralField f = zero_field(256);
    for (int m = 0; m < 64; ++m) f.coeffs[m] = seed.coeffs[m];
    const std::vector<double> taus = {1e-3, 5e-4, 2.5e-4, 1.25e-4};
    std::vector<double> gaps;
    for (double tau : taus) {
      ScatterConfig cfg;
      cfg.tau = tau;
      gaps.push_back(moment_identity_gap(f, scatter(f, cfg, plan), 1, plan));
    }
    double slope = slope_fit(taus, gaps);
    bool pass = gaps[0] <= 1e-3 && slope >= 0.8 && slope <= 1.2;
    return Check{pass, "gap(tau=1e-3) = " + num(gaps[0]) +
                           " <= 1e-3, slope " + num(slope) + " in [0.8,1.2]"};
  });

  run_criterion(5, "critical rotating point pipeline", [] {
    const int M = 256;
    TransformPlan plan(M);
    RotatingPointSpec spec = make_rotating_spec(1, 0.0, 1, 2.0);
    StationarySolution sol =
        solve_stationary(spec, M, default_stationary_init(spec, M));
    SpectralField u_minus = u_minus_from_psi(sol, spec);

    const std::vector<double> taus = {1e-3, 5e-4, 2e-4, 1e-4};
    std::vector<double> errs;
    for (double tau : taus) {
      ScatterConfig cfg;
      cfg.tau = tau;
      errs.push_back(dist(scatter(u_minus, cfg, plan), u_minus));
    }
    double slope = slope_fit(taus, errs);
    bool pass = sol.residual <= 1e-10 && errs[0] <= 1e-4 &&
                errs.back() <= 1e-5 && slope >= 0.8 && slope <= 1.2;
    return Check{pass, "residual " + num(sol.residual) + ", error " +
                           num(errs[0]) + " @1e-3 / " + num(errs.back()) +
                           " @1e-4, slope " + num(slope)};
  });

  run_criterion(6, "supercritical residual floor", [] {
    RunConfig cfg = gate_config("supercritical_search");  // M=128, tau 2^-7
    cfg.sigma = 2.01;
    RunResult r = run_experiment(cfg);
    if (r.exit_code != 0) return Check{false, "runner aborted: " + r.message};
    json report;
    for (const auto& o : r.outputs)
      if (o.find(".meta.") == std::string::npos && o.size() > 5 &&
          o.substr(o.size() - 5) == ".json")
        report = json::parse(slurp(o));
    double r1 = report["runs"][0]["residual_refined"].get<double>();
    double r2 = report["runs"][1]["residual_refined"].get<double>();
    double lo = std::min(r1, r2), hi = std::max(r1, r2);
    bool pass = lo >= 3e-3 && hi <= 3e-2 && hi / lo < 2.0;
    return Check{pass, "floors " + num(r1) + " / " + num(r2) +
                           " in [3e-3,3e-2], ratio " + num(hi / lo) + " < 2"};
  });

  run_criterion(7, "long-range modulus convergence", [] {
    RunConfig cfg = gate_config("long_range");  // M=256, amplitude 0.1
    RunResult r = run_experiment(cfg);
    if (r.exit_code != 0) return Check{false, "runner aborted: " + r.message};
    json meta = json::parse(slurp(meta_path(r)));
    bool monotone = meta["summary"]["monotone_decreasing"].get<bool>();
    auto diffs = meta["summary"]["diffs"].get<std::vector<double>>();
    bool pass = monotone && diffs.size() == 6;
    return Check{pass, "gaps " + num(diffs.front()) + " .. " +
                           num(diffs.back()) + ", monotone " +
                           (monotone ? "yes" : "NO")};
  });

  run_criterion(8, "weighted-norm growth dichotomy", [] {
    RunConfig cfg = gate_config("sigma_blowup");  // M=2048, tau 2^-10, amp 10
    RunResult r = run_experiment(cfg);
    if (r.exit_code != 0) return Check{false, "runner aborted: " + r.message};
    blowup_csv = csv_path(r);
    json meta = json::parse(slurp(meta_path(r)));
    blowup_runs = meta["summary"]["runs"];
    double g_sub = 0, g_super = 0, drift = 0;
    for (const auto& run : blowup_runs) {
      double sigma = run["sigma"].get<double>();
      double g = run["growth_factor"].get<double>();
      drift = std::max(drift, run["mass_drift"].get<double>());
      if (sigma == 1.5) g_sub = g;
      if (sigma == 1.15) g_super = g;
    }
    bool pass = g_sub > 0 && g_sub <= 2.0 && g_super >= 10.0 && drift <= 1e-6;
    return Check{pass, "growth sigma=1.5: " + num(g_sub) +
                           " <= 2, sigma=1.15: " + num(g_super) +
                           " >= 10, mass drift " + num(drift)};
  });

  run_criterion(9, "weighted-norm growth slope bound", [] {
    if (blowup_csv.empty())
      return Check{false, "prerequisite sweep did not run"};
    std::vector<ObservableRecord> series;
    for (const auto& row : csv_rows(blowup_csv)) {
      if (row[0] != 1.15) continue;
      ObservableRecord rec{};
      rec.t_lens = row[1];
      rec.mass = row[2];
      rec.kinetic = row[3];
      rec.momentum = row[4];
      rec.centre = row[5];
      rec.sigma_norm = row[6];
      rec.j_norm = row[7];
      rec.linf = row[8];
      series.push_back(rec);
    }
    double slope = growth_slope(series, 10.0, 100.0);
    bool pass = slope >= 0.0 && slope <= 0.6;
    return Check{pass, "slope " + num(slope) + " in [0,0.6] over tan t in [10,100]"};
  });

  run_criterion(10, "focusing soliton reference curve", [] {
    const int M = 1024;
    TransformPlan plan(M);
    const auto& nodes = plan.rule().nodes;
    std::vector<cplx> vals(nodes.size());
    for (size_t k = 0; k < nodes.size(); ++k)
      vals[k] = 1.0 / std::cosh(nodes[k]);
    SpectralField phi = plan.analyze(vals);

    double l1 = 0;
    const auto& sw = plan.scaled_weights();
    for (size_t k = 0; k < sw.size(); ++k) l1 += sw[k] * std::abs(vals[k]);
    double fsup = std::abs(evaluate_at(fourier(phi), {0.0})[0]);
    double l1_err = std::abs(l1 - kPi);
    double fsup_err = std::abs(fsup - std::sqrt(kPi / 2));

    // march in dyadic segments and evaluate the peak spectrally at x = 0
    // (the symmetry point, where the even-symmetric profile attains its sup;
    // the node grid of an even-M plan straddles 0 and undersamples a peak
    // of width cos t by ~6% near the end of the track)
    EvolutionConfig ec;
    ec.sigma = 1.0;
    ec.sign = -1;
    ec.tau = 0x1p-12;
    LensState state{phi, 0.0};
    double worst = 0;
    const int segments = 94;  // 94/64 is the last checkpoint before pi/2-0.1
    for (int k = 1; k <= segments; ++k) {
      ec.t_start = state.t_lens;
      ec.t_end = k / 64.0;
      PropagationResult prop = propagate(state, ec, plan);
      if (prop.abort) return Check{false, "run aborted: " + prop.abort->reason};
      state = prop.state;
      double peak = std::abs(evaluate_at(state.field, {0.0})[0]);
      double ref = 1.0 / std::sqrt(std::cos(state.t_lens));
      worst = std::max(worst, std::abs(peak / ref - 1.0));
    }
    bool pass = worst <= 0.05 && l1_err <= 1e-8 && fsup_err <= 1e-8;
    return Check{pass, "peak deviation " + num(worst) +
                           " <= 5%, |L1 - pi| = " + num(l1_err) +
                           ", |sup - sqrt(pi/2)| = " + num(fsup_err)};
  });

  run_criterion(11, "flow continuity in the power", [] {
    RunConfig cfg = gate_config("continuity_sigma");  // M=256, tau 2^-10
    RunResult r = run_experiment(cfg);
    if (r.exit_code != 0) return Check{false, "runner aborted: " + r.message};
    json meta = json::parse(slurp(meta_path(r)));
    double spread = meta["summary"]["ratio_spread"].get<double>();
    bool pass = spread <= 3.0;
    return Check{pass, "sup|v - v_eps|/eps spread " + num(spread) +
                           " <= 3 over eps in {1e-1,1e-2,1e-3}"};
  });

  std::printf("acceptance: %d/11 passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
