// Acceptance gate: one self-contained check per shipped guarantee, each
// printing a single PASS/FAIL line. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "bihari/montecarlo.hpp"

using namespace bihari;

namespace {

int g_failures = 0;

void report(int index, const char* title, bool ok, const std::string& detail) {
  std::printf("[%2d/11] %s %s (%s)\n", index, ok ? "PASS" : "FAIL", title,
              detail.c_str());
  if (!ok) ++g_failures;
}

unsigned workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// --- 1. transform closed forms -------------------------------------------

void criterion_transform() {
  struct Case {
    EtaSpec eta;
    std::function<double(double)> G;
  };
  std::vector<Case> cases{
      {EtaSpec::linear(1.0), [](double x) { return std::log(x); }},
      {EtaSpec::power(1.0, 0.5), [](double x) { return 2.0 * (std::sqrt(x) - 1.0); }},
      {EtaSpec::square(1.0), [](double x) { return 1.0 - 1.0 / x; }},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    GTransform t(c.eta);
    for (double x : log_spaced(1e-3, 1e3, 64)) {
      worst = std::max(worst, rel_err(t.G(x).value(), c.G(x)));
      double back = t.G_inverse(t.G(x)).value();
      worst = std::max(worst, std::abs(back - x) / std::max(std::abs(x), 1e-300));
    }
  }
  report(1, "transform closed forms and inverse round trip", worst < 1e-8,
         "max rel err " + std::to_string(worst));
}

// --- 2. power-transform identity -----------------------------------------

void criterion_identity() {
  double worst = 0.0;
  for (const EtaSpec& eta : {EtaSpec::linear(1.0), EtaSpec::power(1.0, 0.5)}) {
    GTransform t(eta);
    for (double p : {0.25, 0.5, 0.75}) {
      for (double x : log_spaced(1e-2, 1e2, 32)) {
        double direct = t.tilde_G_p(p, x).value();
        double via_G = (1.0 - p) * t.G(std::pow(x, 1.0 / p)).value();
        worst = std::max(worst, std::abs(direct - via_G) /
                                    std::max(std::abs(via_G), 1.0));
        double inv = t.tilde_G_p_inverse(p, ExtReal(direct)).value();
        double via_inv =
            std::pow(t.G_inverse(ExtReal(direct / (1.0 - p))).value(), p);
        worst = std::max(worst, rel_err(inv, via_inv));
        worst = std::max(worst, std::abs(inv - x) / std::max(std::abs(x), 1e-300));
      }
    }
  }
  report(2, "power-transform identity and inverse", worst < 1e-7,
         "max rel err " + std::to_string(worst));
}

// --- 3. Gronwall reduction ------------------------------------------------

void criterion_gronwall() {
  GTransform t(EtaSpec::linear(1.0));
  double worst = 0.0;
  for (double p : {0.25, 0.5, 0.75}) {
    PExponents k = constants(p);
    for (double H : {0.5, 1.0, 2.0, 5.0}) {
      for (double A : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        struct Row {
          HCase hc;
          Variant var;
          double expect;
        };
        std::vector<Row> rows{
            {HCase::PredictableH, Variant::Sup,
             k.alpha1 * k.alpha2 * H * std::exp(k.beta * A)},
            {HCase::L1H, Variant::Sup, k.alpha1 * H * std::exp(k.beta * A)},
            {HCase::PredictableH, Variant::NoSup,
             k.alpha1 * k.alpha2 * H * std::exp(A)},
            {HCase::L1H, Variant::NoSup, k.alpha1 * H * std::exp(A)},
        };
        for (const Row& r : rows) {
          BoundResult b = concave_bound(t, p, r.hc, r.var, H, A);
          worst = std::max(worst, rel_err(b.value.value(), r.expect));
        }
      }
    }
  }
  report(3, "Gronwall reduction over the 60-point grid", worst < 1e-9,
         "max rel err " + std::to_string(worst));
}

// --- 4. dominance of the no-sup shape ------------------------------------

void criterion_dominance() {
  RngStream rng(40);
  std::size_t violations = 0;
  for (int i = 0; i < 500; ++i) {
    bool use_power = rng.uniform() < 0.5;
    double a = use_power ? 0.5 + 0.45 * rng.uniform() : 1.0;
    EtaSpec eta = use_power ? EtaSpec::power(0.5 + 1.5 * rng.uniform(), a)
                            : EtaSpec::linear(0.5 + 1.5 * rng.uniform());
    // eta_p is monotone when p > 1 - a
    double lo = 1.0 - a + 0.05;
    double p = lo + (0.95 - lo) * rng.uniform();
    double h = std::pow(10.0, 4.0 * rng.uniform() - 2.0);
    double x = 5.0 * rng.uniform();
    GTransform t(eta);
    auto [lhs, rhs] = remark34_pair(t, p, h, x);
    if (rhs.is_pos_inf()) continue;
    if (lhs.as_double() > rhs.value() * (1.0 + 1e-9)) ++violations;
  }
  report(4, "no-sup shape dominated by sup shape on 500 tuples", violations == 0,
         std::to_string(violations) + " violations");
}

// --- 5. sharp-constant bound, Monte Carlo --------------------------------

void criterion_thm31_mc() {
  unsigned w = workers();
  QuadrupleConfig lin;
  lin.eta = EtaSpec::linear(1.0);
  lin.A = IncreasingProcess{1.0, {}};
  lin.H = 1.0;
  lin.kappa = 0.5;
  lin.n_per_unit = 256;
  lin.T = 1.0;
  McReport r1 =
      verify_concave_bound(lin, 0.5, HCase::PredictableH, Variant::Sup, 100000, 501, w);

  QuadrupleConfig pow = lin;
  pow.eta = EtaSpec::power(1.0, 0.5);
  McReport r2 =
      verify_concave_bound(pow, 0.75, HCase::PredictableH, Variant::Sup, 100000, 502, w);
  McReport r3 =
      verify_concave_bound(pow, 0.75, HCase::PredictableH, Variant::NoSup, 100000, 503, w);

  bool ok = r1.verdict == Verdict::Pass && r2.verdict == Verdict::Pass &&
            r3.verdict == Verdict::Pass &&
            rel_err(r1.theoretical_bound.value(),
                    8.0 * std::exp(2.0) * (1.0 + grid_slack(256))) < 1e-12;
  report(5, "sharp-constant sup bounds hold in Monte Carlo", ok,
         "estimates " + std::to_string(r1.estimate) + ", " +
             std::to_string(r2.estimate) + ", " + std::to_string(r3.estimate) +
             " vs bounds " + std::to_string(r1.theoretical_bound.value()) + ", " +
             std::to_string(r2.theoretical_bound.value()) + ", " +
             std::to_string(r3.theoretical_bound.value()));
}

// --- 6. random-integrator moment bound -----------------------------------

void criterion_cor36_mc() {
  QuadrupleConfig cfg;
  cfg.eta = EtaSpec::linear(1.0);
  cfg.A = IncreasingProcess{1.0, {}};
  cfg.theta.atoms = {{0.5, 0.5}, {2.0, 0.5}};
  cfg.H = 1.0;
  cfg.kappa = 0.5;
  cfg.n_per_unit = 256;
  cfg.T = 1.0;
  McReport r = verify_random_A(cfg, 0.5, 1.0, HCase::PredictableH, Variant::Sup,
                               100000, 601, workers());
  bool ok = r.verdict == Verdict::Pass &&
            rel_err(r.theoretical_bound.value(), 2.0 / std::sqrt(8.0)) < 1e-12;
  report(6, "weighted moment bound under random integrator", ok,
         "mean " + std::to_string(r.estimate) + " <= " +
             std::to_string(r.theoretical_bound.value()));
}

// --- 7. expectation and p-norm bounds on G(X) ----------------------------

void criterion_thm38_mc() {
  QuadrupleConfig cfg;
  cfg.eta = EtaSpec::linear(1.0);
  cfg.A = IncreasingProcess{1.0, {}};
  cfg.H = 1.0;
  cfg.kappa = 0.5;
  cfg.floor = 1.0;
  cfg.n_per_unit = 256;
  cfg.T = 1.0;
  auto reports = verify_thm38(cfg, 0.5, 100000, 701, workers());
  bool ok = reports.size() == 2 && reports[0].verdict == Verdict::Pass &&
            reports[1].verdict == Verdict::Pass &&
            rel_err(reports[0].theoretical_bound.value(),
                    1.0 + grid_slack(256)) < 1e-12 &&
            rel_err(reports[1].theoretical_bound.value(),
                    8.0 * (1.0 + grid_slack(256))) < 1e-12;
  report(7, "expectation and p-norm bounds on the transformed path", ok,
         "estimates " + std::to_string(reports[0].estimate) + ", " +
             std::to_string(reports[1].estimate));
}

// --- 8. zero data and vanishing data -------------------------------------

void criterion_vanishing_data() {
  QuadrupleConfig cfg;
  cfg.eta = EtaSpec::linear(1.0);
  cfg.A = IncreasingProcess{1.0, {}};
  cfg.H = 0.0;
  cfg.kappa = 0.5;
  cfg.n_per_unit = 256;
  cfg.T = 1.0;
  bool zero_ok = true;
  for (std::size_t i = 0; i < 100; ++i) {
    QuadrupleSample s = simulate_quadruple(cfg, RngStream(801, i));
    if (s.sup_X != 0.0 || s.X_T != 0.0) zero_ok = false;
  }

  const std::size_t trials = 10000;
  std::vector<double> ladder{1.0, 0.1, 0.01};
  std::vector<double> probs =
      exceedance_ladder(cfg, ladder, 0.01, trials, 802, workers());
  double se = std::sqrt(0.25 / static_cast<double>(trials));
  bool monotone = probs[0] + 2.0 * se >= probs[1] && probs[1] + 2.0 * se >= probs[2];
  report(8, "zero data stays zero; exceedance shrinks with the data", zero_ok && monotone,
         "P[sup > 0.01] = " + std::to_string(probs[0]) + ", " +
             std::to_string(probs[1]) + ", " + std::to_string(probs[2]));
}

// --- 9. sharpness counterexample -----------------------------------------

void criterion_counterexample() {
  CounterexampleValues v1 = counterexample_ratio(0.5, 1.0, 2.0);
  CounterexampleValues v2 = counterexample_ratio(0.5, 100.0, 1.0);
  bool closed = rel_err(v1.ratio_p_pow_p, 1.13869) < 2e-4 &&
                rel_err(v2.lower_bound_at_Tn, 5.1472) < 1e-4;
  McReport mc = counterexample_mc(0.5, 1.0, 2.0, 1000000, 901, workers());
  bool mc_ok = std::abs(mc.estimate - v1.ratio_p_pow_p) <=
               4.0 * std::max(mc.std_error, 1e-12);
  double prev = 0.0;
  bool increasing = true;
  for (double g : {1.0, 10.0, 100.0}) {
    double lb = counterexample_ratio(0.5, g, 1.0).lower_bound_at_Tn;
    if (!(lb > prev)) increasing = false;
    prev = lb;
  }
  report(9, "sharpness counterexample matches closed form and diverges",
         closed && mc_ok && increasing,
         "ratio " + std::to_string(mc.estimate) + " vs " +
             std::to_string(v1.ratio_p_pow_p) + ", lower bounds increasing to " +
             std::to_string(prev));
}

// --- 10. Euler scheme diagnostics ----------------------------------------

void criterion_euler() {
  unsigned w = workers();
  // geometric Brownian motion first-moment oracle
  LevyConfig bm;
  bm.drift_b = {0.0};
  bm.sigma = {1.0};
  SdeModel gbm;
  gbm.dim_d = 1;
  gbm.dim_m = 1;
  gbm.init_z = [](double) { return std::vector<double>{1.0}; };
  gbm.f = [](double, const FrozenPathView& v) {
    return std::vector<double>{0.05 * v.left_limit_scalar()};
  };
  gbm.h = [](double, const FrozenPathView& v) {
    return std::vector<double>{0.2 * v.left_limit_scalar()};
  };
  const std::size_t trials = 100000;
  std::vector<double> xT(trials);
  parallel_trials(trials, w, [&](std::size_t i) {
    DriverIncrements inc = generate(bm, 256, 1.0, RngStream(1001, i));
    EulerRun run = euler_simulate(gbm, bm, inc);
    xT[i] = run.path.at(run.path.num_nodes() - 1)[0];
  });
  double n = static_cast<double>(trials);
  double mean = 0.0;
  for (double v : xT) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : xT) var += (v - mean) * (v - mean);
  double se = std::sqrt(var / n / n);
  bool gbm_ok = std::abs(mean - std::exp(0.05)) < 4.0 * se;

  // compensated-jump martingale mean
  LevyConfig jumps = LevyConfig::standard_compensated_poisson(1.0);
  SdeModel mart;
  mart.dim_d = 1;
  mart.dim_m = 1;
  mart.init_z = [](double) { return std::vector<double>{1.0}; };
  mart.g = [](double, const FrozenPathView&, std::span<const double> xi) {
    return std::vector<double>{xi[0]};
  };
  const std::size_t jtrials = 20000;
  std::vector<double> jT(jtrials);
  parallel_trials(jtrials, w, [&](std::size_t i) {
    DriverIncrements inc = generate(jumps, 64, 1.0, RngStream(1002, i));
    EulerRun run = euler_simulate(mart, jumps, inc);
    jT[i] = run.path.at(run.path.num_nodes() - 1)[0];
  });
  double jmean = 0.0;
  for (double v : jT) jmean += v;
  jmean /= static_cast<double>(jtrials);
  double jvar = 0.0;
  for (double v : jT) jvar += (v - jmean) * (v - jmean);
  double jse = std::sqrt(jvar / jtrials / jtrials);
  bool mart_ok = std::abs(jmean - 1.0) < 4.0 * jse;

  // refinement consistency on the delayed example model
  std::vector<std::size_t> meshes{16, 64, 256};
  auto rows = cauchy_experiment(example43_model(1.0), example43_noise(), meshes,
                                0.1, 1.0, 2000, 1003, w);
  bool cauchy_ok = rows.size() == 2 &&
                   rows[1].empirical_P_exceed <= rows[0].empirical_P_exceed;

  report(10, "Euler diagnostics: moment, martingale, refinement", gbm_ok && mart_ok && cauchy_ok,
         "E[X_T] " + std::to_string(mean) + " (target " +
             std::to_string(std::exp(0.05)) + "), jump mean " + std::to_string(jmean) +
             ", exceedance " + std::to_string(rows[0].empirical_P_exceed) + " -> " +
             std::to_string(rows[1].empirical_P_exceed));
}

// --- 11. determinism ------------------------------------------------------

void criterion_determinism() {
  QuadrupleConfig cfg;
  cfg.eta = EtaSpec::linear(1.0);
  cfg.A = IncreasingProcess{1.0, {}};
  cfg.H = 1.0;
  cfg.kappa = 0.5;
  cfg.n_per_unit = 64;
  cfg.T = 1.0;
  McReport a = verify_concave_bound(cfg, 0.5, HCase::PredictableH, Variant::Sup, 2048, 1101, 1);
  McReport b = verify_concave_bound(cfg, 0.5, HCase::PredictableH, Variant::Sup, 2048, 1101, 8);
  bool verify_ok = a.estimate == b.estimate && a.std_error == b.std_error;

  LevyConfig bm;
  bm.drift_b = {0.0};
  bm.sigma = {1.0};
  SdeModel m;
  m.dim_d = 1;
  m.dim_m = 1;
  m.init_z = [](double) { return std::vector<double>{1.0}; };
  m.h = [](double, const FrozenPathView& v) {
    return std::vector<double>{0.3 * v.left_limit_scalar()};
  };
  DriverIncrements i1 = generate(bm, 128, 1.0, RngStream(1102, 7));
  DriverIncrements i2 = generate(bm, 128, 1.0, RngStream(1102, 7));
  bool sim_ok = euler_simulate(m, bm, i1).path.values ==
                euler_simulate(m, bm, i2).path.values;
  report(11, "seeded runs are byte-identical across worker counts",
         verify_ok && sim_ok, verify_ok && sim_ok ? "identical" : "mismatch");
}

}  // namespace

int main() {
  auto start = std::chrono::steady_clock::now();
  criterion_transform();
  criterion_identity();
  criterion_gronwall();
  criterion_dominance();
  criterion_thm31_mc();
  criterion_cor36_mc();
  criterion_thm38_mc();
  criterion_vanishing_data();
  criterion_counterexample();
  criterion_euler();
  criterion_determinism();
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  std::printf("acceptance: %d of 11 failed (%.1f s)\n", g_failures,
              static_cast<double>(elapsed) / 1000.0);
  return g_failures;
}
