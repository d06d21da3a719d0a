#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bihari/ext_real.hpp"
#include "bihari/gtransform.hpp"

namespace bihari {

/// The sharp constants beta = (1-p)^{-1}, alpha1 = (1-p)^{-1/p}, alpha2 = 1/p.
struct PExponents {
  double p;
  double beta;
  double alpha1;
  double alpha2;
};

inline PExponents constants(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("constants: p must be in (0,1)");
  return PExponents{p, 1.0 / (1.0 - p), std::pow(1.0 - p, -1.0 / p), 1.0 / p};
}

/// Which integrability case of the stochastic bound applies: H predictable
/// with E[H^p] < infinity, martingale jumps non-negative, or E[H] < infinity.
enum class HCase { PredictableH, NonnegJumps, L1H };

/// Whether the drift integrand reads the running supremum (SUP) or the left
/// limit (NOSUP) of the dominated process.
enum class Variant { Sup, NoSup };

struct BoundResult {
  ExtReal value;
  std::string theorem_tag;
  double c_inside_G = 1.0;   // constant multiplying the H-norm inside G
  double c_mult_A = 1.0;     // constant multiplying A_T
  double c_outer = 1.0;      // outer multiplier of G^{-1}
};

/// Deterministic non-decreasing cadlag integrator: a linear density plus jumps.
struct IncreasingProcess {
  double rate = 0.0;                                // density of the ac part
  std::vector<std::pair<double, double>> jumps;     // (time, size), size >= 0

  double operator()(double t) const {
    double v = rate * t;
    for (const auto& [tj, sz] : jumps)
      if (tj <= t) v += sz;
    return v;
  }
};

/// x(t) <= G^{-1}(G(H) + A(t)); POS_INF when the argument exits range(G).
inline BoundResult deterministic_bihari(const GTransform& t, double H,
                                        const IncreasingProcess& A, double time) {
  if (!(H > 0.0)) throw std::invalid_argument("deterministic_bihari: H must be positive");
  ExtReal arg = t.G(H) + ExtReal(A(time));
  return BoundResult{t.G_inverse(arg), "deterministic_bihari", 1.0, 1.0, 1.0};
}

struct HypothesisCheck {
  bool holds = true;
  double max_violation = 0.0;
};

/// Left Riemann-Stieltjes check of the pathwise drift inequality with M == 0:
/// x(t_k) <= sum_{j<=k} eta(x(t_{j-1})) (A(t_j)-A(t_{j-1})) + H, with the
/// running supremum replacing the left limit in SUP mode.
inline HypothesisCheck check_hypothesis_path(std::span<const double> times,
                                             std::span<const double> x,
                                             std::span<const double> A, double H,
                                             const EtaSpec& eta, Variant mode,
                                             double rel_tol = 1e-9) {
  if (times.size() != x.size() || times.size() != A.size() || times.empty())
    throw std::invalid_argument("check_hypothesis_path: mismatched grids");
  HypothesisCheck out;
  double stieltjes = 0.0;
  double run_sup = x[0];
  for (std::size_t k = 1; k < times.size(); ++k) {
    double integrand = (mode == Variant::Sup) ? run_sup : x[k - 1];
    stieltjes += eval_eta(eta, std::max(0.0, integrand)) * (A[k] - A[k - 1]);
    run_sup = std::max(run_sup, x[k]);
    double excess = x[k] - (stieltjes + H);
    out.max_violation = std::max(out.max_violation, excess);
  }
  double scale = std::max(1.0, std::abs(run_sup));
  out.holds = out.max_violation <= rel_tol * scale;
  return out;
}

/// The four concave-eta bound shapes for ||X*_T||_p with deterministic A.
inline BoundResult concave_bound(const GTransform& t, double p, HCase hcase,
                                 Variant variant, double H_norm, double A_T) {
  if (H_norm < 0.0 || A_T < 0.0)
    throw std::invalid_argument("concave_bound: negative input");
  PExponents k = constants(p);
  bool l1 = (hcase == HCase::L1H);

  BoundResult r;
  if (variant == Variant::Sup) {
    r.c_inside_G = l1 ? k.alpha1 : k.alpha1 * k.alpha2;
    r.c_mult_A = k.beta;
    r.c_outer = 1.0;
    r.theorem_tag = l1 ? "thm31a_l1" : "thm31a_p";
  } else {
    r.c_inside_G = l1 ? 1.0 : k.alpha2;
    r.c_mult_A = 1.0;
    r.c_outer = k.alpha1;
    r.theorem_tag = l1 ? "thm31b_l1" : "thm31b_p";
  }

  ExtReal gh = (H_norm == 0.0) ? t.G(0.0) : t.G(r.c_inside_G * H_norm);
  r.value = r.c_outer * t.G_inverse(gh + ExtReal(r.c_mult_A * A_T));
  return r;
}

/// Both sides of the SUP-vs-NOSUP dominance inequality
/// alpha1 G^{-1}(G(h)+x) <= G^{-1}(G(alpha1 h) + beta x).
inline std::pair<ExtReal, ExtReal> remark34_pair(const GTransform& t, double p,
                                                 double h, double x) {
  if (!(h > 0.0) || x < 0.0) throw std::invalid_argument("remark34_pair: bad input");
  PExponents k = constants(p);
  ExtReal lhs = k.alpha1 * t.G_inverse(t.G(h) + ExtReal(x));
  ExtReal rhs = t.G_inverse(t.G(k.alpha1 * h) + ExtReal(k.beta * x));
  return {lhs, rhs};
}

/// Per-sample weighted statistic and the constant right side of the
/// random-integrator moment inequality. The Monte Carlo layer averages
/// `weighted` over trials and asserts mean <= rhs.
inline std::pair<double, double> random_A_check_values(const GTransform& t, double p,
                                                       double q, HCase hcase,
                                                       Variant variant, double H_norm,
                                                       double A_T_sample,
                                                       double Xstar_sample) {
  if (!(q > p)) throw std::invalid_argument("random_A_check_values: need q > p");
  if (!(H_norm > 0.0)) throw std::invalid_argument("random_A_check_values: H_norm must be positive");
  PExponents k = constants(p);
  double kappa = (hcase == HCase::L1H) ? k.alpha1 : k.alpha1 * k.alpha2;
  double beta_eff = (variant == Variant::NoSup) ? 1.0 : k.beta;
  ExtReal denom = t.G_inverse(t.G(kappa * H_norm) + ExtReal(beta_eff * A_T_sample));
  double weighted = 0.0;
  if (Xstar_sample > 0.0 && denom.is_finite())
    weighted = std::pow(denom.value(), -q) * std::pow(Xstar_sample, p);
  double rhs = q / (q - p) * std::pow(kappa * H_norm, p - q);
  return {weighted, rhs};
}

/// Right side of E[G(X_{tau ^ T})] <= E[A] + G(E[H]), with NEG_INF
/// propagation when E[H] = 0 under the Osgood condition.
inline ExtReal thm38_expected_G_rhs(const GTransform& t, double E_A, double E_H) {
  if (E_A < 0.0 || E_H < 0.0) throw std::invalid_argument("thm38_expected_G_rhs: negative input");
  return ExtReal(E_A) + t.G(E_H);
}

/// alpha1 alpha2 ||A_T + G(E[H_T])||_p over the given samples.
inline double thm38iv_rhs(double p, std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("thm38iv_rhs: empty samples");
  PExponents k = constants(p);
  double acc = 0.0;
  for (double s : samples) acc += std::pow(std::abs(s), p);
  acc /= static_cast<double>(samples.size());
  return k.alpha1 * k.alpha2 * std::pow(acc, 1.0 / p);
}

}  // namespace bihari
