#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bihari/ext_real.hpp"
#include "bihari/nonlinearity.hpp"

namespace bihari {

namespace detail {

template <typename F>
double simpson(F&& f, double a, double m, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(F&& f, double a, double b, double fa, double fm, double fb,
                            double whole, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, lm, m, fa, flm, fm);
  double right = simpson(f, m, rm, b, fm, frm, fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

/// Adaptive Simpson on [a,b] with a roughly relative tolerance.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = simpson(f, a, m, b, fa, fm, fb);
  double eps = rel_tol * std::max(1e-300, std::abs(whole));
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, 48);
}

}  // namespace detail

/// Numerical realization of G(x) = int_c^x du/eta(u), its inverse and the
/// G~_p relations. G(anchor) = 0; G is strictly increasing where finite.
/// The knot cache at geometric spacing keeps repeated evaluations cheap.
class GTransform {
 public:
  explicit GTransform(EtaSpec eta, double anchor_c = 1.0, double quad_rel_tol = 1e-10,
                      double inv_abs_tol = 1e-12)
      : eta_(std::move(eta)),
        anchor_(anchor_c),
        quad_rel_tol_(quad_rel_tol),
        inv_abs_tol_(inv_abs_tol) {
    if (!(anchor_c > 0.0)) throw std::invalid_argument("GTransform: anchor must be positive");
    build_cache();
  }

  const EtaSpec& eta() const { return eta_; }
  double anchor() const { return anchor_; }

  /// sup of range(G); +inf iff the integral of 1/eta diverges at infinity.
  ExtReal cached_sup() const { return sup_; }

  /// G(0), NEG_INF under the Osgood condition.
  ExtReal value_at_zero() const { return g_zero_; }

  /// G(x) for x >= 0.
  ExtReal G(double x) const {
    if (x < 0.0) throw std::domain_error("G: negative argument");
    if (x == anchor_) return 0.0;
    if (eta_.osgood_at_zero && x < 1e-300) return ExtReal::neg_inf();
    if (x == 0.0) return g_zero_;
    return ExtReal(eval_from_cache(x));
  }

  /// Monotone inverse with the paper's conventions: NEG_INF maps to 0,
  /// arguments at or beyond sup(range(G)) map to POS_INF.
  ExtReal G_inverse(ExtReal y) const {
    if (y.is_pos_inf()) return ExtReal::pos_inf();
    if (y.is_neg_inf()) return 0.0;
    if (sup_.is_finite() && y.value() >= sup_.value()) return ExtReal::pos_inf();
    if (g_zero_.is_finite() && y.value() <= g_zero_.value()) return 0.0;
    return ExtReal(invert(y.value()));
  }

  /// G~_p(x) = (1-p) G(x^{1/p}), x > 0.
  ExtReal tilde_G_p(double p, double x) const {
    check_p(p);
    if (!(x > 0.0)) throw std::domain_error("tilde_G_p: x must be positive");
    return (1.0 - p) * G(std::pow(x, 1.0 / p));
  }

  /// G~_p^{-1}(y) = (G^{-1}(y/(1-p)))^p, sentinels propagated.
  ExtReal tilde_G_p_inverse(double p, ExtReal y) const {
    check_p(p);
    ExtReal inner = G_inverse(y.is_finite() ? ExtReal(y.value() / (1.0 - p)) : y);
    if (!inner.is_finite()) return inner;
    return ExtReal(std::pow(inner.value(), p));
  }

 private:
  static void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must be in (0,1)");
  }

  double inv_eta(double u) const { return 1.0 / eval_eta(eta_, u); }

  double quad(double a, double b) const {
    auto f = [this](double u) { return inv_eta(u); };
    return detail::adaptive_simpson(f, a, b, quad_rel_tol_);
  }

  void build_cache() {
    // geometric knots anchor * 2^k, k in [kmin, kmax]
    knots_.clear();
    gvals_.clear();
    const int kmin = -60, kmax = 60;
    knots_.reserve(kmax - kmin + 1);
    for (int k = kmin; k <= kmax; ++k) knots_.push_back(std::ldexp(anchor_, k));
    gvals_.resize(knots_.size());
    std::size_t ia = static_cast<std::size_t>(-kmin);
    gvals_[ia] = 0.0;
    for (std::size_t i = ia; i + 1 < knots_.size(); ++i)
      gvals_[i + 1] = gvals_[i] + quad(knots_[i], knots_[i + 1]);
    for (std::size_t i = ia; i-- > 0;)
      gvals_[i] = gvals_[i + 1] - quad(knots_[i], knots_[i + 1]);

    // G(0): NEG_INF under Osgood, otherwise the finite improper integral,
    // continued geometrically below the lowest knot until convergence
    if (eta_.osgood_at_zero) {
      g_zero_ = ExtReal::neg_inf();
    } else {
      double acc = gvals_.front();
      double hi = knots_.front();
      for (int it = 0; it < 4000 && hi > 1e-300; ++it) {
        double lo = 0.5 * hi;
        double piece = quad(lo, hi);
        acc -= piece;
        hi = lo;
        if (piece < 1e-14 * std::max(1.0, std::abs(acc))) break;
      }
      g_zero_ = ExtReal(acc);
    }

    // sup of range(G): analytic divergence per the declared flag, otherwise
    // estimated by continuing the geometric integration to ~1e12 * top knot
    if (eta_.diverges_at_infinity) {
      sup_ = ExtReal::pos_inf();
    } else {
      double acc = gvals_.back();
      double lo = knots_.back();
      for (int it = 0; it < 200; ++it) {
        double hi = 2.0 * lo;
        double piece = quad(lo, hi);
        acc += piece;
        lo = hi;
        if (piece < 1e-14 * std::max(1.0, std::abs(acc)) || lo > 1e12 * knots_.back()) break;
      }
      sup_ = ExtReal(acc);
    }
  }

  double eval_from_cache(double x) const {
    if (x <= knots_.front()) return gvals_.front() - quad(x, knots_.front());
    if (x >= knots_.back()) return gvals_.back() + quad(knots_.back(), x);
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return gvals_[i] + quad(knots_[i], x);
  }

  double invert(double y) const {
    // bracket via the knot cache (gvals_ strictly increasing)
    double lo, hi;
    if (y <= gvals_.front()) {
      hi = knots_.front();
      lo = hi;
      double glo = gvals_.front();
      while (glo > y && lo > 1e-300) {
        hi = lo;
        lo *= 0.5;
        glo -= quad(lo, hi);
      }
      hi = 2.0 * lo;
    } else if (y >= gvals_.back()) {
      lo = knots_.back();
      double ghi = gvals_.back();
      hi = lo;
      while (ghi < y && hi < 1e290) {
        lo = hi;
        hi *= 2.0;
        ghi += quad(lo, hi);
      }
    } else {
      auto it = std::upper_bound(gvals_.begin(), gvals_.end(), y);
      std::size_t i = static_cast<std::size_t>(it - gvals_.begin());
      lo = knots_[i - 1];
      hi = knots_[i];
    }

    // safeguarded Newton (G' = 1/eta), bisection fallback
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      double gx = eval_from_cache(x);
      if (gx > y)
        hi = x;
      else
        lo = x;
      double step = (y - gx) * eval_eta(eta_, x);
      double xn = x + step;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      double tol = inv_abs_tol_ * std::max(std::abs(x), 1e-300);
      if (std::abs(xn - x) <= tol && std::abs(hi - lo) <= 4.0 * std::max(tol, 1e-300)) {
        x = xn;
        break;
      }
      x = xn;
    }
    return x;
  }

  EtaSpec eta_;
  double anchor_;
  double quad_rel_tol_;
  double inv_abs_tol_;
  std::vector<double> knots_;
  std::vector<double> gvals_;
  ExtReal g_zero_;
  ExtReal sup_;
};

}  // namespace bihari
