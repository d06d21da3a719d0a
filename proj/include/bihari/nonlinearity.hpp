#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace bihari {

/// Catalog of non-decreasing nonlinearities eta with eta(x) > 0 for x > 0.
/// The flags declare the behavior of the improper integrals of 1/eta at 0
/// (Osgood condition) and at infinity; they are set per kind because numeric
/// detection of divergence is unreliable.
struct EtaSpec {
  enum class Kind { Linear, Power, XLog, Square, Tabulated };

  Kind kind = Kind::Linear;
  double K = 1.0;  // multiplicative constant for all closed-form kinds
  double a = 1.0;  // exponent, Power only, a in (0,1]
  std::vector<double> knots_x;  // Tabulated only, strictly increasing, > 0
  std::vector<double> knots_y;  // Tabulated only, non-decreasing, > 0
  bool osgood_at_zero = true;
  bool diverges_at_infinity = true;

  static EtaSpec linear(double K = 1.0) {
    EtaSpec s;
    s.kind = Kind::Linear;
    s.K = K;
    s.osgood_at_zero = true;
    s.diverges_at_infinity = true;
    return s;
  }

  static EtaSpec power(double K, double a) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("power: a must be in (0,1]");
    EtaSpec s;
    s.kind = Kind::Power;
    s.K = K;
    s.a = a;
    s.osgood_at_zero = (a >= 1.0);
    s.diverges_at_infinity = true;  // a <= 1
    return s;
  }

  static EtaSpec xlog(double K = 1.0) {
    EtaSpec s;
    s.kind = Kind::XLog;
    s.K = K;
    s.osgood_at_zero = true;       // 1/(u log(1/u)) has divergent integral at 0
    s.diverges_at_infinity = true;  // linear growth above 1/e
    return s;
  }

  static EtaSpec square(double K = 1.0) {
    EtaSpec s;
    s.kind = Kind::Square;
    s.K = K;
    s.osgood_at_zero = true;        // integral of 1/(K u^2) diverges at 0
    s.diverges_at_infinity = false;  // integral of 1/(K u^2) converges at infinity
    return s;
  }

  static EtaSpec tabulated(std::vector<double> xs, std::vector<double> ys,
                           bool osgood, bool diverges) {
    if (xs.size() != ys.size() || xs.size() < 2)
      throw std::invalid_argument("tabulated: need >= 2 matching knots");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] <= 0.0 || ys[i] <= 0.0)
        throw std::invalid_argument("tabulated: knots must be positive");
      if (i > 0 && (xs[i] <= xs[i - 1] || ys[i] < ys[i - 1]))
        throw std::invalid_argument("tabulated: knots must be increasing / non-decreasing");
    }
    EtaSpec s;
    s.kind = Kind::Tabulated;
    s.knots_x = std::move(xs);
    s.knots_y = std::move(ys);
    s.osgood_at_zero = osgood;
    s.diverges_at_infinity = diverges;
    return s;
  }
};

/// eta(x). eta(0) may be 0.
inline double eval_eta(const EtaSpec& spec, double x) {
  if (x < 0.0) throw std::domain_error("eval_eta: negative argument");
  switch (spec.kind) {
    case EtaSpec::Kind::Linear:
      return spec.K * x;
    case EtaSpec::Kind::Power:
      return spec.K * std::pow(x, spec.a);
    case EtaSpec::Kind::XLog: {
      // K*(x + (x ^ e^-1) * log(1/(x ^ e^-1))), continuous extension 0 at x=0
      double cap = std::min(x, std::exp(-1.0));
      double logterm = (cap > 0.0) ? cap * std::log(1.0 / cap) : 0.0;
      return spec.K * (x + logterm);
    }
    case EtaSpec::Kind::Square:
      return spec.K * x * x;
    case EtaSpec::Kind::Tabulated: {
      const auto& xs = spec.knots_x;
      const auto& ys = spec.knots_y;
      if (x <= xs.front()) return ys.front();  // constant below the first knot
      if (x >= xs.back()) {
        // linear extrapolation with the last segment's slope
        std::size_t n = xs.size();
        double slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        return ys.back() + slope * (x - xs.back());
      }
      auto it = std::upper_bound(xs.begin(), xs.end(), x);
      std::size_t i = static_cast<std::size_t>(it - xs.begin());
      double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
      return ys[i - 1] + w * (ys[i] - ys[i - 1]);
    }
  }
  throw std::logic_error("eval_eta: unknown kind");
}

/// eta_p(x) = (p/(1-p)) * eta(x^{1/p}) * x^{1-1/p}, for p in (0,1), x > 0.
inline double eval_eta_p(const EtaSpec& spec, double p, double x) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("eval_eta_p: p must be in (0,1)");
  if (!(x > 0.0)) throw std::domain_error("eval_eta_p: x must be positive");
  return p / (1.0 - p) * eval_eta(spec, std::pow(x, 1.0 / p)) * std::pow(x, 1.0 - 1.0 / p);
}

struct ShapeProbe {
  bool monotone = false;
  bool concave = false;
};

/// Numeric monotonicity/midpoint-concavity probe of eta or eta_p on a grid.
/// A probe, not a proof: tolerances are 1e-12 relative to the value scale.
template <typename F>
ShapeProbe probe_shape(F&& f, std::span<const double> grid) {
  if (grid.size() < 3) throw std::invalid_argument("probe: need >= 3 grid points");
  std::vector<double> vals(grid.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("probe: grid must be strictly increasing");
    vals[i] = f(grid[i]);
    scale = std::max(scale, std::abs(vals[i]));
  }
  double tol = 1e-12 * std::max(1.0, scale);
  ShapeProbe out;
  out.monotone = true;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] < vals[i - 1] - tol) out.monotone = false;
  out.concave = true;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    double mid = 0.5 * (grid[i - 1] + grid[i + 1]);
    if (f(mid) < 0.5 * (vals[i - 1] + vals[i + 1]) - tol) out.concave = false;
  }
  return out;
}

inline ShapeProbe probe_monotone_concave(const EtaSpec& spec, std::span<const double> grid) {
  return probe_shape([&](double x) { return eval_eta(spec, x); }, grid);
}

inline ShapeProbe probe_monotone_concave_p(const EtaSpec& spec, double p,
                                           std::span<const double> grid) {
  return probe_shape([&](double x) { return eval_eta_p(spec, p, x); }, grid);
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (n <= 1) return std::vector<double>(n, lo);
  std::vector<double> g(n);
  double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

inline std::string kind_name(EtaSpec::Kind k) {
  switch (k) {
    case EtaSpec::Kind::Linear: return "linear";
    case EtaSpec::Kind::Power: return "power";
    case EtaSpec::Kind::XLog: return "xlog";
    case EtaSpec::Kind::Square: return "square";
    case EtaSpec::Kind::Tabulated: return "tabulated";
  }
  return "?";
}

inline nlohmann::json to_json(const EtaSpec& s) {
  nlohmann::json params;
  if (s.kind == EtaSpec::Kind::Tabulated) {
    params["knots_x"] = s.knots_x;
    params["knots_y"] = s.knots_y;
  } else {
    params["K"] = s.K;
    if (s.kind == EtaSpec::Kind::Power) params["a"] = s.a;
  }
  return nlohmann::json{{"kind", kind_name(s.kind)},
                        {"params", params},
                        {"osgood_at_zero", s.osgood_at_zero},
                        {"diverges_at_infinity", s.diverges_at_infinity}};
}

inline EtaSpec eta_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  const auto params = j.value("params", nlohmann::json::object());
  double K = params.value("K", 1.0);
  EtaSpec s;
  if (kind == "linear") s = EtaSpec::linear(K);
  else if (kind == "power") s = EtaSpec::power(K, params.value("a", 0.5));
  else if (kind == "xlog") s = EtaSpec::xlog(K);
  else if (kind == "square") s = EtaSpec::square(K);
  else if (kind == "tabulated")
    s = EtaSpec::tabulated(params.at("knots_x").get<std::vector<double>>(),
                           params.at("knots_y").get<std::vector<double>>(),
                           j.value("osgood_at_zero", false),
                           j.value("diverges_at_infinity", true));
  else
    throw std::invalid_argument("unknown eta kind: " + kind);
  if (j.contains("osgood_at_zero")) s.osgood_at_zero = j["osgood_at_zero"].get<bool>();
  if (j.contains("diverges_at_infinity"))
    s.diverges_at_infinity = j["diverges_at_infinity"].get<bool>();
  return s;
}

}  // namespace bihari
