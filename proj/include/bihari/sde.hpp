#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bihari/levy.hpp"
#include "bihari/nonlinearity.hpp"

namespace bihari {

/// Grid-sampled right-continuous path on [-r, T], uniform step 1/n.
/// Node i holds the value at time (i - init_offset)/n; the value at a node's
/// left limit is by convention the value at the previous node.
struct CadlagPath {
  double delay_r = 0.0;
  std::size_t n_per_unit = 1;
  std::size_t dim_d = 1;
  std::size_t init_offset = 0;  // number of nodes strictly before time 0
  std::vector<double> values;   // row-major num_nodes x d

  double dt() const { return 1.0 / static_cast<double>(n_per_unit); }
  std::size_t num_nodes() const { return values.size() / dim_d; }
  double time_of(std::size_t node) const {
    return (static_cast<double>(node) - static_cast<double>(init_offset)) * dt();
  }
  std::span<const double> at(std::size_t node) const {
    return {values.data() + node * dim_d, dim_d};
  }
  std::span<double> at(std::size_t node) {
    return {values.data() + node * dim_d, dim_d};
  }
  double norm_at(std::size_t node) const {
    double s = 0.0;
    for (double v : at(node)) s += v * v;
    return std::sqrt(s);
  }
};

/// sup of |x| (Euclidean norm) over grid nodes in [0, t], or [-r, t] when
/// from_minus_r is set.
inline double running_sup(const CadlagPath& path, double t, bool from_minus_r) {
  double eps = 0.5 * path.dt();
  if (t > path.time_of(path.num_nodes() - 1) + eps)
    throw std::invalid_argument("running_sup: t beyond path horizon");
  std::size_t first = from_minus_r ? 0 : path.init_offset;
  double best = 0.0;
  for (std::size_t i = first; i < path.num_nodes() && path.time_of(i) <= t + eps; ++i)
    best = std::max(best, path.norm_at(i));
  return best;
}

/// Read-only view of a path frozen at a cell start: accessors clamp every
/// query to nodes at or before the frozen node, realizing X_{. ^ k(n,s)}.
class FrozenPathView {
 public:
  FrozenPathView(const CadlagPath& path, std::size_t frozen_node)
      : path_(path), frozen_(frozen_node) {}

  /// x(t^-) inside the current cell: the value at the cell start.
  std::span<const double> left_limit() const { return path_.at(frozen_); }

  double left_limit_scalar() const { return path_.at(frozen_)[0]; }

  double frozen_time() const { return path_.time_of(frozen_); }

  /// sup |x(s)| over nodes with time in [t_lo, t_hi], clamped to the frozen
  /// prefix (init segment included).
  double sup_norm_over(double t_lo, double t_hi) const {
    double eps = 0.5 * path_.dt();
    double best = 0.0;
    for (std::size_t i = 0; i <= frozen_; ++i) {
      double ti = path_.time_of(i);
      if (ti >= t_lo - eps && ti <= t_hi + eps) best = std::max(best, path_.norm_at(i));
    }
    return best;
  }

  std::size_t frozen_node() const { return frozen_; }
  const CadlagPath& path() const { return path_; }

 private:
  const CadlagPath& path_;
  std::size_t frozen_;
};

/// Path-dependent coefficients: f drift (d), g jump (d), h diffusion (d x m,
/// row-major). Evaluators read only the frozen prefix through the view.
struct SdeModel {
  std::size_t dim_d = 1;
  std::size_t dim_m = 1;
  double delay_r = 0.0;
  std::function<std::vector<double>(double)> init_z;  // z(t), t in [-r, 0]
  std::function<std::vector<double>(double, const FrozenPathView&)> f;
  std::function<std::vector<double>(double, const FrozenPathView&, std::span<const double>)> g;
  std::function<std::vector<double>(double, const FrozenPathView&)> h;
};

enum class ExitFlag { Completed, Capped };

struct EulerRun {
  CadlagPath path;
  std::size_t n_per_unit = 1;
  ExitFlag exit_flag = ExitFlag::Completed;
  double cap_R = 0.0;  // meaningful when Capped
};

/// Euler scheme with coefficient freezing at cell starts: within each cell
/// (k/n, (k+1)/n] all coefficients are evaluated once at the path stopped at
/// k/n. The compensated jump term realizes through the driver's atom laws.
inline EulerRun euler_simulate(const SdeModel& model, const LevyConfig& config,
                               const DriverIncrements& driver,
                               std::optional<double> cap_R = std::nullopt) {
  if (driver.dim_m != model.dim_m)
    throw std::invalid_argument("euler_simulate: dimension mismatch");
  const std::size_t d = model.dim_d, m = model.dim_m;
  double dt = driver.dt();

  EulerRun run;
  run.n_per_unit = driver.n_per_unit;
  CadlagPath& path = run.path;
  path.delay_r = model.delay_r;
  path.n_per_unit = driver.n_per_unit;
  path.dim_d = d;
  path.init_offset = static_cast<std::size_t>(
      std::llround(model.delay_r * static_cast<double>(driver.n_per_unit)));
  std::size_t num_nodes = path.init_offset + driver.steps + 1;
  path.values.resize(num_nodes * d);
  for (std::size_t i = 0; i <= path.init_offset; ++i) {
    auto z = model.init_z ? model.init_z(path.time_of(i)) : std::vector<double>(d, 0.0);
    if (z.size() != d) throw std::invalid_argument("euler_simulate: init segment dimension");
    std::copy(z.begin(), z.end(), path.at(i).begin());
  }

  for (std::size_t k = 0; k < driver.steps; ++k) {
    std::size_t node = path.init_offset + k;
    FrozenPathView view(path, node);
    double t = path.time_of(node);

    std::vector<double> next(path.at(node).begin(), path.at(node).end());

    if (model.f) {
      auto fv = model.f(t, view);
      for (std::size_t i = 0; i < d; ++i) next[i] += fv[i] * dt;
    }
    if (model.h) {
      auto hv = model.h(t, view);  // d x m row-major
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t c = 0; c < m; ++c)
          next[i] += hv[i * m + c] * driver.dB[k * m + c];
    }
    if (model.g && !config.jumps.empty()) {
      for (const auto& ev : driver.jump_events[k]) {
        auto gv = model.g(t, view, ev.xi);
        for (std::size_t i = 0; i < d; ++i) next[i] += gv[i];
      }
      // compensator: dt * sum_laws rate * E_atoms[g(., ., xi)]
      for (const auto& law : config.jumps) {
        for (const auto& [xi, prob] : law.atoms) {
          auto gv = model.g(t, view, xi);
          for (std::size_t i = 0; i < d; ++i) next[i] -= law.rate * prob * gv[i] * dt;
        }
      }
    }

    for (double v : next)
      if (!std::isfinite(v))
        throw std::runtime_error("euler_simulate: non-finite state at t=" + std::to_string(t + dt));

    std::copy(next.begin(), next.end(), path.at(node + 1).begin());

    if (cap_R) {
      double norm = path.norm_at(node + 1);
      if (norm > *cap_R / 3.0) {
        run.exit_flag = ExitFlag::Capped;
        run.cap_R = *cap_R;
        for (std::size_t j = node + 2; j < num_nodes; ++j)
          std::copy(next.begin(), next.end(), path.at(j).begin());
        break;
      }
    }
  }
  return run;
}

struct CoupledResult {
  EulerRun fine;
  EulerRun coarse;
  double sup_distance = 0.0;  // over nodes common to both grids
};

/// Run the scheme at mesh n*factor and at mesh n on the same noise path
/// (coarse increments are block sums of the fine ones).
inline CoupledResult coupled_pair(const SdeModel& model, const LevyConfig& config,
                                  std::size_t n, std::size_t factor, double T,
                                  RngStream stream,
                                  std::optional<double> cap_R = std::nullopt) {
  DriverIncrements fine = generate(config, n * factor, T, stream);
  DriverIncrements coarse = refine_aggregate(fine, factor);
  CoupledResult out;
  out.fine = euler_simulate(model, config, fine, cap_R);
  out.coarse = euler_simulate(model, config, coarse, cap_R);
  const CadlagPath& pf = out.fine.path;
  const CadlagPath& pc = out.coarse.path;
  for (std::size_t k = 0; k < coarse.steps + 1; ++k) {
    std::size_t cf = pf.init_offset + k * factor;
    std::size_t cc = pc.init_offset + k;
    double dist2 = 0.0;
    for (std::size_t i = 0; i < model.dim_d; ++i) {
      double diff = pf.at(cf)[i] - pc.at(cc)[i];
      dist2 += diff * diff;
    }
    out.sup_distance = std::max(out.sup_distance, std::sqrt(dist2));
  }
  return out;
}

inline double sign(double x) { return (x > 0.0) - (x < 0.0); }

/// x * log(1/x) capped at e^-1, continuously extended by 0 at x = 0.
inline double xlog_cap(double x) {
  double cap = std::min(std::abs(x), std::exp(-1.0));
  return (cap > 0.0) ? cap * std::log(1.0 / cap) : 0.0;
}

/// The 1-d path-dependent preset with square-root drift, non-Lipschitz
/// diffusion and a compensated standard Poisson jump term.
inline SdeModel example43_model(double z0 = 1.0) {
  SdeModel model;
  model.dim_d = 1;
  model.dim_m = 1;
  model.delay_r = 1.0;
  model.init_z = [z0](double) { return std::vector<double>{z0}; };
  model.f = [](double t, const FrozenPathView& v) {
    double x = v.left_limit_scalar();
    double sup = v.sup_norm_over(t - 1.0, t - v.path().dt());
    return std::vector<double>{-2.0 * sign(x) * std::sqrt(std::abs(x)) + sup};
  };
  model.h = [](double t, const FrozenPathView& v) {
    double x = v.left_limit_scalar();
    double sup = v.sup_norm_over(t - 1.0, t - v.path().dt());
    return std::vector<double>{std::pow(std::abs(x), 0.75) + sup + xlog_cap(x)};
  };
  model.g = [](double, const FrozenPathView&, std::span<const double> xi) {
    return std::vector<double>{xi[0]};
  };
  return model;
}

inline LevyConfig example43_noise() { return LevyConfig::standard_compensated_poisson(1.0); }

struct ResidualReport {
  double c1_max_residual = 0.0;
  double c2_max_residual = 0.0;
};

/// Numeric residuals of the monotonicity (C1) and coercivity (C2) conditions
/// over probe path pairs: positive residual means the envelope K_env * eta
/// fails to dominate at some probe.
inline ResidualReport hypothesis_residuals(const SdeModel& model, const LevyConfig& config,
                                           const EtaSpec& eta1, const EtaSpec& eta2,
                                           std::span<const std::pair<CadlagPath, CadlagPath>> probes,
                                           double K_env) {
  ResidualReport out;
  out.c1_max_residual = -std::numeric_limits<double>::infinity();
  out.c2_max_residual = -std::numeric_limits<double>::infinity();
  const std::size_t d = model.dim_d, m = model.dim_m;
  for (const auto& [px, py] : probes) {
    std::size_t node = px.num_nodes() - 1;
    FrozenPathView vx(px, node), vy(py, node);
    double t = px.time_of(node);

    auto fx = model.f(t, vx), fy = model.f(t, vy);
    auto hx = model.h(t, vx), hy = model.h(t, vy);

    double inner_diff = 0.0, frob_diff = 0.0, jump_diff = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      inner_diff += (vx.left_limit()[i] - vy.left_limit()[i]) * (fx[i] - fy[i]);
    for (std::size_t i = 0; i < d * m; ++i) {
      double dh = hx[i] - hy[i];
      frob_diff += dh * dh;
    }
    for (const auto& law : config.jumps)
      for (const auto& [xi, prob] : law.atoms) {
        auto gx = model.g(t, vx, xi), gy = model.g(t, vy, xi);
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += (gx[i] - gy[i]) * (gx[i] - gy[i]);
        jump_diff += law.rate * prob * s;
      }
    double sup_diff = 0.0;
    for (std::size_t i = 0; i <= node; ++i) {
      double s2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        double diff = px.at(i)[c] - py.at(i)[c];
        s2 += diff * diff;
      }
      sup_diff = std::max(sup_diff, s2);
    }
    double c1 = 2.0 * inner_diff + jump_diff + frob_diff - K_env * eval_eta(eta1, sup_diff);
    out.c1_max_residual = std::max(out.c1_max_residual, c1);

    double inner_x = 0.0, frob_x = 0.0, jump_x = 0.0;
    for (std::size_t i = 0; i < d; ++i) inner_x += vx.left_limit()[i] * fx[i];
    for (std::size_t i = 0; i < d * m; ++i) frob_x += hx[i] * hx[i];
    for (const auto& law : config.jumps)
      for (const auto& [xi, prob] : law.atoms) {
        auto gx = model.g(t, vx, xi);
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += gx[i] * gx[i];
        jump_x += law.rate * prob * s;
      }
    double sup_x = 0.0;
    for (std::size_t i = 0; i <= node; ++i) {
      double n2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) n2 += px.at(i)[c] * px.at(i)[c];
      sup_x = std::max(sup_x, n2);
    }
    double c2 = 2.0 * inner_x + jump_x + frob_x - K_env * eval_eta(eta2, 1.0 + sup_x);
    out.c2_max_residual = std::max(out.c2_max_residual, c2);
  }
  return out;
}

}  // namespace bihari
