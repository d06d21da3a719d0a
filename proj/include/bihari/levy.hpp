#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "bihari/rng.hpp"

namespace bihari {

/// One discrete jump law: rate per unit time and atoms (xi, prob).
struct JumpLaw {
  double rate = 0.0;
  std::vector<std::pair<std::vector<double>, double>> atoms;  // (xi, prob)

  std::vector<double> mean_xi(std::size_t d) const {
    std::vector<double> m(d, 0.0);
    for (const auto& [xi, prob] : atoms)
      for (std::size_t i = 0; i < d; ++i) m[i] += prob * xi[i];
    return m;
  }
};

/// Finite-activity driving noise: drift b, diffusion sigma (d x m), and
/// discrete bounded-jump laws with their compensator.
struct LevyConfig {
  std::size_t dim_d = 1;
  std::size_t dim_m = 1;
  std::vector<double> drift_b;            // size d
  std::vector<double> sigma;              // row-major d x m
  std::vector<JumpLaw> jumps;
  double jump_cap = 1.0;

  void validate() const {
    if (drift_b.size() != dim_d) throw std::invalid_argument("LevyConfig: drift size");
    if (sigma.size() != dim_d * dim_m) throw std::invalid_argument("LevyConfig: sigma size");
    for (const auto& law : jumps) {
      if (!(law.rate > 0.0)) throw std::invalid_argument("LevyConfig: jump rate must be positive");
      double psum = 0.0;
      for (const auto& [xi, prob] : law.atoms) {
        if (xi.size() != dim_d) throw std::invalid_argument("LevyConfig: atom dimension");
        double norm2 = 0.0;
        for (double v : xi) norm2 += v * v;
        double norm = std::sqrt(norm2);
        if (!(norm > 0.0 && norm <= jump_cap + 1e-12))
          throw std::invalid_argument("LevyConfig: atom outside (0, cap]");
        psum += prob;
      }
      if (std::abs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("LevyConfig: atom probabilities must sum to 1");
    }
  }

  static LevyConfig standard_compensated_poisson(double rate = 1.0) {
    LevyConfig c;
    c.dim_d = 1;
    c.dim_m = 1;
    c.drift_b = {0.0};
    c.sigma = {0.0};
    JumpLaw law;
    law.rate = rate;
    law.atoms = {{{1.0}, 1.0}};
    c.jumps = {law};
    c.jump_cap = 1.0;
    return c;
  }
};

/// One realized jump: which law produced it and the drawn mark.
struct JumpEvent {
  std::size_t law_index;
  std::vector<double> xi;
};

/// Noise increments on the uniform grid 0 = t_0 < ... < t_K = T, step 1/n.
struct DriverIncrements {
  std::size_t n_per_unit = 1;
  double T = 1.0;
  std::size_t steps = 1;        // K = T * n
  std::size_t dim_d = 1;
  std::size_t dim_m = 1;
  std::vector<double> dB;                        // row-major steps x m, each N(0, dt)
  std::vector<std::vector<JumpEvent>> jump_events;  // per step
  std::vector<double> compensator_per_step;      // d-vector, sum_i rate_i E[xi_i] dt

  double dt() const { return 1.0 / static_cast<double>(n_per_unit); }
};

/// Draw increments from a counter-based stream: deterministic function of
/// (config, n_per_unit, T, stream key).
inline DriverIncrements generate(const LevyConfig& config, std::size_t n_per_unit,
                                 double T, RngStream stream) {
  config.validate();
  double steps_f = T * static_cast<double>(n_per_unit);
  double steps_round = std::round(steps_f);
  if (std::abs(steps_f - steps_round) > 1e-9 || steps_round < 1.0)
    throw std::invalid_argument("generate: T * n_per_unit must be a positive integer");
  DriverIncrements out;
  out.n_per_unit = n_per_unit;
  out.T = T;
  out.steps = static_cast<std::size_t>(steps_round);
  out.dim_d = config.dim_d;
  out.dim_m = config.dim_m;
  double dt = out.dt();
  double sd = std::sqrt(dt);

  out.dB.resize(out.steps * config.dim_m);
  RngStream gauss = stream.split(1);
  for (double& b : out.dB) b = sd * gauss.normal();

  out.compensator_per_step.assign(config.dim_d, 0.0);
  for (const auto& law : config.jumps) {
    auto m = law.mean_xi(config.dim_d);
    for (std::size_t i = 0; i < config.dim_d; ++i)
      out.compensator_per_step[i] += law.rate * m[i] * dt;
  }

  out.jump_events.assign(out.steps, {});
  RngStream jrng = stream.split(2);
  for (std::size_t li = 0; li < config.jumps.size(); ++li) {
    const auto& law = config.jumps[li];
    for (std::size_t k = 0; k < out.steps; ++k) {
      unsigned count = jrng.poisson(law.rate * dt);
      for (unsigned j = 0; j < count; ++j) {
        double u = jrng.uniform();
        double acc = 0.0;
        std::size_t pick = law.atoms.size() - 1;
        for (std::size_t ai = 0; ai < law.atoms.size(); ++ai) {
          acc += law.atoms[ai].second;
          if (u <= acc) { pick = ai; break; }
        }
        out.jump_events[k].push_back(JumpEvent{li, law.atoms[pick].first});
      }
    }
  }
  return out;
}

/// Coarsen the grid by summing fine increments within consecutive blocks:
/// same underlying noise path on two meshes.
inline DriverIncrements refine_aggregate(const DriverIncrements& fine, std::size_t factor) {
  if (factor == 0 || fine.steps % factor != 0 || fine.n_per_unit % factor != 0)
    throw std::invalid_argument("refine_aggregate: factor must divide the fine grid");
  DriverIncrements out;
  out.n_per_unit = fine.n_per_unit / factor;
  out.T = fine.T;
  out.steps = fine.steps / factor;
  out.dim_d = fine.dim_d;
  out.dim_m = fine.dim_m;
  out.dB.assign(out.steps * fine.dim_m, 0.0);
  out.jump_events.assign(out.steps, {});
  for (std::size_t k = 0; k < out.steps; ++k) {
    for (std::size_t j = 0; j < factor; ++j) {
      std::size_t kf = k * factor + j;
      for (std::size_t c = 0; c < fine.dim_m; ++c)
        out.dB[k * fine.dim_m + c] += fine.dB[kf * fine.dim_m + c];
      for (const auto& ev : fine.jump_events[kf]) out.jump_events[k].push_back(ev);
    }
  }
  out.compensator_per_step.resize(fine.dim_d);
  for (std::size_t i = 0; i < fine.dim_d; ++i)
    out.compensator_per_step[i] = fine.compensator_per_step[i] * static_cast<double>(factor);
  return out;
}

inline nlohmann::json to_json(const LevyConfig& c) {
  nlohmann::json jlaws = nlohmann::json::array();
  for (const auto& law : c.jumps) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& [xi, prob] : law.atoms)
      atoms.push_back({{"xi", xi}, {"prob", prob}});
    jlaws.push_back({{"rate", law.rate}, {"atoms", atoms}});
  }
  nlohmann::json sigma_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < c.dim_d; ++i) {
    std::vector<double> row(c.sigma.begin() + i * c.dim_m, c.sigma.begin() + (i + 1) * c.dim_m);
    sigma_rows.push_back(row);
  }
  return nlohmann::json{{"d", c.dim_d}, {"m", c.dim_m}, {"b", c.drift_b},
                        {"sigma", sigma_rows}, {"jumps", jlaws}, {"cap", c.jump_cap}};
}

inline LevyConfig levy_from_json(const nlohmann::json& j) {
  LevyConfig c;
  c.dim_d = j.at("d").get<std::size_t>();
  c.dim_m = j.at("m").get<std::size_t>();
  c.drift_b = j.at("b").get<std::vector<double>>();
  c.sigma.clear();
  for (const auto& row : j.at("sigma"))
    for (const auto& v : row) c.sigma.push_back(v.get<double>());
  c.jump_cap = j.value("cap", 1.0);
  for (const auto& jl : j.value("jumps", nlohmann::json::array())) {
    JumpLaw law;
    law.rate = jl.at("rate").get<double>();
    for (const auto& atom : jl.at("atoms"))
      law.atoms.emplace_back(atom.at("xi").get<std::vector<double>>(),
                             atom.at("prob").get<double>());
    c.jumps.push_back(std::move(law));
  }
  c.validate();
  return c;
}

}  // namespace bihari
