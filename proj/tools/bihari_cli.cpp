// Command-line front end: transform / bound / simulate / verify /
// counterexample / cauchy. JSON configs in, CSV or JSON out. Exit code
// contract: 0 success or all PASS, 1 any FAIL verdict, 2 usage/config error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bihari/montecarlo.hpp"

using namespace bihari;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "bihari 1.0.0 (config-schema 1)";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

/// `--eta` accepts a shorthand (`linear`, `linear:K`, `power:a`, `power:a:K`,
/// `xlog`, `xlog:K`, `square`, `square:K`) or a path to an EtaSpec JSON file.
EtaSpec parse_eta(const std::string& text) {
  if (text.find(".json") != std::string::npos || text.find('/') != std::string::npos)
    return eta_from_json(load_json_file(text));
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw ConfigError("empty --eta");
  auto num = [&](std::size_t i, double fallback) {
    return i < parts.size() ? std::stod(parts[i]) : fallback;
  };
  const std::string& kind = parts[0];
  if (kind == "linear") return EtaSpec::linear(num(1, 1.0));
  if (kind == "power") return EtaSpec::power(num(2, 1.0), num(1, 0.5));
  if (kind == "xlog") return EtaSpec::xlog(num(1, 1.0));
  if (kind == "square") return EtaSpec::square(num(1, 1.0));
  throw ConfigError("unknown eta shorthand: " + kind);
}

HCase parse_hcase(const std::string& s) {
  if (s == "pred") return HCase::PredictableH;
  if (s == "jumps") return HCase::NonnegJumps;
  if (s == "l1") return HCase::L1H;
  throw ConfigError("unknown --case: " + s);
}

Variant parse_variant(const std::string& s) {
  if (s == "sup") return Variant::Sup;
  if (s == "nosup") return Variant::NoSup;
  throw ConfigError("unknown --variant: " + s);
}

unsigned default_workers() {
  if (const char* env = std::getenv("BIHARI_WORKERS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// All numeric output goes through one sink so --out and stdout behave the
/// same; the file is written in one shot for byte-identical reruns.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::trunc);
  if (!f) throw ConfigError("cannot open output file: " + out_path);
  f << text;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string ext_str(const ExtReal& x) {
  return x.is_finite() ? fmt(x.value()) : x.to_string();
}

// --- simulate models ------------------------------------------------------

struct SimSetup {
  SdeModel model;
  LevyConfig noise;
};

/// JSON scalar model: dX = a X dt + b X dB + s * sum xi dNtilde, X_0 = z0.
SimSetup model_from_json(const json& j) {
  SimSetup s;
  double a = j.value("drift_a", 0.0);
  double b = j.value("diffusion_b", 0.0);
  double jump_scale = j.value("jump_scale", 0.0);
  double z0 = j.value("z0", 1.0);
  s.model.dim_d = 1;
  s.model.dim_m = 1;
  s.model.init_z = [z0](double) { return std::vector<double>{z0}; };
  if (a != 0.0)
    s.model.f = [a](double, const FrozenPathView& v) {
      return std::vector<double>{a * v.left_limit_scalar()};
    };
  if (b != 0.0)
    s.model.h = [b](double, const FrozenPathView& v) {
      return std::vector<double>{b * v.left_limit_scalar()};
    };
  if (jump_scale != 0.0)
    s.model.g = [jump_scale](double, const FrozenPathView&, std::span<const double> xi) {
      return std::vector<double>{jump_scale * xi[0]};
    };
  if (j.contains("noise")) {
    s.noise = levy_from_json(j.at("noise"));
  } else {
    s.noise.drift_b = {0.0};
    s.noise.sigma = {1.0};
    if (jump_scale != 0.0)
      s.noise.jumps = {JumpLaw{1.0, {{std::vector<double>{1.0}, 1.0}}}};
  }
  s.noise.validate();
  return s;
}

SimSetup resolve_model(const std::string& name) {
  if (name == "example43") return SimSetup{example43_model(1.0), example43_noise()};
  return model_from_json(load_json_file(name));
}

// --- verify configs -------------------------------------------------------

QuadrupleConfig quadruple_from_json(const json& j) {
  QuadrupleConfig cfg;
  cfg.eta = j.contains("eta") ? eta_from_json(j.at("eta")) : EtaSpec::linear(1.0);
  cfg.A = IncreasingProcess{j.value("A_rate", 1.0), {}};
  if (j.contains("A_jumps"))
    for (const auto& jj : j.at("A_jumps"))
      cfg.A.jumps.emplace_back(jj.at(0).get<double>(), jj.at(1).get<double>());
  if (j.contains("theta_atoms"))
    for (const auto& a : j.at("theta_atoms"))
      cfg.theta.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  cfg.H = j.value("H", 1.0);
  cfg.kappa = j.value("kappa", 0.5);
  cfg.floor = j.value("floor", 0.0);
  cfg.n_per_unit = j.value("n", std::size_t{256});
  cfg.T = j.value("T", 1.0);
  return cfg;
}

json report_to_json(const McReport& r) {
  json out{{"quantity", r.quantity_tag},
           {"estimate", r.estimate},
           {"std_error", r.std_error},
           {"n_trials", r.n_trials},
           {"ci_level", r.ci_level},
           {"verdict", verdict_name(r.verdict)}};
  out["bound"] = r.theoretical_bound.is_finite()
                     ? json(r.theoretical_bound.value())
                     : json(r.theoretical_bound.to_string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bihari-LaSalle bound toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string out_path;
  unsigned workers = default_workers();
  app.add_option("--out", out_path, "Write primary output to this file")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads (wall time only)")->capture_default_str();

  // transform
  auto* cmd_tr = app.add_subcommand("transform", "Tabulate G / G^{-1} on a grid");
  std::string tr_mode = "eval", tr_eta = "linear";
  double tr_lo = 1e-3, tr_hi = 1e3;
  std::size_t tr_points = 64;
  cmd_tr->add_option("mode", tr_mode, "eval or invert")->check(CLI::IsMember({"eval", "invert"}));
  cmd_tr->add_option("--eta", tr_eta, "EtaSpec shorthand or JSON file");
  cmd_tr->add_option("--lo", tr_lo);
  cmd_tr->add_option("--hi", tr_hi);
  cmd_tr->add_option("--points", tr_points);

  // bound
  auto* cmd_bd = app.add_subcommand("bound", "Evaluate a concave bound");
  std::string bd_eta = "linear", bd_case = "pred", bd_variant = "sup";
  double bd_p = 0.5, bd_h = 1.0, bd_a = 1.0;
  cmd_bd->add_option("--eta", bd_eta);
  cmd_bd->add_option("--p", bd_p)->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd_bd->add_option("--case", bd_case)->check(CLI::IsMember({"pred", "jumps", "l1"}));
  cmd_bd->add_option("--variant", bd_variant)->check(CLI::IsMember({"sup", "nosup"}));
  cmd_bd->add_option("--h-norm", bd_h);
  cmd_bd->add_option("--a-t", bd_a);

  // simulate
  auto* cmd_sim = app.add_subcommand("simulate", "Euler-simulate a model");
  std::string sim_model = "example43";
  std::size_t sim_n = 64, sim_trials = 1;
  double sim_T = 1.0;
  std::uint64_t sim_seed = 0;
  std::optional<double> sim_cap;
  cmd_sim->add_option("--model", sim_model, "example43 or a JSON model file");
  cmd_sim->add_option("--n", sim_n, "Steps per unit time");
  cmd_sim->add_option("--T", sim_T);
  cmd_sim->add_option("--trials", sim_trials);
  cmd_sim->add_option("--seed", sim_seed);
  double sim_cap_val = 0.0;
  auto* cap_opt = cmd_sim->add_option("--cap-R", sim_cap_val, "Truncation radius R");

  // verify
  auto* cmd_ver = app.add_subcommand("verify", "Run a Monte Carlo inequality check");
  std::string ver_check, ver_config;
  std::size_t ver_trials = 10000;
  std::uint64_t ver_seed = 0;
  cmd_ver->add_option("--check", ver_check)
      ->required()
      ->check(CLI::IsMember({"thm31", "cor36", "thm38", "counterexample", "cauchy", "osgood"}));
  cmd_ver->add_option("--config", ver_config, "JSON config file");
  cmd_ver->add_option("--trials", ver_trials);
  cmd_ver->add_option("--seed", ver_seed);

  // counterexample
  auto* cmd_cx = app.add_subcommand("counterexample", "Sharpness counterexample table");
  double cx_p = 0.5, cx_gamma = 1.0, cx_T = 1.0;
  std::size_t cx_trials = 100000;
  std::uint64_t cx_seed = 0;
  cmd_cx->add_option("--p", cx_p);
  cmd_cx->add_option("--gamma", cx_gamma);
  cmd_cx->add_option("--T", cx_T);
  cmd_cx->add_option("--trials", cx_trials);
  cmd_cx->add_option("--seed", cx_seed);

  // cauchy
  auto* cmd_cy = app.add_subcommand("cauchy", "Mesh-refinement exceedance table");
  std::string cy_model = "example43";
  std::vector<std::size_t> cy_meshes{16, 64, 256};
  double cy_eps = 0.1, cy_T = 1.0;
  std::size_t cy_trials = 2000;
  std::uint64_t cy_seed = 0;
  cmd_cy->add_option("--model", cy_model);
  cmd_cy->add_option("--n-list", cy_meshes, "Nested mesh list");
  cmd_cy->add_option("--eps", cy_eps);
  cmd_cy->add_option("--T", cy_T);
  cmd_cy->add_option("--trials", cy_trials);
  cmd_cy->add_option("--seed", cy_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are exit 2 by contract
  }

  try {
    if (*cmd_tr) {
      GTransform t(parse_eta(tr_eta));
      std::ostringstream csv;
      if (tr_mode == "eval") {
        csv << "x,G,G_inv_roundtrip\n";
        for (double x : log_spaced(tr_lo, tr_hi, tr_points))
          csv << fmt(x) << ',' << ext_str(t.G(x)) << ','
              << ext_str(t.G_inverse(t.G(x))) << '\n';
      } else {
        csv << "y,G_inv,G_roundtrip\n";
        for (std::size_t i = 0; i < tr_points; ++i) {
          double y = tr_points <= 1
                         ? tr_lo
                         : tr_lo + (tr_hi - tr_lo) * static_cast<double>(i) /
                                       static_cast<double>(tr_points - 1);
          ExtReal x = t.G_inverse(ExtReal(y));
          csv << fmt(y) << ',' << ext_str(x) << ','
              << (x.is_finite() ? ext_str(t.G(x.value())) : ext_str(x)) << '\n';
        }
      }
      emit(out_path, csv.str());
      return 0;
    }

    if (*cmd_bd) {
      GTransform t(parse_eta(bd_eta));
      BoundResult b = concave_bound(t, bd_p, parse_hcase(bd_case),
                                    parse_variant(bd_variant), bd_h, bd_a);
      PExponents k = constants(bd_p);
      json out{{"theorem_tag", b.theorem_tag},
               {"constants_used",
                {{"beta", k.beta},
                 {"alpha1", k.alpha1},
                 {"alpha2", k.alpha2},
                 {"c_inside_G", b.c_inside_G},
                 {"c_mult_A", b.c_mult_A},
                 {"c_outer", b.c_outer}}}};
      out["value"] = b.value.is_finite() ? json(b.value.value()) : json(b.value.to_string());
      emit(out_path, out.dump(2) + "\n");
      return 0;
    }

    if (*cmd_sim) {
      SimSetup setup = resolve_model(sim_model);
      if (cap_opt->count() > 0) sim_cap = sim_cap_val;
      std::vector<std::string> rows(sim_trials);
      parallel_trials(sim_trials, workers, [&](std::size_t i) {
        DriverIncrements inc =
            generate(setup.noise, sim_n, sim_T, RngStream(sim_seed, i));
        EulerRun run = euler_simulate(setup.model, setup.noise, inc, sim_cap);
        double sup = 0.0;
        for (std::size_t node = 0; node < run.path.num_nodes(); ++node)
          sup = std::max(sup, run.path.norm_at(node));
        std::ostringstream row;
        row << i << ',' << sim_seed << ','
            << (run.exit_flag == ExitFlag::Capped ? "capped" : "completed") << ','
            << fmt(sup) << ',' << fmt(run.path.at(run.path.num_nodes() - 1)[0]) << '\n';
        rows[i] = row.str();
      });
      std::string csv = "trial,seed,exit_flag,sup_abs_X,X_T\n";
      for (const auto& r : rows) csv += r;
      emit(out_path, csv);
      return 0;
    }

    if (*cmd_cx) {
      CounterexampleValues cv = counterexample_ratio(cx_p, cx_gamma, cx_T);
      McReport mc = counterexample_mc(cx_p, cx_gamma, cx_T, cx_trials, cx_seed, workers);
      std::ostringstream csv;
      csv << "p,gamma,T,ratio_p_closed,ratio_p_mc,mc_std_error,lower_bound,verdict\n"
          << fmt(cx_p) << ',' << fmt(cx_gamma) << ',' << fmt(cx_T) << ','
          << fmt(cv.ratio_p_pow_p) << ',' << fmt(mc.estimate) << ','
          << fmt(mc.std_error) << ',' << fmt(cv.lower_bound_at_Tn) << ','
          << verdict_name(mc.verdict) << '\n';
      emit(out_path, csv.str());
      return mc.verdict == Verdict::Fail ? 1 : 0;
    }

    if (*cmd_cy) {
      SimSetup setup = resolve_model(cy_model);
      auto rows = cauchy_experiment(setup.model, setup.noise, cy_meshes, cy_eps,
                                    cy_T, cy_trials, cy_seed, workers);
      std::ostringstream csv;
      csv << "n,m,P_exceed\n";
      for (const auto& r : rows)
        csv << r.n << ',' << r.m << ',' << fmt(r.empirical_P_exceed) << '\n';
      emit(out_path, csv.str());
      return 0;
    }

    if (*cmd_ver) {
      json cfg_json = ver_config.empty() ? json::object() : load_json_file(ver_config);
      std::vector<McReport> reports;
      if (ver_check == "thm31") {
        QuadrupleConfig cfg = quadruple_from_json(cfg_json);
        double p = cfg_json.value("p", 0.5);
        HCase hc = parse_hcase(cfg_json.value("case", std::string("pred")));
        Variant var = parse_variant(cfg_json.value("variant", std::string("sup")));
        reports.push_back(verify_concave_bound(cfg, p, hc, var, ver_trials, ver_seed, workers));
      } else if (ver_check == "cor36") {
        QuadrupleConfig cfg = quadruple_from_json(cfg_json);
        if (cfg.theta.atoms.empty()) cfg.theta.atoms = {{0.5, 0.5}, {2.0, 0.5}};
        double p = cfg_json.value("p", 0.5), q = cfg_json.value("q", 1.0);
        HCase hc = parse_hcase(cfg_json.value("case", std::string("pred")));
        Variant var = parse_variant(cfg_json.value("variant", std::string("sup")));
        reports.push_back(verify_random_A(cfg, p, q, hc, var, ver_trials, ver_seed, workers));
      } else if (ver_check == "thm38") {
        QuadrupleConfig cfg = quadruple_from_json(cfg_json);
        if (cfg.floor <= 0.0) cfg.floor = 1.0;
        reports = verify_thm38(cfg, cfg_json.value("p", 0.5), ver_trials, ver_seed, workers);
      } else if (ver_check == "counterexample") {
        reports.push_back(counterexample_mc(cfg_json.value("p", 0.5),
                                            cfg_json.value("gamma", 1.0),
                                            cfg_json.value("T", 1.0), ver_trials,
                                            ver_seed, workers));
      } else if (ver_check == "osgood") {
        QuadrupleConfig cfg = quadruple_from_json(cfg_json);
        std::vector<double> ladder =
            cfg_json.value("H_ladder", std::vector<double>{1.0, 0.1, 0.01});
        double delta = cfg_json.value("delta", 0.01);
        auto probs = exceedance_ladder(cfg, ladder, delta, ver_trials, ver_seed, workers);
        double se = std::sqrt(0.25 / static_cast<double>(ver_trials));
        bool monotone = true;
        for (std::size_t i = 1; i < probs.size(); ++i)
          if (probs[i] > probs[i - 1] + 2.0 * se) monotone = false;
        McReport r;
        r.quantity_tag = "osgood_exceedance_monotone";
        r.estimate = probs.back();
        r.n_trials = ver_trials;
        r.theoretical_bound = ExtReal(probs.front());
        r.verdict = monotone ? Verdict::Pass : Verdict::Fail;
        reports.push_back(r);
      } else {  // cauchy
        std::string model = cfg_json.value("model", std::string("example43"));
        SimSetup setup = resolve_model(model);
        std::vector<std::size_t> meshes =
            cfg_json.value("n_list", std::vector<std::size_t>{16, 64, 256});
        double eps = cfg_json.value("eps", 0.1);
        double T = cfg_json.value("T", 1.0);
        auto rows = cauchy_experiment(setup.model, setup.noise, meshes, eps, T,
                                      ver_trials, ver_seed, workers);
        bool monotone = true;
        for (std::size_t i = 1; i < rows.size(); ++i)
          if (rows[i].empirical_P_exceed > rows[i - 1].empirical_P_exceed)
            monotone = false;
        McReport r;
        r.quantity_tag = "cauchy_exceedance_monotone";
        r.estimate = rows.back().empirical_P_exceed;
        r.n_trials = ver_trials;
        r.theoretical_bound = ExtReal(rows.front().empirical_P_exceed);
        r.verdict = monotone ? Verdict::Pass : Verdict::Fail;
        reports.push_back(r);
      }

      json out = json::array();
      bool any_fail = false;
      for (const auto& r : reports) {
        out.push_back(report_to_json(r));
        if (r.verdict == Verdict::Fail) any_fail = true;
      }
      emit(out_path, out.dump(2) + "\n");
      return any_fail ? 1 : 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
