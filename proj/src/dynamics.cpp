#include "bcl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bcl {

double default_dt_micro(const ModelParams& p) {
  const DerivedParams d = derive_params(p);
  // gamma = 0 and alpha = 0 leave only the bath, which substeps internally
  double dt = p.gamma > 0.0 ? 0.1 / p.gamma : 1.0;
  if (p.alpha != 0.0) {
    const double m = d.rho + 5.0 * std::sqrt(d.sigma2);
    dt = std::min(dt, 0.01 * npow(p, p.kappa) / (std::abs(p.alpha) * m));
  }
  return dt;
}

std::int64_t bath_site(double tau, const ModelParams& p) {
  const DerivedParams d = derive_params(p);
  const double nn = static_cast<double>(p.n) * p.n;
  return -static_cast<std::int64_t>(std::floor(d.c_n * (tau / nn)));
}

void drift_step(ChainState& s, const ModelParams& p, double dt, Backend b) {
  if (p.alpha == 0.0 || dt == 0.0) return;
  const double c = p.alpha * npow(p, -p.kappa) * dt;
  thread_local std::vector<double> out;
  out.resize(s.sites.size());
  const std::size_t bad = drift_kernel(s.sites.data(), out.data(), s.sites.size(), c, b);
  if (bad != s.sites.size())
    throw NumericalBlowup(s.x_lo + static_cast<std::int64_t>(bad), s.tau);
  s.sites.swap(out);
}

std::uint64_t exchange_step(ChainState& s, const ModelParams& p, double dt, Rng& rng,
                            ExchangeMode mode) {
  const std::uint64_t w = s.sites.size();
  const double rate = p.gamma * static_cast<double>(w);
  if (dt <= 0.0 || w < 2) return 0;
  auto swap_bond = [&](std::uint64_t b) {
    const std::uint64_t r = b + 1 == w ? 0 : b + 1;
    std::swap(s.sites[b], s.sites[r]);
  };
  std::uint64_t events = 0;
  if (mode == ExchangeMode::exact) {
    // superposition of the W bond clocks, each ring on a uniform bond
    double clock = exponential(rng, rate);
    while (clock <= dt) {
      swap_bond(uniform_index(rng, w));
      ++events;
      clock += exponential(rng, rate);
    }
    return events;
  }
  std::vector<std::uint64_t> rings;
  const double mean = p.gamma * dt;
  for (std::uint64_t b = 0; b < w; ++b) {
    const std::uint64_t k = poisson(rng, mean);
    for (std::uint64_t i = 0; i < k; ++i) rings.push_back(b);
  }
  for (std::size_t i = rings.size(); i > 1; --i)
    std::swap(rings[i - 1], rings[uniform_index(rng, i)]);
  for (auto b : rings) swap_bond(b);
  return rings.size();
}

BathResult bath_step(ChainState& s, const ModelParams& p, double dt, double tau, Rng& rng,
                     double substep) {
  BathResult res;
  const DerivedParams d = derive_params(p);
  const double strength = npow(p, -p.delta);
  const double total = strength * dt;
  if (!(total > 0.0)) return res;
  double& xi = s.at(bath_site(tau, p));
  if (total > 20.0 * d.sigma2) {
    // twenty relaxation times within one step: the site is at equilibrium
    xi = gamma_variate(rng, p.lambda + 1.0, p.beta);
    res.resampled = true;
    return res;
  }
  const auto m = static_cast<std::uint64_t>(std::ceil(total / (substep * d.sigma2)));
  const double h = total / static_cast<double>(m);
  const double noise = std::sqrt(2.0 * h);
  auto grad = [&](double u) { return p.lambda / u - p.beta; };
  auto log_pi = [&](double u) { return p.lambda * std::log(u) - p.beta * u; };
  for (std::uint64_t k = 0; k < m; ++k) {
    const double x = xi;
    const double mean_x = x + h * grad(x);
    const double y = mean_x + noise * std_normal(rng);
    const double u = uniform01(rng);
    ++res.substeps;
    if (!(y > 0.0)) {
      ++res.rejections;
      continue;
    }
    const double mean_y = y + h * grad(y);
    const double fwd = (y - mean_x) * (y - mean_x);
    const double bwd = (x - mean_y) * (x - mean_y);
    const double log_acc = log_pi(y) - log_pi(x) + (fwd - bwd) / (4.0 * h);
    if (std::log(u) < log_acc) {
      xi = y;
    } else {
      ++res.rejections;
    }
  }
  return res;
}

Simulator::Simulator(const ModelParams& p, const IntegratorConfig& cfg, ChainState initial,
                     Rng rng)
    : p_(p), cfg_(cfg), state_(std::move(initial)), rng_(rng) {
  validate(p_);
  if (state_.size() < 3) throw DomainError("window: length must be >= 3");
  if (cfg_.samples < 1) throw DomainError("samples: must be >= 1");
  if (!(cfg_.t_macro_max > 0.0)) throw DomainError("T: must be > 0");
  for (double v : state_.sites)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("initial state: sites must be positive");
  const double nn = static_cast<double>(p_.n) * p_.n;
  const double interval = cfg_.t_macro_max * nn / cfg_.samples;
  double dt0 = cfg_.dt_micro > 0.0 ? cfg_.dt_micro : default_dt_micro(p_);
  if (cfg_.exchange_mode == ExchangeMode::tau_leap && p_.gamma * dt0 > 0.1)
    throw DomainError("dt_micro: tau-leap mode needs gamma dt <= 0.1");
  steps_per_sample_ = static_cast<std::uint64_t>(std::ceil(interval / dt0 - 1e-9));
  if (steps_per_sample_ == 0) steps_per_sample_ = 1;
  dt_ = interval / static_cast<double>(steps_per_sample_);
  state_.tau = 0.0;
  last_bath_ = bath_site(0.0, p_);
  log_.bath_trajectory.emplace_back(0.0, last_bath_);
}

double Simulator::t_macro() const {
  return state_.tau / (static_cast<double>(p_.n) * p_.n);
}

void Simulator::step() {
  const double tau0 = static_cast<double>(step_) * dt_;
  state_.tau = tau0;
  drift_step(state_, p_, 0.5 * dt_, cfg_.backend);
  log_.exchange_count += exchange_step(state_, p_, dt_, rng_, cfg_.exchange_mode);
  if (cfg_.bath_enabled) {
    const BathResult r = bath_step(state_, p_, dt_, tau0, rng_, cfg_.bath_substep);
    log_.bath_steps += r.substeps;
    log_.bath_rejections += r.rejections;
    log_.bath_resamples += r.resampled ? 1 : 0;
  }
  drift_step(state_, p_, 0.5 * dt_, cfg_.backend);
  ++step_;
  state_.tau = static_cast<double>(step_) * dt_;
  const std::int64_t b = bath_site(state_.tau, p_);
  if (b != last_bath_) {
    last_bath_ = b;
    log_.bath_trajectory.emplace_back(state_.tau, b);
  }
}

nlohmann::json params_to_json(const ModelParams& p) {
  return {{"beta", p.beta},   {"lambda", p.lambda}, {"alpha", p.alpha}, {"gamma", p.gamma},
          {"kappa", p.kappa}, {"delta", p.delta},   {"n", p.n}};
}

ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams p;
  p.beta = j.at("beta").get<double>();
  p.lambda = j.at("lambda").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.kappa = j.at("kappa").get<double>();
  p.delta = j.at("delta").get<double>();
  p.n = j.at("n").get<int>();
  return p;
}

nlohmann::json config_to_json(const IntegratorConfig& c) {
  return {{"dt_micro", c.dt_micro},
          {"exchange_mode", c.exchange_mode == ExchangeMode::exact ? "exact" : "tau_leap"},
          {"T", c.t_macro_max},
          {"bath_enabled", c.bath_enabled},
          {"samples", c.samples},
          {"window_buffer", c.window_buffer},
          {"bath_substep", c.bath_substep}};
}

IntegratorConfig config_from_json(const nlohmann::json& j) {
  IntegratorConfig c;
  c.dt_micro = j.at("dt_micro").get<double>();
  c.exchange_mode = j.at("exchange_mode").get<std::string>() == "exact" ? ExchangeMode::exact
                                                                       : ExchangeMode::tau_leap;
  c.t_macro_max = j.at("T").get<double>();
  c.bath_enabled = j.at("bath_enabled").get<bool>();
  c.samples = j.at("samples").get<int>();
  c.window_buffer = j.at("window_buffer").get<int>();
  c.bath_substep = j.at("bath_substep").get<double>();
  return c;
}

nlohmann::json Simulator::checkpoint() const {
  nlohmann::json j;
  j["format"] = "bcl-checkpoint";
  j["version"] = 1;
  j["params"] = params_to_json(p_);
  j["config"] = config_to_json(cfg_);
  j["step"] = step_;
  j["tau"] = state_.tau;
  j["x_lo"] = state_.x_lo;
  j["sites"] = state_.sites;
  j["rng"] = rng_state(rng_);
  j["log"] = {{"exchange_count", log_.exchange_count},
              {"bath_steps", log_.bath_steps},
              {"bath_rejections", log_.bath_rejections},
              {"bath_resamples", log_.bath_resamples},
              {"bath_trajectory", log_.bath_trajectory}};
  return j;
}

Simulator Simulator::from_checkpoint(const nlohmann::json& j) {
  if (j.value("format", "") != "bcl-checkpoint" || j.value("version", 0) != 1)
    throw std::runtime_error("not a version 1 checkpoint");
  ChainState s;
  s.x_lo = j.at("x_lo").get<std::int64_t>();
  s.sites = j.at("sites").get<std::vector<double>>();
  Rng rng;
  set_rng_state(rng, j.at("rng").get<std::string>());
  Simulator sim(params_from_json(j.at("params")), config_from_json(j.at("config")), s, rng);
  sim.step_ = j.at("step").get<std::uint64_t>();
  sim.state_.tau = j.at("tau").get<double>();
  const auto& lg = j.at("log");
  sim.log_.exchange_count = lg.at("exchange_count").get<std::uint64_t>();
  sim.log_.bath_steps = lg.at("bath_steps").get<std::uint64_t>();
  sim.log_.bath_rejections = lg.at("bath_rejections").get<std::uint64_t>();
  sim.log_.bath_resamples = lg.at("bath_resamples").get<std::uint64_t>();
  sim.log_.bath_trajectory =
      lg.at("bath_trajectory").get<std::vector<std::pair<double, std::int64_t>>>();
  sim.last_bath_ = sim.log_.bath_trajectory.back().second;
  return sim;
}

Trajectory run(const ModelParams& p, const IntegratorConfig& cfg, ChainState initial,
               const std::vector<Observer*>& observers, Rng& rng) {
  std::set<std::string> names;
  for (auto* o : observers)
    if (!names.insert(o->name()).second)
      throw std::invalid_argument("observer name used twice: " + o->name());

  Simulator sim(p, cfg, std::move(initial), rng);
  const double nn = static_cast<double>(p.n) * p.n;
  const double dt_macro = sim.dt() / nn;
  Trajectory traj;
  traj.dt_micro = sim.dt();
  traj.sample_times.push_back(0.0);
  for (auto* o : observers) o->start(sim.state(), 0.0);
  ChainState last_good = sim.state();
  for (int k = 1; k <= cfg.samples; ++k) {
    for (std::uint64_t j = 0; j < sim.steps_per_sample(); ++j) {
      const double t = sim.t_macro();
      for (auto* o : observers) o->step(sim.state(), t, dt_macro);
      try {
        sim.step();
      } catch (NumericalBlowup& e) {
        e.last_good = last_good;
        throw;
      }
    }
    const double t = sim.t_macro();
    traj.sample_times.push_back(t);
    for (auto* o : observers) o->sample(sim.state(), t);
    last_good = sim.state();
  }
  traj.final_state = sim.state();
  traj.log = sim.log();
  traj.steps = sim.step_index();
  rng = sim.rng();
  return traj;
}

Trajectory run(const ModelParams& p, const IntegratorConfig& cfg,
               const std::vector<Observer*>& observers, Rng& rng) {
  ChainState init = sample_gibbs(p, make_window(p, cfg.t_macro_max, cfg.window_buffer), rng);
  return run(p, cfg, std::move(init), observers, rng);
}

}  // namespace bcl
