#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bcl/kernels.hpp"
#include "bcl/model.hpp"
#include "bcl/rng.hpp"

namespace bcl {

enum class ExchangeMode { exact, tau_leap };

struct IntegratorConfig {
  double dt_micro = 0.0;  // <= 0 selects default_dt_micro
  ExchangeMode exchange_mode = ExchangeMode::exact;
  double t_macro_max = 0.5;
  bool bath_enabled = true;
  int samples = 10;            // records at k T / samples, k = 1..samples
  int window_buffer = 10;
  double bath_substep = 0.01;  // max bath time n^{-delta} h per substep, in units of sigma^2
  Backend backend = Backend::serial;
};

// min(0.1/gamma, 0.01 n^kappa / (|alpha| m)) with m = rho + 5 sigma, a
// high quantile of the site marginal.
double default_dt_micro(const ModelParams& p);

struct EventLog {
  std::uint64_t exchange_count = 0;
  std::uint64_t bath_steps = 0;       // bath substeps attempted
  std::uint64_t bath_rejections = 0;  // rejected bath proposals
  std::uint64_t bath_resamples = 0;   // steps long enough to redraw from the marginal
  std::vector<std::pair<double, std::int64_t>> bath_trajectory;  // (tau, site) at each move
};

class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(std::int64_t site, double tau)
      : std::runtime_error("numerical blowup at site " + std::to_string(site) + ", tau " +
                           std::to_string(tau)),
        site(site),
        tau(tau) {}
  std::int64_t site;
  double tau;
  std::optional<ChainState> last_good;
};

// Lattice position -floor(c_n tau / n^2) of the heat bath; not wrapped.
std::int64_t bath_site(double tau, const ModelParams& p);

void drift_step(ChainState& s, const ModelParams& p, double dt, Backend b = Backend::serial);

// Returns the number of swaps performed.
std::uint64_t exchange_step(ChainState& s, const ModelParams& p, double dt, Rng& rng,
                            ExchangeMode mode = ExchangeMode::exact);

struct BathResult {
  std::uint64_t substeps = 0;
  std::uint64_t rejections = 0;
  bool resampled = false;
};

// Metropolis-adjusted Langevin substeps for the bath site, exact invariance
// of the Gamma marginal; proposals <= 0 are rejected.
BathResult bath_step(ChainState& s, const ModelParams& p, double dt, double tau, Rng& rng,
                     double substep = 0.01);

// Observers see the state at the left end of every integrator step.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual std::string name() const = 0;
  virtual void start(const ChainState& s, double t) = 0;
  virtual void step(const ChainState& s, double t, double dt_macro) = 0;
  virtual void sample(const ChainState& s, double t) = 0;
};

struct Trajectory {
  std::vector<double> sample_times;  // includes t = 0
  ChainState final_state;
  EventLog log;
  std::uint64_t steps = 0;
  double dt_micro = 0.0;
};

class Simulator {
 public:
  Simulator(const ModelParams& p, const IntegratorConfig& cfg, ChainState initial, Rng rng);

  // Step length actually used: default or configured dt, shrunk so that an
  // integer number of steps separates consecutive sampling times.
  double dt() const { return dt_; }
  std::uint64_t steps_per_sample() const { return steps_per_sample_; }
  std::uint64_t step_index() const { return step_; }
  double tau() const { return state_.tau; }
  double t_macro() const;

  void step();

  const ChainState& state() const { return state_; }
  const EventLog& log() const { return log_; }
  const ModelParams& params() const { return p_; }
  const IntegratorConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }

  nlohmann::json checkpoint() const;
  static Simulator from_checkpoint(const nlohmann::json& j);

 private:
  ModelParams p_;
  IntegratorConfig cfg_;
  ChainState state_;
  Rng rng_;
  EventLog log_;
  double dt_ = 0.0;
  std::uint64_t steps_per_sample_ = 1;
  std::uint64_t step_ = 0;
  std::int64_t last_bath_ = 0;
};

Trajectory run(const ModelParams& p, const IntegratorConfig& cfg, ChainState initial,
               const std::vector<Observer*>& observers, Rng& rng);
// Starts from a Gibbs sample on make_window(p, T, buffer).
Trajectory run(const ModelParams& p, const IntegratorConfig& cfg,
               const std::vector<Observer*>& observers, Rng& rng);

nlohmann::json params_to_json(const ModelParams& p);
ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const IntegratorConfig& c);
IntegratorConfig config_from_json(const nlohmann::json& j);

}  // namespace bcl
