#include "bcl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bcl/field.hpp"
#include "bcl/kernels.hpp"
#include "bcl/spde_ref.hpp"
#include "bcl/testfn.hpp"

namespace fs = std::filesystem;

namespace bcl {

namespace {

const std::set<std::string> kKnownKeys = {
    "beta",       "lambda",      "alpha",        "gamma",       "kappa",      "delta",
    "n",          "dt",          "exchange",     "T",           "bath",       "samples",
    "buffer",     "bath_substep", "backend",     "sweep.n",     "sweep.kappa", "sweep.delta",
    "sweep.eps",  "sweep.ell",   "testfns",      "replicas",    "seed",       "out"};

std::vector<int> to_ints(const KeyValues& kv, const std::string& key, const std::vector<int>& fb) {
  std::vector<double> d(fb.begin(), fb.end());
  d = kv.get_doubles(key, d);
  std::vector<int> out;
  for (double v : d) {
    if (v != std::floor(v)) throw ConfigError(kv.where(key) + ": entries must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << text;
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string replica_name(const std::string& stem, std::size_t r, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_r%04zu%s", stem.c_str(), r, ext);
  return buf;
}

// A finished replica file ends with {"done": true, "config_hash": ...}.
bool replica_done(const fs::path& path, const std::string& hash) {
  if (!fs::exists(path)) return false;
  std::ifstream is(path);
  std::string line, last;
  while (std::getline(is, line))
    if (!line.empty()) last = line;
  if (last.empty()) return false;
  try {
    const auto j = nlohmann::json::parse(last);
    return j.value("done", false) && j.value("config_hash", "") == hash;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

}  // namespace

ExperimentConfig parse_experiment(const std::string& text, const std::string& source) {
  const KeyValues kv = KeyValues::parse(text, source);
  kv.require_known(kKnownKeys);
  ExperimentConfig c;
  c.model = model_params_from(kv, c.model);
  IntegratorConfig& ic = c.integrator;
  ic.dt_micro = kv.get_double("dt", ic.dt_micro);
  const std::string ex = kv.get_string("exchange", "exact");
  if (ex == "exact")
    ic.exchange_mode = ExchangeMode::exact;
  else if (ex == "tau_leap")
    ic.exchange_mode = ExchangeMode::tau_leap;
  else
    throw ConfigError(kv.where("exchange") + ": expected exact or tau_leap, got '" + ex + "'");
  ic.t_macro_max = kv.get_double("T", ic.t_macro_max);
  if (!(ic.t_macro_max > 0.0)) throw ConfigError(kv.where("T") + ": must be > 0");
  ic.bath_enabled = kv.get_bool("bath", ic.bath_enabled);
  ic.samples = static_cast<int>(kv.get_int("samples", ic.samples));
  if (ic.samples < 1) throw ConfigError(kv.where("samples") + ": must be >= 1");
  ic.window_buffer = static_cast<int>(kv.get_int("buffer", ic.window_buffer));
  if (ic.window_buffer < 1) throw ConfigError(kv.where("buffer") + ": must be >= 1");
  ic.bath_substep = kv.get_double("bath_substep", ic.bath_substep);
  if (!(ic.bath_substep > 0.0)) throw ConfigError(kv.where("bath_substep") + ": must be > 0");
  const std::string be = kv.get_string("backend", "serial");
  if (be == "serial")
    ic.backend = Backend::serial;
  else if (be == "openmp")
    ic.backend = Backend::openmp;
  else
    throw ConfigError(kv.where("backend") + ": expected serial or openmp, got '" + be + "'");

  c.n_axis = to_ints(kv, "sweep.n", c.n_axis);
  c.kappa_axis = kv.get_doubles("sweep.kappa", c.kappa_axis);
  c.delta_axis = kv.get_doubles("sweep.delta", c.delta_axis);
  c.eps_axis = kv.get_doubles("sweep.eps", c.eps_axis);
  c.ell_axis = to_ints(kv, "sweep.ell", c.ell_axis);
  for (const char* k : {"sweep.n", "sweep.kappa", "sweep.delta", "sweep.eps", "sweep.ell"}) {
    const bool empty = (std::string(k) == "sweep.n" && c.n_axis.empty()) ||
                       (std::string(k) == "sweep.kappa" && c.kappa_axis.empty()) ||
                       (std::string(k) == "sweep.delta" && c.delta_axis.empty()) ||
                       (std::string(k) == "sweep.eps" && c.eps_axis.empty()) ||
                       (std::string(k) == "sweep.ell" && c.ell_axis.empty());
    if (empty) throw ConfigError(kv.where(k) + ": axis must be nonempty");
  }
  for (int n : c.n_axis)
    if (n < 2) throw ConfigError(kv.where("sweep.n") + ": entries must be >= 2");
  for (double k : c.kappa_axis)
    if (!(k >= 0.5)) throw ConfigError(kv.where("sweep.kappa") + ": entries must be >= 1/2");
  for (double e : c.eps_axis)
    if (!(e > 0.0)) throw ConfigError(kv.where("sweep.eps") + ": entries must be > 0");
  for (int l : c.ell_axis)
    if (l < 1) throw ConfigError(kv.where("sweep.ell") + ": entries must be >= 1");

  c.testfns = kv.get_strings("testfns", c.testfns);
  for (const auto& id : c.testfns) {
    try {
      make_testfn(id);
    } catch (const std::exception& e) {
      throw ConfigError(kv.where("testfns") + ": " + e.what());
    }
  }
  c.replicas = static_cast<int>(kv.get_int("replicas", c.replicas));
  if (c.replicas < 1) throw ConfigError(kv.where("replicas") + ": must be >= 1");
  c.seed = kv.get_u64("seed", c.seed);
  c.out_dir = kv.get_string("out", c.out_dir);
  return c;
}

ExperimentConfig load_experiment(const std::string& path) {
  return parse_experiment(read_text(path), path);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"model", params_to_json(c.model)},
          {"integrator", config_to_json(c.integrator)},
          {"sweep",
           {{"n", c.n_axis},
            {"kappa", c.kappa_axis},
            {"delta", c.delta_axis},
            {"eps", c.eps_axis},
            {"ell", c.ell_axis}}},
          {"testfns", c.testfns},
          {"replicas", c.replicas},
          {"seed", c.seed}};
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t replica) {
  return derive_seed(master, stream, replica);
}

int thread_cap() {
  if (const char* env = std::getenv("BCL_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return omp_get_max_threads();
}

std::vector<ScalingReport> boundary_scaling(const ModelParams& base, const IntegratorConfig& ic,
                                            const std::vector<int>& ns,
                                            const std::vector<double>& deltas, int replicas,
                                            std::uint64_t seed) {
  std::vector<ScalingReport> out;
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const std::size_t jobs = ns.size() * static_cast<std::size_t>(replicas);
    const auto vals = run_jobs<double>(jobs, [&](std::size_t j) {
      ModelParams p = base;
      p.delta = deltas[di];
      p.n = ns[j / replicas];
      Rng rng(replica_seed(seed, 100 + di * 16 + j / replicas, j % replicas));
      BoundaryObserver obs("boundary", {1.0 / p.n}, p);
      IntegratorConfig c = ic;
      c.backend = Backend::serial;
      run(p, c, {&obs}, rng);
      return obs.sup_plus()[0];
    });
    std::vector<double> x;
    std::vector<std::vector<double>> reps(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
      x.push_back(ns[i]);
      for (int r = 0; r < replicas; ++r) reps[i].push_back(vals[i * replicas + r]);
    }
    char name[64];
    std::snprintf(name, sizeof name, "boundary_delta_%g", deltas[di]);
    const bool free = deltas[di] > 1.0;
    ScalingReport rep = make_scaling_report(name, "n", x, reps, free ? 0.0 : deltas[di] - 1.0,
                                            derive_seed(seed, 200 + di));
    if (free) rep.pass = rep.ci.hi >= 0.0;
    out.push_back(rep);
  }
  return out;
}

std::string theory_dynamics(double kappa) { return kappa > 0.5 ? "OU" : "SBE"; }
std::string theory_space(double delta) { return to_string(required_space(delta)); }
std::string empirical_dynamics(double s) { return s > -0.5 ? "SBE" : "OU"; }
std::string empirical_space(double s) {
  if (s >= -0.5) return to_string(SpaceTag::S);
  if (s < -2.0) return to_string(SpaceTag::S_0);
  return to_string(SpaceTag::S_Dir);
}

CommandResult cmd_simulate(const ExperimentConfig& c, bool resume) {
  const std::string hash = hex64(config_hash(c));
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  std::vector<TestFunction> hs;
  for (const auto& id : c.testfns) hs.push_back(make_testfn(id));
  const auto skipped = run_jobs<int>(c.replicas, [&](std::size_t r) {
    const fs::path path = dir / replica_name("observations", r, ".jsonl");
    if (resume && replica_done(path, hash)) return 1;
    Rng rng(replica_seed(c.seed, 1, r));
    std::vector<std::unique_ptr<FieldObserver>> obs;
    std::vector<Observer*> ptrs;
    for (const auto& h : hs) {
      obs.push_back(std::make_unique<FieldObserver>(h.id(), h, c.model, c.integrator.bath_enabled,
                                                    true, Backend::serial));
      ptrs.push_back(obs.back().get());
    }
    const Trajectory tr = run(c.model, c.integrator, ptrs, rng);
    std::ostringstream os;
    for (const auto& o : obs)
      for (const auto& rec : o->records()) {
        auto j = to_json(rec);
        j["replica"] = r;
        os << j.dump() << '\n';
      }
    nlohmann::json done = {{"done", true},
                           {"config_hash", hash},
                           {"replica", r},
                           {"exchanges", tr.log.exchange_count},
                           {"bath_steps", tr.log.bath_steps},
                           {"bath_rejections", tr.log.bath_rejections},
                           {"steps", tr.steps},
                           {"dt_micro", tr.dt_micro}};
    os << done.dump() << '\n';
    write_text(path, os.str());
    return 0;
  });
  int reused = 0;
  for (int s : skipped) reused += s;
  CommandResult res;
  res.summary = {{"command", "simulate"},
                 {"config_hash", hash},
                 {"config", to_json(c)},
                 {"replicas", c.replicas},
                 {"reused", reused}};
  write_text(dir / "summary.json", res.summary.dump(2) + "\n");
  res.message = "wrote " + std::to_string(c.replicas) + " replica files to " + dir.string();
  return res;
}

CommandResult cmd_bc_check(const ExperimentConfig& c) {
  const auto reports =
      boundary_scaling(c.model, c.integrator, c.n_axis, c.delta_axis, c.replicas, c.seed);
  const fs::path dir(c.out_dir);
  std::ostringstream csv;
  CommandResult res;
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    reports[i].write_csv(csv, i == 0);
    arr.push_back(reports[i].to_json());
    res.ok = res.ok && reports[i].pass;
  }
  write_text(dir / "bc_check.csv", csv.str());
  res.summary = {{"command", "bc-check"},
                 {"config_hash", hex64(config_hash(c))},
                 {"reports", arr},
                 {"pass", res.ok}};
  write_text(dir / "bc_check.json", res.summary.dump(2) + "\n");
  res.message = res.ok ? "boundary scaling as predicted" : "boundary scaling deviates";
  return res;
}

CommandResult cmd_sweep(const ExperimentConfig& c, bool resume) {
  const std::string hash = hex64(config_hash(c));
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  std::vector<RegimeCell> cells;
  std::size_t ci = 0;
  for (double kappa : c.kappa_axis) {
    for (double delta : c.delta_axis) {
      RegimeCell cell;
      cell.kappa = kappa;
      cell.delta = delta;
      cell.theory_dynamics = theory_dynamics(kappa);
      cell.theory_space = theory_space(delta);
      char stem[64];
      std::snprintf(stem, sizeof stem, "sweep_cell_%zu.json", ci);
      const fs::path cell_path = dir / stem;
      nlohmann::json cj;
      bool have = false;
      if (resume && fs::exists(cell_path)) {
        cj = nlohmann::json::parse(read_text(cell_path));
        have = cj.value("config_hash", "") == hash;
      }
      if (!have) {
        ModelParams p = c.model;
        p.kappa = kappa;
        p.delta = delta;
        const TestFunction h = builtin_family(required_space(delta), 0);
        const std::size_t R = c.replicas;
        const auto vals = run_jobs<std::pair<double, double>>(
            c.n_axis.size() * R, [&](std::size_t j) {
              ModelParams q = p;
              q.n = c.n_axis[j / R];
              Rng rng(replica_seed(c.seed, 1000 + ci * 16 + j / R, j % R));
              BoundaryObserver bo("boundary", {1.0 / q.n}, q);
              FieldObserver fo("field", h, q, c.integrator.bath_enabled, true, Backend::serial);
              run(q, c.integrator, {&bo, &fo}, rng);
              const double nl = fo.records().back().terms.nonlinear;
              return std::make_pair(bo.sup_plus()[0], nl * nl);
            });
        std::vector<double> x;
        std::vector<std::vector<double>> rb(c.n_axis.size()), rn(c.n_axis.size());
        for (std::size_t i = 0; i < c.n_axis.size(); ++i) {
          x.push_back(c.n_axis[i]);
          for (std::size_t r = 0; r < R; ++r) {
            rb[i].push_back(vals[i * R + r].first);
            rn[i].push_back(vals[i * R + r].second);
          }
        }
        const ScalingReport b = make_scaling_report("boundary", "n", x, rb,
                                                    delta > 1.0 ? 0.0 : delta - 1.0,
                                                    derive_seed(c.seed, 2000 + ci));
        const ScalingReport nl = make_scaling_report("nonlinear", "n", x, rn, 1.0 - 2.0 * kappa,
                                                     derive_seed(c.seed, 3000 + ci));
        cj = {{"config_hash", hash}, {"boundary", b.to_json()}, {"nonlinear", nl.to_json()}};
        write_text(cell_path, cj.dump(2) + "\n");
      }
      auto from_json = [](const nlohmann::json& j) {
        ScalingReport r;
        r.name = j["name"];
        r.abscissa = j["abscissa"];
        for (const auto& p : j["points"])
          r.points.push_back({p["x"], p["mean"], p["se"], p["replicas"]});
        r.slope = j["slope"];
        r.ci = {j["ci"][0], j["ci"][1]};
        r.target = j["target"];
        r.pass = j["pass"];
        return r;
      };
      cell.boundary = from_json(cj["boundary"]);
      cell.nonlinear = from_json(cj["nonlinear"]);
      cell.empirical_dynamics = empirical_dynamics(cell.nonlinear.slope);
      cell.empirical_space = empirical_space(cell.boundary.slope);
      cells.push_back(cell);
      ++ci;
    }
  }
  std::ostringstream csv;
  csv << "kappa,delta,theory_dynamics,theory_space,boundary_slope,boundary_ci_lo,boundary_ci_hi,"
         "nonlinear_slope,nonlinear_ci_lo,nonlinear_ci_hi,empirical_dynamics,empirical_space,"
         "agrees\n";
  nlohmann::json arr = nlohmann::json::array();
  CommandResult res;
  for (const auto& cell : cells) {
    csv << cell.kappa << ',' << cell.delta << ',' << cell.theory_dynamics << ','
        << cell.theory_space << ',' << cell.boundary.slope << ',' << cell.boundary.ci.lo << ','
        << cell.boundary.ci.hi << ',' << cell.nonlinear.slope << ',' << cell.nonlinear.ci.lo << ','
        << cell.nonlinear.ci.hi << ',' << cell.empirical_dynamics << ',' << cell.empirical_space
        << ',' << (cell.agrees() ? "yes" : "no") << '\n';
    arr.push_back({{"kappa", cell.kappa},
                   {"delta", cell.delta},
                   {"theory", cell.theory_dynamics + "(" + cell.theory_space + ")"},
                   {"empirical", cell.empirical_dynamics + "(" + cell.empirical_space + ")"},
                   {"agrees", cell.agrees()}});
    res.ok = res.ok && cell.agrees();
  }
  write_text(dir / "sweep.csv", csv.str());
  res.summary = {{"command", "sweep"}, {"config_hash", hash}, {"cells", arr}, {"pass", res.ok}};
  write_text(dir / "sweep.json", res.summary.dump(2) + "\n");
  res.message = std::to_string(cells.size()) + " cells, " +
                (res.ok ? "all match the regime labels" : "some cells disagree");
  return res;
}

CommandResult cmd_analyze(const std::vector<std::string>& paths, const std::string& out_dir) {
  struct Acc {
    std::vector<double> y, m, qv;
  };
  std::map<std::pair<std::string, double>, Acc> acc;
  std::size_t files = 0;
  for (const auto& arg : paths) {
    std::vector<fs::path> list;
    if (fs::is_directory(arg)) {
      for (const auto& e : fs::directory_iterator(arg))
        if (e.path().extension() == ".jsonl") list.push_back(e.path());
      std::sort(list.begin(), list.end());
    } else {
      list.push_back(arg);
    }
    for (const auto& f : list) {
      ++files;
      std::ifstream is(f);
      std::string line;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        if (j.contains("done")) continue;
        const ObservationRecord r = record_from_json(j);
        Acc& a = acc[{r.h_id, r.t}];
        a.y.push_back(r.y);
        a.m.push_back(r.m);
        a.qv.push_back(r.qv);
      }
    }
  }
  std::ostringstream csv;
  csv << "h,t,replicas,mean_y,se_y,mean_y2,se_y2,mean_m2,se_m2,mean_qv,se_qv,z_m2_vs_qv\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [key, a] : acc) {
    std::vector<double> y2(a.y.size()), m2(a.m.size()), dq(a.m.size());
    for (std::size_t i = 0; i < a.y.size(); ++i) {
      y2[i] = a.y[i] * a.y[i];
      m2[i] = a.m[i] * a.m[i];
      dq[i] = m2[i] - a.qv[i];
    }
    const MeanSE my = mean_se(a.y), my2 = mean_se(y2), mm2 = mean_se(m2), mq = mean_se(a.qv),
                 md = mean_se(dq);
    const double z = z_score(md.mean, 0.0, md.se);
    csv << key.first << ',' << key.second << ',' << a.y.size() << ',' << my.mean << ',' << my.se
        << ',' << my2.mean << ',' << my2.se << ',' << mm2.mean << ',' << mm2.se << ',' << mq.mean
        << ',' << mq.se << ',' << z << '\n';
    rows.push_back({{"h", key.first},
                    {"t", key.second},
                    {"replicas", a.y.size()},
                    {"mean_y2", my2.mean},
                    {"mean_m2", mm2.mean},
                    {"mean_qv", mq.mean},
                    {"z_m2_vs_qv", z}});
  }
  const fs::path dir(out_dir);
  write_text(dir / "analyze.csv", csv.str());
  CommandResult res;
  res.summary = {{"command", "analyze"}, {"files", files}, {"rows", rows}};
  write_text(dir / "analyze.json", res.summary.dump(2) + "\n");
  res.message = "analyzed " + std::to_string(files) + " files";
  return res;
}

CommandResult cmd_selftest(std::uint64_t seed) {
  struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
  };
  std::vector<Check> checks;
  auto add = [&](std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  };
  std::ostringstream d;
  auto fmt = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", v);
    return std::string(b);
  };

  {  // Gibbs sampler moments
    ModelParams p;
    p.beta = 2.0;
    p.lambda = 1.5;
    Rng rng(derive_seed(seed, 1));
    const ChainState s = sample_gibbs(p, Window{0, 200000}, rng);
    const MeanSE m = mean_se(s.sites);
    const DerivedParams dp = derive_params(p);
    const double z = z_score(m.mean, dp.rho, m.se);
    add("gibbs_mean", std::abs(z) <= 4.0, "z = " + fmt(z));
    const KSResult ks = ks_test(s.sites, [&](double x) { return gibbs_cdf(x, p); });
    add("gibbs_ks", ks.p_value > 1e-3, "p = " + fmt(ks.p_value));
  }
  {  // serial and OpenMP drift kernels agree bit-exactly
    Rng rng(derive_seed(seed, 2));
    std::vector<double> in(4096), a(4096), b(4096);
    for (double& v : in) v = gamma_variate(rng, 1.0, 1.0);
    drift_kernel(in.data(), a.data(), in.size(), 0.01, Backend::serial);
    drift_kernel(in.data(), b.data(), in.size(), 0.01, Backend::openmp);
    add("drift_backends", a == b, "4096 sites");
  }
  {  // checkpoint continuation is bit-exact
    ModelParams p;
    p.n = 8;
    IntegratorConfig ic;
    ic.t_macro_max = 0.5;
    Rng rng(derive_seed(seed, 3));
    const ChainState init = sample_gibbs(p, make_window(p, ic.t_macro_max), rng);
    Simulator a(p, ic, init, rng), b(p, ic, init, rng);
    for (int i = 0; i < 50; ++i) a.step();
    for (int i = 0; i < 25; ++i) b.step();
    Simulator c = Simulator::from_checkpoint(nlohmann::json::parse(b.checkpoint().dump()));
    for (int i = 0; i < 25; ++i) c.step();
    add("checkpoint_resume", a.state().sites == c.state().sites && a.tau() == c.tau(), "50 steps");
  }
  {  // rerun with the same seed reproduces a trajectory
    ModelParams p;
    p.n = 8;
    IntegratorConfig ic;
    ic.t_macro_max = 0.25;
    Rng r1(derive_seed(seed, 4)), r2(derive_seed(seed, 4));
    const Trajectory t1 = run(p, ic, {}, r1), t2 = run(p, ic, {}, r2);
    add("determinism", t1.final_state.sites == t2.final_state.sites, "same seed twice");
  }
  {  // zero kernel
    const RSFunctionals f = rs_functionals([](double, double) { return 0.0; }, 0.5, 1.0 / 64, 0.5);
    add("rs_zero_kernel", f.R == 1.0 && f.S == 0.0 && f.sup_moment == 0.0,
        "R = " + fmt(f.R) + " (mass defect of the zero kernel is 1), S = " + fmt(f.S));
  }
  {  // OU covariance at t = 0 and heat kernel value
    const TestFunction h = make_testfn("s:gauss:1"), g = make_testfn("s:gauss:2");
    const double v = ou_covariance(h, g, 0.0, 2.0, 3.0, BoundaryCondition::full_line);
    const double exact = 1.5 * std::sqrt(std::numbers::pi / 3.0);
    add("ou_covariance_t0", std::abs(v - exact) < 1e-9, fmt(v) + " vs " + fmt(exact));
    const double p0 = heat_kernel_full(0.25, 0.0, 0.0, 1.0);
    add("heat_kernel_value", std::abs(p0 - 1.0 / std::sqrt(std::numbers::pi)) < 1e-15, fmt(p0));
  }
  {  // image kernel against the sine series
    const double disc = image_kernel_discrepancy();
    add("image_kernel_gate", disc <= 1e-6, "max diff " + fmt(disc));
  }
  {  // white-noise pairing is linear
    Rng rng(derive_seed(seed, 5));
    const WhiteNoiseSample w = sample_white_noise(4.0, 1.0 / 64, 1.0, rng);
    const TestFunction h = make_testfn("s:hermite:1");
    const double a = w.pair(h), b = w.pair(h.scaled(2.5));
    add("pairing_linear", std::abs(b - 2.5 * a) <= 1e-12 * (1.0 + std::abs(b)), fmt(a));
  }
  {  // regression machinery recovers a known slope
    const ScalingReport r = synthetic_slope_check(-1.0, 16, derive_seed(seed, 6));
    add("synthetic_slope", r.pass,
        "slope " + fmt(r.slope) + " CI [" + fmt(r.ci.lo) + ", " + fmt(r.ci.hi) + "]");
  }
  {  // registry test functions satisfy their space conditions
    std::string bad;
    for (const auto& id : registry_ids()) {
      const auto v = check_space(make_testfn(id));
      if (!v.empty()) bad += id + ": " + v.front() + "; ";
    }
    add("testfn_spaces", bad.empty(), bad.empty() ? "all ids" : bad);
  }
  {  // identical kernels give identical Wick functionals
    Rng rng(derive_seed(seed, 7));
    const WhiteNoiseSample w = sample_white_noise(2.0, 1.0 / 128, 1.0, rng);
    std::vector<double> psi(129, 1.0);
    const double a = wick_square_functional(w.grid, KernelKind::rho, 0.125, psi, 256 - 64);
    const double b = wick_square_functional(w.grid, KernelKind::rho, 0.125, psi, 256 - 64);
    add("same_kernel_zero", a - b == 0.0, fmt(a));
  }

  CommandResult res;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    res.ok = res.ok && c.pass;
  }
  res.summary = {{"command", "selftest"}, {"checks", arr}, {"pass", res.ok}};
  res.message = std::to_string(checks.size()) + " checks, " + (res.ok ? "all pass" : "FAILURES");
  return res;
}

}  // namespace bcl
