#include "bcl/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "bcl/quadrature.hpp"
#include "bcl/rng.hpp"

namespace bcl {

MeanSE mean_se(const std::vector<double>& x) {
  MeanSE r;
  r.n = x.size();
  if (x.empty()) return r;
  r.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  if (x.size() > 1) r.se = std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
  return r;
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

namespace {

std::array<double, 3> central_moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  return {m2 / n, m3 / n, m4 / n};
}

double quantile_sorted(const std::vector<double>& s, double q) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(s.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  const double f = pos - static_cast<double>(i);
  if (i + 1 >= s.size()) return s.back();
  return s[i] * (1.0 - f) + s[i + 1] * f;
}

}  // namespace

double skewness(const std::vector<double>& x) {
  if (x.size() < 3) return 0.0;
  const auto m = central_moments(x);
  return m[0] > 0.0 ? m[1] / std::pow(m[0], 1.5) : 0.0;
}

double excess_kurtosis(const std::vector<double>& x) {
  if (x.size() < 4) return 0.0;
  const auto m = central_moments(x);
  return m[0] > 0.0 ? m[2] / (m[0] * m[0]) - 3.0 : 0.0;
}

double skewness_se(std::size_t n) {
  const double N = static_cast<double>(n);
  return std::sqrt(6.0 * N * (N - 1.0) / ((N - 2.0) * (N + 1.0) * (N + 3.0)));
}

double kurtosis_se(std::size_t n) {
  const double N = static_cast<double>(n);
  return 2.0 * skewness_se(n) * std::sqrt((N * N - 1.0) / ((N - 3.0) * (N + 5.0)));
}

double z_score(double estimate, double target, double se) {
  if (se > 0.0) return (estimate - target) / se;
  if (estimate == target) return 0.0;
  return estimate > target ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
}

KSResult ks_test(std::vector<double> x, const std::function<double(double)>& cdf) {
  KSResult r;
  if (x.empty()) return r;
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    r.d = std::max({r.d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  const double lam = (sn + 0.12 + 0.11 / sn) * r.d;
  if (lam < 0.2) return r;  // p indistinguishable from 1
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lam * lam);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  r.p_value = std::clamp(p, 0.0, 1.0);
  return r;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

Interval bootstrap_slope_ci(const std::vector<double>& x,
                            const std::vector<std::vector<double>>& replicas, std::uint64_t seed,
                            int resamples, double level) {
  Rng rng(seed);
  std::vector<double> slopes;
  slopes.reserve(resamples);
  std::vector<double> means(x.size());
  for (int b = 0; b < resamples; ++b) {
    bool ok = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto& r = replicas[i];
      double s = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) s += r[uniform_index(rng, r.size())];
      means[i] = s / static_cast<double>(r.size());
      ok = ok && means[i] > 0.0;
    }
    if (ok) slopes.push_back(fit_loglog(x, means).slope);
  }
  std::sort(slopes.begin(), slopes.end());
  const double a = 0.5 * (1.0 - level);
  return {quantile_sorted(slopes, a), quantile_sorted(slopes, 1.0 - a)};
}

Interval bootstrap_mean_ci(const std::vector<double>& replicas, double scale, std::uint64_t seed,
                           int resamples, double level) {
  Rng rng(seed);
  std::vector<double> m(resamples);
  for (int b = 0; b < resamples; ++b) {
    double s = 0.0;
    for (std::size_t j = 0; j < replicas.size(); ++j)
      s += replicas[uniform_index(rng, replicas.size())];
    m[b] = s / static_cast<double>(replicas.size()) / scale;
  }
  std::sort(m.begin(), m.end());
  const double a = 0.5 * (1.0 - level);
  return {quantile_sorted(m, a), quantile_sorted(m, 1.0 - a)};
}

void ScalingReport::write_csv(std::ostream& os, bool header) const {
  if (header) os << "name,abscissa,x,mean,se,replicas,target,slope,ci_lo,ci_hi,pass\n";
  for (const auto& p : points)
    os << name << ',' << abscissa << ',' << p.x << ',' << p.mean << ',' << p.se << ','
       << p.replicas << ',' << target << ',' << slope << ',' << ci.lo << ',' << ci.hi << ','
       << (pass ? "pass" : "fail") << '\n';
}

nlohmann::json ScalingReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points)
    pts.push_back({{"x", p.x}, {"mean", p.mean}, {"se", p.se}, {"replicas", p.replicas}});
  return {{"name", name}, {"abscissa", abscissa}, {"points", pts},       {"slope", slope},
          {"ci", {ci.lo, ci.hi}}, {"target", target}, {"pass", pass}};
}

ScalingReport make_scaling_report(std::string name, std::string abscissa,
                                  const std::vector<double>& x,
                                  const std::vector<std::vector<double>>& replicas, double target,
                                  std::uint64_t seed, int resamples) {
  if (x.size() < 2 || x.size() != replicas.size())
    throw std::invalid_argument("scaling report: need >= 2 grid points");
  ScalingReport r;
  r.name = std::move(name);
  r.abscissa = std::move(abscissa);
  r.target = target;
  std::vector<double> means;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (replicas[i].size() < 8)
      throw std::invalid_argument("scaling report: fewer than 8 replicas at " + r.abscissa + " = " +
                                  std::to_string(x[i]));
    const MeanSE m = mean_se(replicas[i]);
    r.points.push_back({x[i], m.mean, m.se, m.n});
    means.push_back(m.mean);
  }
  r.slope = fit_loglog(x, means).slope;
  r.ci = bootstrap_slope_ci(x, replicas, seed, resamples);
  r.pass = r.ci.contains(target);
  return r;
}

ScalingReport synthetic_slope_check(double slope, std::size_t replicas, std::uint64_t seed) {
  const std::vector<double> x = {16.0, 32.0, 64.0};
  std::vector<std::vector<double>> reps(x.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < replicas; ++j)
      reps[i].push_back(std::pow(x[i], slope) * gamma_variate(rng, 2.0, 2.0));
  return make_scaling_report("synthetic", "n", x, reps, slope, derive_seed(seed, 1));
}

WhiteNoiseVerdict whitenoise_test(const std::vector<double>& yh, const std::vector<double>& yg,
                                  double var_h, double var_g, double cov, double z_max) {
  if (yh.size() != yg.size()) throw std::invalid_argument("whitenoise_test: unpaired samples");
  if (yh.size() < 1000) throw std::invalid_argument("whitenoise_test: need >= 1000 samples");
  if (sample_variance(yh) <= 0.0 || sample_variance(yg) <= 0.0)
    throw std::invalid_argument("whitenoise_test: degenerate sample variance");
  WhiteNoiseVerdict v;
  const MeanSE mh = mean_se(yh), mg = mean_se(yg);
  v.z_mean_h = z_score(mh.mean, 0.0, mh.se);
  v.z_mean_g = z_score(mg.mean, 0.0, mg.se);
  std::vector<double> hh(yh.size()), gg(yh.size()), hg(yh.size());
  for (std::size_t i = 0; i < yh.size(); ++i) {
    hh[i] = yh[i] * yh[i];
    gg[i] = yg[i] * yg[i];
    hg[i] = yh[i] * yg[i];
  }
  const MeanSE shh = mean_se(hh), sgg = mean_se(gg), shg = mean_se(hg);
  v.z_var_h = z_score(shh.mean, var_h, shh.se);
  v.z_var_g = z_score(sgg.mean, var_g, sgg.se);
  v.z_cov = z_score(shg.mean, cov, shg.se);
  v.skew_h = skewness(yh);
  v.z_skew_h = v.skew_h / skewness_se(yh.size());
  v.kurt_h = excess_kurtosis(yh);
  v.z_kurt_h = v.kurt_h / kurtosis_se(yh.size());
  v.covariance_pass = std::abs(v.z_mean_h) <= z_max && std::abs(v.z_mean_g) <= z_max &&
                      std::abs(v.z_var_h) <= z_max && std::abs(v.z_var_g) <= z_max &&
                      std::abs(v.z_cov) <= z_max;
  v.gaussian_pass = std::abs(v.z_skew_h) <= z_max && std::abs(v.z_kurt_h) <= z_max;
  return v;
}

void BGReport::write_csv(std::ostream& os) const {
  os << "eps,n,lhs,se,bound,ratio,ratio_lo,ratio_hi,c_fit,pass\n";
  for (const auto& r : rows)
    os << r.eps << ',' << r.n << ',' << r.lhs.mean << ',' << r.lhs.se << ',' << r.bound << ','
       << r.ratio << ',' << r.ratio_ci.lo << ',' << r.ratio_ci.hi << ',' << c_fit << ','
       << (pass() ? "pass" : "fail") << '\n';
}

BGReport bg_principle_test(const std::vector<BGCell>& cells, std::uint64_t seed) {
  BGReport rep;
  rep.c_min = std::numeric_limits<double>::infinity();
  rep.c_max = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const BGCell& c = cells[i];
    if (std::floor(c.eps * c.n) < 2)
      throw std::invalid_argument("bg_principle_test: floor(eps n) < 2");
    BGRow row;
    row.eps = c.eps;
    row.n = c.n;
    std::vector<double> sq(c.integrals.size());
    for (std::size_t j = 0; j < sq.size(); ++j) sq[j] = c.integrals[j] * c.integrals[j];
    row.lhs = mean_se(sq);
    row.bound = c.psi_norm_integral * (c.eps + c.t / (c.eps * c.eps * c.n));
    if (row.bound > 0.0) {
      row.ratio = row.lhs.mean / row.bound;
      row.ratio_ci = bootstrap_mean_ci(sq, row.bound, derive_seed(seed, 7, i));
    }
    rep.c_min = std::min(rep.c_min, row.ratio);
    rep.c_max = std::max(rep.c_max, row.ratio);
    rep.rows.push_back(row);
  }
  rep.c_fit = 4.0 * rep.c_min;
  rep.stable = rep.c_max <= rep.c_fit;
  rep.never_violated = true;
  for (const auto& r : rep.rows)
    if (r.ratio_ci.lo > rep.c_fit) rep.never_violated = false;
  return rep;
}

const char* to_string(ReplacementMode m) {
  switch (m) {
    case ReplacementMode::box: return "box";
    case ReplacementMode::boundary: return "boundary";
    case ReplacementMode::bath_h1: return "bath_h1";
  }
  return "?";
}

double replacement_target(ReplacementMode m, const std::string& abscissa, double delta) {
  switch (m) {
    case ReplacementMode::box: return abscissa == "ell" ? 1.0 : -2.0;
    case ReplacementMode::boundary: return delta - 1.0;
    case ReplacementMode::bath_h1: return delta - 2.0;
  }
  return 0.0;
}

ScalingReport replacement_scaling(ReplacementMode m, const std::string& abscissa,
                                  const std::vector<double>& x,
                                  const std::vector<std::vector<double>>& replicas, double delta,
                                  std::uint64_t seed) {
  if (abscissa == "n" && x.size() < 3)
    throw std::invalid_argument("replacement_scaling: n grid needs >= 3 points");
  return make_scaling_report(std::string("replacement_") + to_string(m), abscissa, x, replicas,
                             replacement_target(m, abscissa, delta), seed);
}

RSFunctionals rs_functionals(const Kernel2& k, double L, double du, double pad) {
  using GL = boost::math::quadrature::gauss<double, 4>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  std::vector<double> nodes, weights;
  const long nc = std::lround(2.0 * (L + pad) / du);
  for (long c = 0; c < nc; ++c) {
    const double mid = -L - pad + (c + 0.5) * du;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      for (int s : {-1, 1}) {
        if (q == 0 && xs[0] == 0.0 && s == 1) continue;
        nodes.push_back(mid + s * xs[q] * 0.5 * du);
        weights.push_back(ws[q] * 0.5 * du);
      }
    }
  }
  const long ne = std::lround(L / du);
  RSFunctionals r;
  double defect4 = 0.0;
  auto mass_at = [&](double u) {
    double mass = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) mass += k(u, nodes[i]) * weights[i];
    return mass;
  };
  for (long e = -ne; e <= ne; ++e) {
    if (e == 0) {
      // 0 is not in D; the trapezoid weight takes the mean of both one-sided limits
      const double dm = mass_at(-0.0) - 1.0, dp = mass_at(0.0) - 1.0;
      defect4 += du * 0.5 * (dm * dm * dm * dm + dp * dp * dp * dp);
      continue;
    }
    const double u = e * du;
    double row = 0.0, mom = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double kv = k(u, nodes[i]) * weights[i];
      row += std::abs(kv);
      mom += std::abs(u - nodes[i]) * std::abs(kv);
      mass += kv;
    }
    r.sup_row = std::max(r.sup_row, row);
    r.sup_moment = std::max(r.sup_moment, mom);
    const double d = mass - 1.0;
    defect4 += (std::abs(e) == ne ? 0.5 : 1.0) * du * d * d * d * d;
    double col = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) col += std::abs(k(nodes[i], u)) * weights[i];
    r.sup_col = std::max(r.sup_col, col);
  }
  r.mass_defect = std::pow(defect4, 0.25);
  r.R = std::sqrt(r.sup_moment) + r.mass_defect;
  r.S = (r.sup_row + r.sup_row * r.sup_row) * std::sqrt(r.sup_col);
  return r;
}

const char* to_string(KernelKind k) { return k == KernelKind::iota ? "iota" : "rho"; }

Kernel2 make_kernel(KernelKind k, double eps) {
  if (k == KernelKind::iota) return [eps](double u, double v) { return kernel_iota(u, eps, v); };
  return [eps](double u, double v) { return kernel_rho(u, eps, v); };
}

namespace {

// prefix[e] = sum of the first e cells
void cell_prefix(const LineGrid& g, std::vector<double>& prefix) {
  prefix.resize(g.size() + 1);
  prefix[0] = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) prefix[i + 1] = prefix[i] + g.v[i];
}

// psi at each edge, times chi^2 for the reflected kernel
std::vector<double> wick_weights(const LineGrid& g, KernelKind k, double eps,
                                 const std::vector<double>& psi_edges, std::size_t edge_lo) {
  std::vector<double> wt(psi_edges);
  if (k == KernelKind::rho) {
    const double half = static_cast<double>(g.half);
    for (std::size_t j = 0; j < wt.size(); ++j) {
      const double c = kernel_chi((static_cast<double>(edge_lo + j) - half) * g.du, eps);
      wt[j] *= c * c;
    }
  }
  return wt;
}

double wick_from_prefix(const std::vector<double>& prefix, const LineGrid& g, double eps,
                        const std::vector<double>& weights, std::size_t edge_lo) {
  const std::size_t w = static_cast<std::size_t>(std::lround(eps / g.du));
  const double scale = g.du / eps;
  const double* p = prefix.data() + edge_lo;
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double y = (p[j + w] - p[j]) * scale;
    s += weights[j] * (y * y - 1.0 / eps);
  }
  return s * g.du;
}

}  // namespace

double wick_square_functional(const LineGrid& g, KernelKind k, double eps,
                              const std::vector<double>& psi_edges, std::size_t edge_lo) {
  const std::size_t w = static_cast<std::size_t>(std::lround(eps / g.du));
  if (std::abs(static_cast<double>(w) * g.du - eps) > 1e-9 * eps)
    throw std::invalid_argument("wick_square_functional: eps must be a multiple of du");
  if (edge_lo + psi_edges.size() - 1 + w > g.size())
    throw std::invalid_argument("wick_square_functional: box leaves the grid");
  std::vector<double> prefix;
  cell_prefix(g, prefix);
  return wick_from_prefix(prefix, g, eps, wick_weights(g, k, eps, psi_edges, edge_lo), edge_lo);
}

void NonlinReport::write_csv(std::ostream& os) const {
  os << "eps,delta,lhs,se,rs_sum,rhs,ratio,K,pass\n";
  for (const auto& r : rows)
    os << r.eps << ',' << r.delta << ',' << r.lhs.mean << ',' << r.lhs.se << ',' << r.rs_sum << ','
       << r.rhs << ',' << r.ratio << ',' << K << ',' << (pass() ? "pass" : "fail") << '\n';
}

NonlinReport nonlinearity_approx_test(const NonlinConfig& cfg) {
  if (cfg.pairs.empty()) throw std::invalid_argument("nonlinearity_approx_test: no pairs");
  const TestFunction psi = make_testfn(cfg.psi);
  double kmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
  for (const auto& [e, d] : cfg.pairs) {
    kmin = std::min({kmin, e, d});
    kmax = std::max({kmax, e, d});
  }
  if (cfg.du > 0.25 * kmin) throw std::invalid_argument("nonlinearity_approx_test: du too coarse");

  const std::size_t N = spectral_half_cells(cfg.L, cfg.du, BoundaryCondition::dirichlet);
  const double radius = std::min(psi.support_radius(), cfg.L - kmax - cfg.du);
  const std::size_t re = static_cast<std::size_t>(std::floor(radius / cfg.du));
  const std::size_t edge_lo = N - re;
  std::vector<double> psi_edges(2 * re + 1);
  for (std::size_t j = 0; j < psi_edges.size(); ++j)
    psi_edges[j] = psi((static_cast<double>(j) - static_cast<double>(re)) * cfg.du);

  const double h0 = cfg.h > 0.0 ? cfg.h : 0.25 * kmin * kmin;
  const long steps = std::max(1L, std::lround(std::ceil(cfg.T / h0)));
  const double h = cfg.T / static_cast<double>(steps);
  std::vector<long> stride;
  for (const auto& [e, d] : cfg.pairs) {
    const double m = std::min(e, d);
    stride.push_back(std::max(1L, static_cast<long>(std::floor(0.25 * m * m / h))));
  }

  const std::size_t P = cfg.pairs.size();
  std::vector<std::vector<double>> sup2(P, std::vector<double>(cfg.paths, 0.0));
#pragma omp parallel for schedule(dynamic)
  for (int path = 0; path < cfg.paths; ++path) {
    Rng rng(derive_seed(cfg.seed, 0x4e4c, static_cast<std::uint64_t>(path)));
    SpectralOU ou(cfg.L, cfg.du, cfg.a, cfg.c, BoundaryCondition::dirichlet, rng);
    std::vector<double> prefix, integral(P, 0.0), best(P, 0.0);
    std::vector<std::vector<double>> w_iota, w_rho;
    for (const auto& [e, d] : cfg.pairs) {
      w_iota.push_back(wick_weights(ou.cells(), KernelKind::iota, e, psi_edges, edge_lo));
      w_rho.push_back(wick_weights(ou.cells(), KernelKind::rho, d, psi_edges, edge_lo));
    }
    for (long j = 0; j < steps; ++j) {
      bool need = false;
      for (std::size_t p = 0; p < P; ++p) need = need || j % stride[p] == 0;
      if (need) {
        cell_prefix(ou.cells(), prefix);
        for (std::size_t p = 0; p < P; ++p) {
          if (j % stride[p] != 0) continue;
          const auto [e, d] = cfg.pairs[p];
          const double diff =
              wick_from_prefix(prefix, ou.cells(), e, w_iota[p], edge_lo) -
              wick_from_prefix(prefix, ou.cells(), d, w_rho[p], edge_lo);
          const long len = std::min(stride[p], steps - j);
          integral[p] += diff * h * static_cast<double>(len);
          best[p] = std::max(best[p], integral[p] * integral[p]);
        }
      }
      ou.advance(h, rng);
    }
    for (std::size_t p = 0; p < P; ++p) sup2[p][path] = best[p];
  }

  NonlinReport rep;
  const double pr = psi.support_radius();
  auto split = [&](const std::function<double(double)>& f) {
    return integrate(f, -pr, -0.0, 1e-10) + integrate(f, 0.0, pr, 1e-10);
  };
  const double m4 = split([&](double u) { return u * u * std::pow(psi(u), 4); });
  const double l2 = split([&](double u) { return psi(u) * psi(u); });
  rep.psi_weight = std::pow(std::sqrt(m4) + std::sqrt(l2), 2);

  std::map<std::pair<int, double>, double> rs_cache;
  const double du_rs = std::min(kmin / 2.0, 1.0 / 512.0);
  auto rs = [&](KernelKind k, double eps) {
    const auto key = std::make_pair(static_cast<int>(k), eps);
    auto it = rs_cache.find(key);
    if (it != rs_cache.end()) return it->second;
    const RSFunctionals f = rs_functionals(make_kernel(k, eps), 1.0, du_rs, 2.0 * kmax);
    return rs_cache[key] = f.R * f.S;
  };
  for (std::size_t p = 0; p < P; ++p) {
    NonlinRow row;
    row.eps = cfg.pairs[p].first;
    row.delta = cfg.pairs[p].second;
    row.lhs = mean_se(sup2[p]);
    row.rs_sum = rs(KernelKind::iota, row.eps) + rs(KernelKind::rho, row.delta);
    row.rhs = cfg.T * rep.psi_weight * row.rs_sum;
    row.ratio = row.lhs.mean / row.rhs;
    rep.rows.push_back(row);
  }
  rep.K = 2.0 * rep.rows.front().ratio;
  rep.majorized = true;
  rep.decreasing = true;
  for (std::size_t p = 0; p < P; ++p) {
    if (rep.rows[p].ratio > rep.K) rep.majorized = false;
    if (p > 0 && !(rep.rows[p].lhs.mean < rep.rows[p - 1].lhs.mean)) rep.decreasing = false;
  }
  return rep;
}

ChaosReport chaos_identity_test(const TestFunction& g, double eps, double L, double du,
                                int samples, std::uint64_t seed) {
  const std::size_t N = static_cast<std::size_t>(std::ceil(L / du - 1e-9));
  const std::size_t w = static_cast<std::size_t>(std::lround(eps / du));
  const double radius = std::min(g.support_radius(), L - eps - du);
  const std::size_t re = static_cast<std::size_t>(std::floor(radius / du));
  const std::size_t edge_lo = N - re;
  const std::size_t ne = 2 * re + 1;
  std::vector<double> gp(ne);
  for (std::size_t j = 0; j < ne; ++j) {
    const double u = (static_cast<double>(j) - static_cast<double>(re)) * du;
    gp[j] = j == re ? 0.0 : g.d(u, 1);
  }

  // Cell-indicator basis e_k = du^{-1/2} 1_{cell k}.  For an edge u_e the
  // coefficient <rho^u, e_k> is chi(u) du^{1/2} / eps for the w cells of
  // (u, u + eps] and zero otherwise, so M is banded.
  const std::size_t cells = 2 * N;
  const std::size_t band = w;  // |k - l| < w
  std::vector<double> M(cells * (2 * band - 1), 0.0);
  auto mat = [&](std::size_t k, std::size_t l) -> double& {
    return M[k * (2 * band - 1) + (l + band - 1 - k)];
  };
  for (std::size_t j = 0; j < ne; ++j) {
    const std::size_t e = edge_lo + j;
    const double u = (static_cast<double>(e) - static_cast<double>(N)) * du;
    const double a = kernel_chi(u, eps) * std::sqrt(du) / eps;
    const double wgt = du * a * a * gp[j];
    for (std::size_t k = e; k < e + w; ++k)
      for (std::size_t l = e; l < e + w; ++l) mat(k, l) += wgt;
  }
  // Rank of each cell by distance of its centre from 0.
  std::vector<std::size_t> rank(cells);
  for (std::size_t i = 0; i < cells; ++i)
    rank[i] = i < N ? 2 * (N - 1 - i) : 2 * (i - N) + 1;
  std::size_t touched = 0;
  for (std::size_t i = 0; i < cells; ++i)
    for (std::size_t b = 0; b < 2 * band - 1; ++b)
      if (M[i * (2 * band - 1) + b] != 0.0) touched = std::max(touched, rank[i] + 1);
  const std::vector<std::size_t> ms = {touched / 8, touched / 4, touched / 2, touched};

  std::vector<double> direct(samples);
  std::vector<std::vector<double>> diff(ms.size(), std::vector<double>(samples));
  ChaosReport rep;
  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, 0xc4a0, static_cast<std::uint64_t>(s)));
    const WhiteNoiseSample wn = sample_white_noise(L, du, 1.0, rng);
    direct[s] = wick_square_functional(wn.grid, KernelKind::rho, eps, gp, edge_lo);
    std::vector<double> y(cells);
    for (std::size_t i = 0; i < cells; ++i) y[i] = wn.grid.v[i] * std::sqrt(du);
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const std::size_t m = ms[mi];
      double sum = 0.0;
      for (std::size_t k = 0; k < cells; ++k) {
        if (rank[k] >= m) continue;
        const std::size_t l0 = k + 1 >= band ? k + 1 - band : 0;
        const std::size_t l1 = std::min(cells - 1, k + band - 1);
        for (std::size_t l = l0; l <= l1; ++l) {
          if (rank[l] >= m) continue;
          sum += (y[k] * y[l] - (k == l ? 1.0 : 0.0)) * mat(k, l);
        }
      }
      diff[mi][s] = sum - direct[s];
    }
  }
  rep.direct = mean_se(direct);
  rep.pass = true;
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    ChaosRow row;
    row.m = ms[mi];
    row.diff = mean_se(diff[mi]);
    double sq = 0.0;
    for (double d : diff[mi]) sq += d * d;
    row.mean_sq = sq / samples;
    rep.rows.push_back(row);
    if (mi + 1 < ms.size()) {
      if (std::abs(z_score(row.diff.mean, 0.0, row.diff.se)) > 3.0) rep.pass = false;
      if (mi > 0 && !(row.mean_sq <= rep.rows[mi - 1].mean_sq)) rep.pass = false;
    }
  }
  for (double d : diff.back()) rep.max_full_error = std::max(rep.max_full_error, std::abs(d));
  const double scale = std::max(1.0, std::abs(rep.direct.mean) + 3.0 * rep.direct.se * std::sqrt(samples));
  if (rep.max_full_error > 1e-9 * scale) rep.pass = false;
  return rep;
}

void OUReport::write_csv(std::ostream& os) const {
  os << "t,empirical,se,dirichlet,full_line,z_dirichlet,z_full_line,expected\n";
  for (const auto& r : rows)
    os << r.t << ',' << r.empirical.mean << ',' << r.empirical.se << ',' << r.dirichlet << ','
       << r.full_line << ',' << r.z_dirichlet << ',' << r.z_full_line << ',' << to_string(expected)
       << '\n';
}

OUReport ou_covariance_test(const std::vector<std::vector<double>>& series, double dt,
                            const std::vector<int>& lags, const TestFunction& h, double a, double c,
                            BoundaryCondition expected) {
  OUReport rep;
  rep.expected = expected;
  double chi_d = 0.0, chi_f = 0.0;
  for (int lag : lags) {
    std::vector<double> est;
    for (const auto& y : series) {
      if (static_cast<std::size_t>(lag) >= y.size()) continue;
      double s = 0.0;
      const std::size_t cnt = y.size() - lag;
      for (std::size_t j = 0; j < cnt; ++j) s += y[j] * y[j + lag];
      est.push_back(s / static_cast<double>(cnt));
    }
    OURow row;
    row.t = lag * dt;
    row.empirical = mean_se(est);
    row.dirichlet = ou_covariance(h, h, row.t, a, c, BoundaryCondition::dirichlet);
    row.full_line = ou_covariance(h, h, row.t, a, c, BoundaryCondition::full_line);
    row.z_dirichlet = z_score(row.empirical.mean, row.dirichlet, row.empirical.se);
    row.z_full_line = z_score(row.empirical.mean, row.full_line, row.empirical.se);
    chi_d += row.z_dirichlet * row.z_dirichlet;
    chi_f += row.z_full_line * row.z_full_line;
    const double ze = std::abs(expected == BoundaryCondition::dirichlet ? row.z_dirichlet
                                                                        : row.z_full_line);
    const double zo = std::abs(expected == BoundaryCondition::dirichlet ? row.z_full_line
                                                                        : row.z_dirichlet);
    rep.max_z_expected = std::max(rep.max_z_expected, ze);
    rep.max_z_other = std::max(rep.max_z_other, zo);
    rep.rows.push_back(row);
  }
  rep.better = chi_d <= chi_f ? BoundaryCondition::dirichlet : BoundaryCondition::full_line;
  return rep;
}

}  // namespace bcl
