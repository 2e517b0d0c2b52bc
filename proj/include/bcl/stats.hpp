#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcl/spde_ref.hpp"
#include "bcl/testfn.hpp"

namespace bcl {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanSE mean_se(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);
double skewness(const std::vector<double>& x);
double excess_kurtosis(const std::vector<double>& x);
// Standard errors of the sample skewness and excess kurtosis under normality.
double skewness_se(std::size_t n);
double kurtosis_se(std::size_t n);

// (estimate - target) / se; +-inf when se == 0 and they differ.
double z_score(double estimate, double target, double se);

struct KSResult {
  double d = 0.0;
  double p_value = 1.0;
};
// One-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov law.
KSResult ks_test(std::vector<double> x, const std::function<double(double)>& cdf);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// Percentile bootstrap over replicas: every resample redraws the replicas of
// each grid point independently and refits the log-log slope of the means.
Interval bootstrap_slope_ci(const std::vector<double>& x,
                            const std::vector<std::vector<double>>& replicas, std::uint64_t seed,
                            int resamples = 1000, double level = 0.95);

// Bootstrap CI of mean(replicas) / scale.
Interval bootstrap_mean_ci(const std::vector<double>& replicas, double scale, std::uint64_t seed,
                           int resamples = 1000, double level = 0.95);

struct ScalingPoint {
  double x = 0.0;
  double mean = 0.0;
  double se = 0.0;
  std::size_t replicas = 0;
};

struct ScalingReport {
  std::string name;
  std::string abscissa;  // "n", "ell" or "eps"
  std::vector<ScalingPoint> points;
  double slope = 0.0;
  Interval ci;
  double target = 0.0;
  bool pass = false;

  void write_csv(std::ostream& os, bool header = true) const;
  nlohmann::json to_json() const;
};

// Requires at least 8 replicas per point and 2 points.
ScalingReport make_scaling_report(std::string name, std::string abscissa,
                                  const std::vector<double>& x,
                                  const std::vector<std::vector<double>>& replicas, double target,
                                  std::uint64_t seed, int resamples = 1000);

// Fits data with a known power law; used by the selftest of the regression
// machinery.
ScalingReport synthetic_slope_check(double slope, std::size_t replicas, std::uint64_t seed);

struct WhiteNoiseVerdict {
  double z_mean_h = 0.0, z_mean_g = 0.0;
  double z_var_h = 0.0, z_var_g = 0.0, z_cov = 0.0;
  double skew_h = 0.0, z_skew_h = 0.0;
  double kurt_h = 0.0, z_kurt_h = 0.0;
  bool covariance_pass = false;  // means, variances and covariance within z_max
  bool gaussian_pass = false;    // skewness and kurtosis within z_max
  bool pass() const { return covariance_pass && gaussian_pass; }
};

// yh, yg: paired samples of Y(H), Y(G).  var_h, var_g, cov: predicted second
// moments.  Throws on fewer than 1000 samples or a degenerate variance.
WhiteNoiseVerdict whitenoise_test(const std::vector<double>& yh, const std::vector<double>& yg,
                                  double var_h, double var_g, double cov, double z_max = 3.0);

// One grid cell of the Boltzmann-Gibbs check.
struct BGCell {
  double eps = 0.0;
  int n = 0;
  double t = 0.0;
  double psi_norm_integral = 0.0;  // int_0^t ||psi||_{2,n}^2 ds
  std::vector<double> integrals;   // one per replica
};

struct BGRow {
  double eps = 0.0;
  int n = 0;
  MeanSE lhs;
  double bound = 0.0;  // int ||psi||^2 (eps + t / (eps^2 n))
  double ratio = 0.0;
  Interval ratio_ci;
};

struct BGReport {
  std::vector<BGRow> rows;
  double c_min = 0.0, c_max = 0.0;
  double c_fit = 0.0;  // 4 c_min
  bool stable = false;
  bool never_violated = false;
  bool pass() const { return stable && never_violated; }
  void write_csv(std::ostream& os) const;
};

BGReport bg_principle_test(const std::vector<BGCell>& cells, std::uint64_t seed);

enum class ReplacementMode { box, boundary, bath_h1 };
const char* to_string(ReplacementMode m);

// Target log-log slope: box is +1 in ell and -2 in n, boundary delta - 1,
// bath_h1 delta - 2 (both in n).
double replacement_target(ReplacementMode m, const std::string& abscissa, double delta);

ScalingReport replacement_scaling(ReplacementMode m, const std::string& abscissa,
                                  const std::vector<double>& x,
                                  const std::vector<std::vector<double>>& replicas, double delta,
                                  std::uint64_t seed);

struct RSFunctionals {
  double R = 0.0;
  double S = 0.0;
  double sup_moment = 0.0;   // sup_u || |u - .| rho(u, .) ||_{L1}
  double mass_defect = 0.0;  // || <rho(u, .), 1> - 1 ||_{L4}
  double sup_row = 0.0;      // sup_u ||rho(u, .)||_{L1}
  double sup_col = 0.0;      // sup_v ||rho(., v)||_{L1}
};

using Kernel2 = std::function<double(double, double)>;

// u runs over the cell edges of [-L, L]; v integrals use 4-point
// Gauss-Legendre on every cell of [-L - pad, L + pad].  The kernel's
// discontinuities should sit on cell edges.
RSFunctionals rs_functionals(const Kernel2& k, double L, double du, double pad);

enum class KernelKind { iota, rho };
const char* to_string(KernelKind k);
Kernel2 make_kernel(KernelKind k, double eps);

// int_u (Y(k^u)^2 - ||k^u||^2) psi(u) du for the cell field g, u on the cell
// edges with |u| <= radius.  eps must be a multiple of the cell width.
double wick_square_functional(const LineGrid& g, KernelKind k, double eps,
                              const std::vector<double>& psi_edges, std::size_t edge_lo);

struct NonlinConfig {
  double L = 3.5;
  double du = 1.0 / 1024.0;
  double T = 0.05;
  double a = 1.0;
  double c = 1.0;
  double h = 0.0;  // 0: a quarter of the smallest kernel scale squared
  std::string psi = "sneu:gauss:4";
  // pairs (eps, delta): iota_eps against rho_delta
  std::vector<std::pair<double, double>> pairs;
  int paths = 32;
  std::uint64_t seed = 1;
};

struct NonlinRow {
  double eps = 0.0, delta = 0.0;
  MeanSE lhs;             // E sup_t |difference|^2
  double rs_sum = 0.0;    // R S(iota_eps) + R S(rho_delta)
  double rhs = 0.0;       // T (psi weight)^2 rs_sum
  double ratio = 0.0;
};

struct NonlinReport {
  std::vector<NonlinRow> rows;  // coarsest pair first
  double K = 0.0;               // twice the ratio at the coarsest pair
  double psi_weight = 0.0;      // ((int u^2 psi^4)^{1/2} + ||psi||)^2
  bool majorized = false;
  bool decreasing = false;
  bool pass() const { return majorized && decreasing; }
  void write_csv(std::ostream& os) const;
};

NonlinReport nonlinearity_approx_test(const NonlinConfig& cfg);

struct ChaosRow {
  std::size_t m = 0;
  MeanSE diff;   // truncated chaos sum minus direct formula
  double mean_sq = 0.0;
};

struct ChaosReport {
  MeanSE direct;
  std::vector<ChaosRow> rows;  // increasing m, the last one complete
  double max_full_error = 0.0;  // complete basis, largest |difference|
  bool pass = false;
};

// Static white noise of unit covariance on [-L, L]; cell-indicator basis
// ordered by distance from 0; G in S_Dir.
ChaosReport chaos_identity_test(const TestFunction& g, double eps, double L, double du,
                                int samples, std::uint64_t seed);

struct OURow {
  double t = 0.0;
  MeanSE empirical;
  double dirichlet = 0.0;
  double full_line = 0.0;
  double z_dirichlet = 0.0;
  double z_full_line = 0.0;
};

struct OUReport {
  std::vector<OURow> rows;
  BoundaryCondition expected = BoundaryCondition::dirichlet;
  double max_z_expected = 0.0;
  double max_z_other = 0.0;
  BoundaryCondition better = BoundaryCondition::dirichlet;  // smaller chi^2
  bool pass(double accept_z = 3.0, double reject_z = 5.0) const {
    return max_z_expected <= accept_z && max_z_other >= reject_z;
  }
  void write_csv(std::ostream& os) const;
};

// series[r][j] = Y(H) at time j * dt in replica r.  The covariance at each
// lag is averaged over time origins within a replica; SE across replicas.
OUReport ou_covariance_test(const std::vector<std::vector<double>>& series, double dt,
                            const std::vector<int>& lags, const TestFunction& h, double a, double c,
                            BoundaryCondition expected);

}  // namespace bcl
