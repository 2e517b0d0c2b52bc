#include "bcl/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcl {

GeneratorTerms& GeneratorTerms::operator+=(const GeneratorTerms& o) {
  laplacian += o.laplacian;
  nonlinear += o.nonlinear;
  laplacian_correction += o.laplacian_correction;
  frame_mismatch += o.frame_mismatch;
  bath += o.bath;
  return *this;
}

GeneratorTerms GeneratorTerms::scaled(double c) const {
  GeneratorTerms g = *this;
  g.laplacian *= c;
  g.nonlinear *= c;
  g.laplacian_correction *= c;
  g.frame_mismatch *= c;
  g.bath *= c;
  return g;
}

double frame_shift(const ModelParams& p, double t_macro) {
  return derive_params(p).c_n * t_macro;
}

namespace {

// Sites x with (x + shift)/n inside [-r, r], padded by `pad`.
std::pair<std::int64_t, std::int64_t> support_range(double r, double shift, int n, int pad) {
  const double nd = n;
  const auto lo = static_cast<std::int64_t>(std::floor(-r * nd - shift)) - pad;
  const auto hi = static_cast<std::int64_t>(std::ceil(r * nd - shift)) + pad;
  return {lo, hi};
}

void gather(const ChainState& s, std::int64_t x0, std::int64_t x1, std::vector<double>& out) {
  if (x1 - x0 + 1 > s.size())
    throw std::runtime_error("test function support is wider than the lattice window");
  out.resize(static_cast<std::size_t>(x1 - x0 + 1));
  for (std::int64_t x = x0; x <= x1; ++x) out[static_cast<std::size_t>(x - x0)] = s.at(x);
}

}  // namespace

FieldEvaluator::FieldEvaluator(const ModelParams& p, bool bath_enabled, Backend b)
    : p_(p), d_(derive_params(p)), bath_(bath_enabled), backend_(b) {}

double FieldEvaluator::field(const ChainState& s, const TestFunction& h, double t) const {
  const double shift = d_.c_n * t;
  const double nd = p_.n;
  const auto [lo, hi] = support_range(h.support_radius(), shift, p_.n, 1);
  if (hi - lo + 1 > s.size())
    throw std::runtime_error("test function support is wider than the lattice window");
  double y = 0.0;
  for (std::int64_t x = lo; x <= hi; ++x)
    y += h((static_cast<double>(x) + shift) / nd) * (s.at(x) - d_.rho);
  return y / std::sqrt(nd);
}

FieldEval FieldEvaluator::evaluate(const ChainState& s, const TestFunction& h, double t) const {
  const double shift = d_.c_n * t;
  const double nd = p_.n;
  const auto [lo, hi] = support_range(h.support_radius(), shift, p_.n, 2);
  thread_local std::vector<double> xi, hv, hp;
  gather(s, lo - 1, hi + 1, xi);
  const std::size_t m = static_cast<std::size_t>(hi - lo + 1);
  hv.resize(m + 2);
  hp.resize(m + 2);
  for (std::size_t j = 0; j < m + 2; ++j) {
    const double u = (static_cast<double>(lo - 1 + static_cast<std::int64_t>(j)) + shift) / nd;
    hv[j] = h(u);
    hp[j] = h.d(u, 1);
  }
  const FieldSums fs = field_kernel(xi.data(), hv.data(), hp.data(), m, d_.rho, nd, backend_);

  FieldEval out;
  const double rn = std::sqrt(nd);
  out.y = fs.y / rn;
  out.terms.laplacian = p_.gamma * fs.lap / rn;
  out.terms.nonlinear = -p_.alpha * npow(p_, 0.5 - p_.kappa) * fs.nonlin;
  out.terms.laplacian_correction = p_.alpha * d_.rho * npow(p_, -0.5 - p_.kappa) * fs.lap;
  out.terms.frame_mismatch = 2.0 * p_.alpha * d_.rho * npow(p_, 0.5 - p_.kappa) * fs.mismatch;
  out.qv = p_.gamma * fs.qv / nd;
  const double fl = std::floor(shift);
  out.bath_site = -static_cast<std::int64_t>(fl);
  if (bath_) {
    const double hb = h((shift - fl) / nd);
    const double xb = s.at(out.bath_site);
    out.terms.bath = npow(p_, 1.5 - p_.delta) * hb * (p_.lambda / xb - p_.beta);
    // carre du champ of the unit-diffusion bath generator, times n^{2-delta}
    out.qv += 2.0 * npow(p_, 1.0 - p_.delta) * hb * hb;
  }
  return out;
}

double fluctuation_field(const ChainState& s, const TestFunction& h, double t, const ModelParams& p) {
  return FieldEvaluator(p).field(s, h, t);
}

GeneratorTerms generator_action(const ChainState& s, const TestFunction& h, double t,
                                const ModelParams& p, bool bath_enabled) {
  return FieldEvaluator(p, bath_enabled).evaluate(s, h, t).terms;
}

double qv_integrand(const ChainState& s, const TestFunction& h, double t, const ModelParams& p,
                    bool bath_enabled) {
  return FieldEvaluator(p, bath_enabled).evaluate(s, h, t).qv;
}

nlohmann::json to_json(const ObservationRecord& r) {
  return {{"t", r.t},
          {"H_id", r.h_id},
          {"Y", r.y},
          {"M", r.m},
          {"QV", r.qv},
          {"terms",
           {{"laplacian", r.terms.laplacian},
            {"nonlinear", r.terms.nonlinear},
            {"laplacian_correction", r.terms.laplacian_correction},
            {"frame_mismatch", r.terms.frame_mismatch},
            {"bath", r.terms.bath}}},
          {"bath_site", r.bath_site},
          {"off_theory", r.off_theory}};
}

ObservationRecord record_from_json(const nlohmann::json& j) {
  ObservationRecord r;
  r.t = j.at("t").get<double>();
  r.h_id = j.at("H_id").get<std::string>();
  r.y = j.at("Y").get<double>();
  r.m = j.at("M").get<double>();
  r.qv = j.at("QV").get<double>();
  const auto& tj = j.at("terms");
  r.terms.laplacian = tj.at("laplacian").get<double>();
  r.terms.nonlinear = tj.at("nonlinear").get<double>();
  r.terms.laplacian_correction = tj.at("laplacian_correction").get<double>();
  r.terms.frame_mismatch = tj.at("frame_mismatch").get<double>();
  r.terms.bath = tj.at("bath").get<double>();
  r.bath_site = j.at("bath_site").get<std::int64_t>();
  r.off_theory = j.value("off_theory", false);
  return r;
}

FieldObserver::FieldObserver(std::string name, TestFunction h, const ModelParams& p,
                             bool bath_enabled, bool track_generator, Backend b)
    : name_(std::move(name)),
      h_(std::move(h)),
      p_(p),
      eval_(p, bath_enabled, b),
      track_(track_generator),
      off_theory_(!h_.in_theory(p.delta)) {}

ObservationRecord FieldObserver::make_record(const ChainState& s, double t) const {
  ObservationRecord r;
  r.t = t;
  r.h_id = h_.id();
  r.y = eval_.field(s, h_, t);
  r.bath_site = -static_cast<std::int64_t>(std::floor(frame_shift(p_, t)));
  r.off_theory = off_theory_;
  if (track_) {
    r.terms = integral_;
    r.qv = qv_;
    r.m = r.y - y0_ - integral_.total();
  }
  return r;
}

void FieldObserver::start(const ChainState& s, double t) {
  integral_ = GeneratorTerms{};
  qv_ = 0.0;
  records_.clear();
  y0_ = eval_.field(s, h_, t);
  records_.push_back(make_record(s, t));
  records_.back().m = 0.0;
}

void FieldObserver::step(const ChainState& s, double t, double dt_macro) {
  if (!track_) return;
  const FieldEval e = eval_.evaluate(s, h_, t);
  integral_ += e.terms.scaled(dt_macro);
  qv_ += e.qv * dt_macro;
}

void FieldObserver::sample(const ChainState& s, double t) { records_.push_back(make_record(s, t)); }

std::vector<double> dynkin_martingale(const std::vector<ObservationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("dynkin_martingale: no records");
  std::vector<double> m;
  for (const auto& r : records) m.push_back(r.m);
  return m;
}

std::vector<double> predictable_qv(const std::vector<ObservationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("predictable_qv: no records");
  std::vector<double> q;
  for (const auto& r : records) q.push_back(r.qv);
  return q;
}

std::vector<double> realized_qv(const std::vector<ObservationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("realized_qv: no records");
  std::vector<double> q{0.0};
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double dm = records[i].m - records[i - 1].m;
    q.push_back(q.back() + dm * dm);
  }
  return q;
}

double box_average(const ChainState& s, std::int64_t x, double eps, const ModelParams& p) {
  const auto ell = static_cast<std::int64_t>(std::floor(eps * p.n));
  if (ell < 1) throw std::invalid_argument("box_average: floor(eps n) must be >= 1");
  const double rho = derive_params(p).rho;
  double sum = 0.0;
  for (std::int64_t y = x + 1; y <= x + ell; ++y) sum += s.at(y) - rho;
  return sum / static_cast<double>(ell);
}

double iota_field(const ChainState& s, double v, double eps, double t, const ModelParams& p) {
  const double nd = p.n;
  const double shift = frame_shift(p, t);
  const double rho = derive_params(p).rho;
  // sites with v < (x + shift)/n <= v + eps
  const auto x0 = static_cast<std::int64_t>(std::floor(v * nd - shift)) + 1;
  const auto x1 = static_cast<std::int64_t>(std::floor(v * nd + eps * nd - shift));
  double sum = 0.0;
  for (std::int64_t x = x0; x <= x1; ++x) sum += s.at(x) - rho;
  return std::sqrt(nd) * (sum / (eps * nd));
}

double iota_field_mirrored(const ChainState& s, double eps, double t, const ModelParams& p) {
  const double nd = p.n;
  const double shift = frame_shift(p, t);
  const double rho = derive_params(p).rho;
  // sites with -eps <= (x + shift)/n < 0
  const auto x0 = static_cast<std::int64_t>(std::ceil(-eps * nd - shift));
  const auto x1 = static_cast<std::int64_t>(std::ceil(-shift)) - 1;
  double sum = 0.0;
  for (std::int64_t x = x0; x <= x1; ++x) sum += s.at(x) - rho;
  return std::sqrt(nd) * (sum / (eps * nd));
}

BoundaryObserver::BoundaryObserver(std::string name, std::vector<double> eps, const ModelParams& p)
    : name_(std::move(name)), eps_(std::move(eps)), p_(p) {
  int_plus_.assign(eps_.size(), 0.0);
  int_minus_ = sup_plus_ = sup_minus_ = int_plus_;
}

void BoundaryObserver::step(const ChainState& s, double t, double dt_macro) {
  for (std::size_t i = 0; i < eps_.size(); ++i) {
    int_plus_[i] += iota_field(s, 0.0, eps_[i], t, p_) * dt_macro;
    int_minus_[i] += iota_field_mirrored(s, eps_[i], t, p_) * dt_macro;
    sup_plus_[i] = std::max(sup_plus_[i], int_plus_[i] * int_plus_[i]);
    sup_minus_[i] = std::max(sup_minus_[i], int_minus_[i] * int_minus_[i]);
  }
}

ReplacementObserver::ReplacementObserver(std::string name, std::vector<int> ells,
                                         const ModelParams& p)
    : name_(std::move(name)), ells_(std::move(ells)), p_(p), d_(derive_params(p)) {
  for (int l : ells_)
    if (l < 1) throw std::invalid_argument("ReplacementObserver: box sizes must be >= 1");
  int_box_.assign(ells_.size(), 0.0);
  sup_box_ = int_box_;
}

void ReplacementObserver::step(const ChainState& s, double t, double dt_macro) {
  const std::int64_t z = -static_cast<std::int64_t>(std::floor(d_.c_n * t));
  const double xz = s.at(z);
  const int lmax = *std::max_element(ells_.begin(), ells_.end());
  double cum = 0.0;
  int done = 0;
  std::vector<int> order(ells_.size());
  for (std::size_t i = 0; i < ells_.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ells_[a] < ells_[b]; });
  std::size_t next = 0;
  for (int k = 1; k <= lmax && next < order.size(); ++k) {
    cum += s.at(z + k) - xz;
    ++done;
    while (next < order.size() && ells_[order[next]] == done) {
      const auto i = static_cast<std::size_t>(order[next]);
      int_box_[i] += cum / done * dt_macro;
      sup_box_[i] = std::max(sup_box_[i], int_box_[i] * int_box_[i]);
      ++next;
    }
  }
  int_boundary_ += std::sqrt(static_cast<double>(p_.n)) * (xz - d_.rho) * dt_macro;
  sup_boundary_ = std::max(sup_boundary_, int_boundary_ * int_boundary_);
  int_h1_ += (p_.lambda / xz - p_.beta) * dt_macro;
  sup_h1_ = std::max(sup_h1_, int_h1_ * int_h1_);
}

BGObserver::BGObserver(std::string name, TestFunction psi, std::vector<double> eps,
                       const ModelParams& p)
    : name_(std::move(name)), psi_(std::move(psi)), eps_(std::move(eps)), p_(p), d_(derive_params(p)) {
  for (double e : eps_)
    if (std::floor(e * p_.n) < 1) throw std::invalid_argument("BGObserver: floor(eps n) must be >= 1");
  integral_.assign(eps_.size(), 0.0);
}

void BGObserver::step(const ChainState& s, double t, double dt_macro) {
  const double nd = p_.n;
  const double shift = d_.c_n * t;
  const auto [lo, hi] = support_range(psi_.support_radius(), shift, p_.n, 1);
  int lmax = 1;
  for (double e : eps_) lmax = std::max(lmax, static_cast<int>(std::floor(e * nd)));
  thread_local std::vector<double> xb, cum, w;
  gather(s, lo, hi + lmax + 1, xb);
  for (auto& v : xb) v -= d_.rho;
  cum.assign(xb.size() + 1, 0.0);
  for (std::size_t i = 0; i < xb.size(); ++i) cum[i + 1] = cum[i] + xb[i];
  const std::size_t m = static_cast<std::size_t>(hi - lo + 1);
  w.resize(m);
  double norm = 0.0, prod = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    w[j] = psi_((static_cast<double>(lo + static_cast<std::int64_t>(j)) + shift) / nd);
    norm += w[j] * w[j];
    prod += w[j] * xb[j] * xb[j + 1];
  }
  psi_norm_ += norm / nd * dt_macro;
  for (std::size_t i = 0; i < eps_.size(); ++i) {
    const auto ell = static_cast<std::size_t>(std::floor(eps_[i] * nd));
    const double centre = d_.sigma2 / static_cast<double>(ell);
    double acc = prod;
    for (std::size_t j = 0; j < m; ++j) {
      const double box = (cum[j + ell + 1] - cum[j + 1]) / static_cast<double>(ell);
      acc += w[j] * (centre - box * box);
    }
    integral_[i] += acc * dt_macro;
  }
}

QuadraticObserver::QuadraticObserver(std::string name, TestFunction h, double eps,
                                     const ModelParams& p)
    : name_(std::move(name)), h_(std::move(h)), eps_(eps), p_(p) {
  if (std::floor(eps_ * p_.n) < 1)
    throw std::invalid_argument("QuadraticObserver: floor(eps n) must be >= 1");
}

void QuadraticObserver::step(const ChainState& s, double t, double dt_macro) {
  const double nd = p_.n;
  const double shift = frame_shift(p_, t);
  const double ishift = std::ceil(shift);
  const auto [lo, hi] = support_range(h_.support_radius(), shift, p_.n, 2);
  double lat = 0.0, lat_int = 0.0;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double b = box_average(s, x, eps_, p_);
    lat += discrete_grad(h_, p_.n, x, shift) * b * b;
    lat_int += discrete_grad(h_, p_.n, x, ishift) * b * b;
  }
  const auto [zlo, zhi] = support_range(h_.support_radius(), 0.0, p_.n, 2);
  double fld = 0.0;
  for (std::int64_t z = zlo; z <= zhi; ++z) {
    const double y = iota_field(s, static_cast<double>(z) / nd, eps_, t, p_);
    fld += discrete_grad(h_, p_.n, z) * y * y;
  }
  lattice_ += p_.alpha * lat * dt_macro;
  lattice_int_ += p_.alpha * lat_int * dt_macro;
  field_ += p_.alpha * fld / nd * dt_macro;
}

SiteMoments site_moments(const ChainState& s, double t) {
  SiteMoments m;
  m.t = t;
  const double w = static_cast<double>(s.size());
  for (double v : s.sites) m.mean += v;
  m.mean /= w;
  const std::size_t k = s.sites.size();
  for (std::size_t i = 0; i < k; ++i) {
    const double a = s.sites[i] - m.mean;
    const double b = s.sites[i + 1 == k ? 0 : i + 1] - m.mean;
    m.var += a * a;
    m.lag1_cov += a * b;
  }
  m.var /= w;
  m.lag1_cov /= w;
  return m;
}

void SiteMomentObserver::sample(const ChainState& s, double t) {
  moments_.push_back(site_moments(s, t));
}

}  // namespace bcl
