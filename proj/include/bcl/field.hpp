#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcl/dynamics.hpp"
#include "bcl/kernels.hpp"
#include "bcl/model.hpp"
#include "bcl/testfn.hpp"

namespace bcl {

// The five pieces of (d/ds + n^2 L) Y_s(H) in the moving frame.
struct GeneratorTerms {
  double laplacian = 0.0;             // gamma Y(Delta_n H)
  double nonlinear = 0.0;             // -alpha n^{1/2-kappa} sum grad H xibar_x xibar_{x+1}
  double laplacian_correction = 0.0;  // alpha rho n^{-1/2-kappa} sum Delta_n H xibar_x
  double frame_mismatch = 0.0;        // 2 alpha rho n^{1/2-kappa} sum (H' - grad H) xibar_x
  double bath = 0.0;                  // n^{3/2-delta} H(offset) (lambda/xi_b - beta)

  double total() const {
    return laplacian + nonlinear + laplacian_correction + frame_mismatch + bath;
  }
  GeneratorTerms& operator+=(const GeneratorTerms& o);
  GeneratorTerms scaled(double c) const;
};

struct FieldEval {
  double y = 0.0;
  GeneratorTerms terms;
  double qv = 0.0;  // predictable quadratic variation integrand
  std::int64_t bath_site = 0;
};

// Frame shift c_n t in lattice units; argument of H at site x is (x + shift)/n.
double frame_shift(const ModelParams& p, double t_macro);

class FieldEvaluator {
 public:
  FieldEvaluator(const ModelParams& p, bool bath_enabled = true, Backend b = Backend::serial);

  double field(const ChainState& s, const TestFunction& h, double t) const;
  FieldEval evaluate(const ChainState& s, const TestFunction& h, double t) const;

 private:
  ModelParams p_;
  DerivedParams d_;
  bool bath_;
  Backend backend_;
};

double fluctuation_field(const ChainState& s, const TestFunction& h, double t, const ModelParams& p);
GeneratorTerms generator_action(const ChainState& s, const TestFunction& h, double t,
                                const ModelParams& p, bool bath_enabled = true);
double qv_integrand(const ChainState& s, const TestFunction& h, double t, const ModelParams& p,
                    bool bath_enabled = true);

struct ObservationRecord {
  double t = 0.0;
  std::string h_id;
  double y = 0.0;
  double m = 0.0;   // Dynkin martingale
  double qv = 0.0;  // predictable quadratic variation
  GeneratorTerms terms;  // time integrals of the generator terms on [0, t]
  std::int64_t bath_site = 0;
  bool off_theory = false;
};

nlohmann::json to_json(const ObservationRecord& r);
ObservationRecord record_from_json(const nlohmann::json& j);

// Tracks Y_t(H) and, unless disabled, the left-point integrals of the
// generator terms and of the QV integrand at every integrator step.
class FieldObserver : public Observer {
 public:
  FieldObserver(std::string name, TestFunction h, const ModelParams& p, bool bath_enabled = true,
                bool track_generator = true, Backend b = Backend::serial);

  std::string name() const override { return name_; }
  void start(const ChainState& s, double t) override;
  void step(const ChainState& s, double t, double dt_macro) override;
  void sample(const ChainState& s, double t) override;

  const std::vector<ObservationRecord>& records() const { return records_; }
  const TestFunction& test_function() const { return h_; }

 private:
  ObservationRecord make_record(const ChainState& s, double t) const;

  std::string name_;
  TestFunction h_;
  ModelParams p_;
  FieldEvaluator eval_;
  bool track_;
  bool off_theory_;
  double y0_ = 0.0;
  GeneratorTerms integral_;
  double qv_ = 0.0;
  std::vector<ObservationRecord> records_;
};

// M_t at every record; requires generator tracking.
std::vector<double> dynkin_martingale(const std::vector<ObservationRecord>& records);
std::vector<double> predictable_qv(const std::vector<ObservationRecord>& records);
// Sum of squared martingale increments over the record grid.
std::vector<double> realized_qv(const std::vector<ObservationRecord>& records);

// floor(eps n)^{-1} sum_{y = x+1}^{x + floor(eps n)} xibar_y
double box_average(const ChainState& s, std::int64_t x, double eps, const ModelParams& p);

// Y_t(iota_eps^v) for a macroscopic point v, and the mirrored iota_eps^0(-.)
double iota_field(const ChainState& s, double v, double eps, double t, const ModelParams& p);
double iota_field_mirrored(const ChainState& s, double eps, double t, const ModelParams& p);

// sup_t (int_0^t Y_s(iota_eps^0) ds)^2 and its mirrored variant, for each eps.
class BoundaryObserver : public Observer {
 public:
  BoundaryObserver(std::string name, std::vector<double> eps, const ModelParams& p);
  std::string name() const override { return name_; }
  void start(const ChainState&, double) override {}
  void step(const ChainState& s, double t, double dt_macro) override;
  void sample(const ChainState&, double) override {}

  const std::vector<double>& eps() const { return eps_; }
  const std::vector<double>& sup_plus() const { return sup_plus_; }
  const std::vector<double>& sup_minus() const { return sup_minus_; }

 private:
  std::string name_;
  std::vector<double> eps_;
  ModelParams p_;
  std::vector<double> int_plus_, int_minus_, sup_plus_, sup_minus_;
};

// Replacement functionals at the bath site z(s):
//   box:     int l^{-1} sum_{x=z+1}^{z+l} (xi_x - xi_z) ds
//   boundary: int sqrt(n) xibar_z ds
//   bath_h1:  int (lambda/xi_z - beta) ds
// each reported as sup_t of the square.
class ReplacementObserver : public Observer {
 public:
  ReplacementObserver(std::string name, std::vector<int> ells, const ModelParams& p);
  std::string name() const override { return name_; }
  void start(const ChainState&, double) override {}
  void step(const ChainState& s, double t, double dt_macro) override;
  void sample(const ChainState&, double) override {}

  const std::vector<int>& ells() const { return ells_; }
  const std::vector<double>& sup_box() const { return sup_box_; }
  double sup_boundary() const { return sup_boundary_; }
  double sup_bath_h1() const { return sup_h1_; }

 private:
  std::string name_;
  std::vector<int> ells_;
  ModelParams p_;
  DerivedParams d_;
  std::vector<double> int_box_, sup_box_;
  double int_boundary_ = 0.0, sup_boundary_ = 0.0;
  double int_h1_ = 0.0, sup_h1_ = 0.0;
};

// int_0^t sum_x psi((x + shift)/n) (xibar_x xibar_{x+1} - (box_x)^2 + sigma^2 / floor(eps n)) ds
// for each eps, plus int_0^t ||T psi||_{2,n}^2 ds.
class BGObserver : public Observer {
 public:
  BGObserver(std::string name, TestFunction psi, std::vector<double> eps, const ModelParams& p);
  std::string name() const override { return name_; }
  void start(const ChainState&, double) override {}
  void step(const ChainState& s, double t, double dt_macro) override;
  void sample(const ChainState&, double t) override {
    snapshots_.push_back({t, integral_, psi_norm_});
  }

  struct Snapshot {
    double t = 0.0;
    std::vector<double> integrals;
    double psi_norm_integral = 0.0;
  };

  const std::vector<double>& eps() const { return eps_; }
  const std::vector<double>& integrals() const { return integral_; }
  double psi_norm_integral() const { return psi_norm_; }
  // Values at every sampling time.
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }

 private:
  std::vector<Snapshot> snapshots_;
  std::string name_;
  TestFunction psi_;
  std::vector<double> eps_;
  ModelParams p_;
  DerivedParams d_;
  std::vector<double> integral_;
  double psi_norm_ = 0.0;
};

// Quadratic (Burgers) functional with box size eps:
//   lattice: int alpha sum_x grad_n H((x + c_n s)/n) (box_x)^2 ds
//   field:   int alpha n^{-1} sum_z grad_n H(z/n) Y_s(iota_eps^{z/n})^2 ds
// `lattice_int` is the lattice form with the shift rounded up to an integer,
// which the change of variables z = x + ceil(c_n s) maps onto the field form.
class QuadraticObserver : public Observer {
 public:
  QuadraticObserver(std::string name, TestFunction h, double eps, const ModelParams& p);
  std::string name() const override { return name_; }
  void start(const ChainState&, double) override {}
  void step(const ChainState& s, double t, double dt_macro) override;
  void sample(const ChainState&, double) override {}

  double lattice() const { return lattice_; }
  double lattice_int() const { return lattice_int_; }
  double field() const { return field_; }

 private:
  std::string name_;
  TestFunction h_;
  double eps_;
  ModelParams p_;
  double lattice_ = 0.0, lattice_int_ = 0.0, field_ = 0.0;
};

struct SiteMoments {
  double t = 0.0;
  double mean = 0.0;
  double var = 0.0;
  double lag1_cov = 0.0;
};

// Spatial moments over the whole window at the sampling times.
class SiteMomentObserver : public Observer {
 public:
  explicit SiteMomentObserver(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  void start(const ChainState& s, double t) override { sample(s, t); }
  void step(const ChainState&, double, double) override {}
  void sample(const ChainState& s, double t) override;
  const std::vector<SiteMoments>& moments() const { return moments_; }

 private:
  std::string name_;
  std::vector<SiteMoments> moments_;
};

SiteMoments site_moments(const ChainState& s, double t);

}  // namespace bcl
