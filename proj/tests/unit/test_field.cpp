#include <doctest.h>

#include <cmath>
#include <vector>

#include "bcl/dynamics.hpp"
#include "bcl/field.hpp"
#include "bcl/stats.hpp"

using namespace bcl;

namespace {

ModelParams base(int n = 16) {
  ModelParams p;
  p.beta = 3;
  p.lambda = 2;
  p.n = n;
  return p;
}

}  // namespace

TEST_CASE("centered field vanishes on the flat state") {
  const ModelParams p = base();
  const ChainState s = constant_state(Window{-200, 400}, 1.0);
  for (const auto& id : {"s:hermite:2", "sdir:odd-gauss:3", "s0:flat-gauss:0"})
    CHECK(fluctuation_field(s, make_testfn(id), 0.0, p) == doctest::Approx(0.0));
}

TEST_CASE("single perturbation") {
  ModelParams p;
  p.beta = 1;
  p.lambda = 0;
  p.n = 4;
  ChainState s = constant_state(Window{-40, 80}, 1.0);
  s.at(0) = 2.0;
  CHECK(fluctuation_field(s, make_testfn("s:gauss:1"), 0.0, p) == doctest::Approx(0.5));
}

TEST_CASE("generator terms carrying alpha vanish at alpha = 0") {
  ModelParams p = base();
  p.alpha = 0;
  Rng rng(1);
  const ChainState s = sample_gibbs(p, make_window(p, 0.0), rng);
  const GeneratorTerms g = generator_action(s, make_testfn("sdir:odd-gauss:1"), 0.0, p);
  CHECK(g.nonlinear == 0.0);
  CHECK(g.laplacian_correction == 0.0);
  CHECK(g.frame_mismatch == 0.0);
  CHECK(g.laplacian != 0.0);
}

TEST_CASE("laplacian term vanishes on the flat state") {
  const ModelParams p = base();
  const ChainState s = constant_state(Window{-400, 801}, 1.0);
  CHECK(generator_action(s, make_testfn("s:hermite:3"), 0.0, p, false).laplacian ==
        doctest::Approx(0.0));
}

TEST_CASE("S_0 bath term obeys the fourth-order Taylor bound") {
  ModelParams p = base(32);
  p.delta = -2;
  const TestFunction h = make_testfn("s0:flat-gauss:0");
  double h4 = 0;
  for (int i = -4000; i <= 4000; ++i) h4 = std::max(h4, std::abs(h.d(i * 1e-3, 4)));
  Rng rng(2);
  for (int r = 0; r < 20; ++r) {
    const ChainState s = sample_gibbs(p, make_window(p, 0.0), rng);
    const GeneratorTerms g = generator_action(s, h, 0.0, p);
    const double xb = s.at(0);
    const double bound = std::pow(p.n, 1.5 - p.delta) * h4 * std::pow(p.n, -4.0) *
                         std::abs(p.lambda / xb - p.beta);
    CHECK(std::abs(g.bath) <= bound);
  }
}

TEST_CASE("QV integrand vanishes without exchange and bath") {
  ModelParams p = base();
  p.gamma = 0;
  Rng rng(3);
  const ChainState s = sample_gibbs(p, make_window(p, 0.0), rng);
  CHECK(qv_integrand(s, make_testfn("s:gauss:1"), 0.0, p, false) == 0.0);
}

TEST_CASE("frozen dynamics give a zero martingale") {
  ModelParams p = base();
  p.gamma = 0;
  p.alpha = 0;
  IntegratorConfig ic;
  ic.bath_enabled = false;
  ic.t_macro_max = 0.05;
  ic.samples = 5;
  Rng rng(4);
  FieldObserver obs("h", make_testfn("sdir:odd-gauss:1"), p, false);
  run(p, ic, {&obs}, rng);
  for (double m : dynkin_martingale(obs.records())) CHECK(m == doctest::Approx(0.0));
}

TEST_CASE("Dynkin martingale has mean zero") {
  const ModelParams p = base(16);
  IntegratorConfig ic;
  ic.t_macro_max = 0.1;
  ic.samples = 4;
  const int R = 24;
  std::vector<std::vector<double>> m(ic.samples + 1);
  for (int r = 0; r < R; ++r) {
    Rng rng(derive_seed(5, 0, r));
    FieldObserver obs("h", make_testfn("sdir:odd-gauss:1"), p);
    run(p, ic, {&obs}, rng);
    const auto mm = dynkin_martingale(obs.records());
    for (std::size_t k = 0; k < mm.size(); ++k) m[k].push_back(mm[k]);
  }
  for (std::size_t k = 1; k < m.size(); ++k) {
    const MeanSE s = mean_se(m[k]);
    CHECK(std::abs(s.mean) <= 3.5 * s.se);
  }
}

TEST_CASE("box averages") {
  const ModelParams p = base(32);
  const ChainState flat = constant_state(Window{-100, 200}, 1.0);
  CHECK(box_average(flat, 3, 0.25, p) == 0.0);
  Rng rng(6);
  const ChainState s = sample_gibbs(p, Window{-100, 200}, rng);
  ModelParams q = p;
  q.alpha = 0;  // no frame shift: the lattice box and the field pairing coincide
  for (std::int64_t z : {-7, 0, 12})
    CHECK(iota_field(s, double(z) / q.n, 0.25, 0.0, q) / std::sqrt(q.n) ==
          doctest::Approx(box_average(s, z, 0.25, q)).epsilon(1e-14));
  std::vector<double> sq;
  for (int r = 0; r < 4000; ++r) {
    const ChainState g = sample_gibbs(p, Window{0, 16}, rng);
    const double b = box_average(g, 0, 0.25, p);
    sq.push_back(b * b);
  }
  const MeanSE m = mean_se(sq);
  CHECK(std::abs(m.mean - (1.0 / 3) / 8) <= 3 * m.se);
  CHECK_THROWS(box_average(s, 0, 0.01, p));
}

TEST_CASE("Boltzmann-Gibbs functional is zero for psi = 0") {
  const ModelParams p = base(16);
  IntegratorConfig ic;
  ic.t_macro_max = 0.05;
  ic.samples = 2;
  Rng rng(7);
  BGObserver obs("bg", make_testfn("s:gauss:1").scaled(0.0), {0.25, 0.125}, p);
  run(p, ic, {&obs}, rng);
  for (const auto& snap : obs.snapshots())
    for (double v : snap.integrals) CHECK(v == 0.0);
}

TEST_CASE("observation records round-trip through JSON") {
  ObservationRecord r;
  r.t = 0.5;
  r.h_id = "s:gauss:1";
  r.y = 1.25;
  r.m = -0.5;
  r.qv = 2.0;
  r.terms.bath = 3.0;
  r.bath_site = -17;
  const ObservationRecord b = record_from_json(to_json(r));
  CHECK(b.t == r.t);
  CHECK(b.h_id == r.h_id);
  CHECK(b.terms.bath == 3.0);
  CHECK(b.bath_site == -17);
}
