#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "diagnostics.hpp"
#include "ground_state.hpp"

using namespace gbq;
using std::numbers::pi;

namespace {

Field fn(GridPtr g, std::function<double(double)> f) {
  return Field::from_function(g, [f](std::span<const double> x) { return cplx(f(x[0]), 0.0); });
}

Field radial(GridPtr g, std::function<double(double)> f) {
  return Field::from_function(g, [f](std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return cplx(f(std::sqrt(r2)), 0.0);
  });
}

const ModelParams kDef{3.0, 1, Nonlinearity::power};
const ModelParams kFoc{3.0, -1, Nonlinearity::power};

}  // namespace

TEST(Energy, ZeroState) {
  auto g = make_cubic_grid(2, 16, 5.0);
  EXPECT_EQ(energy(to_v(Field(g), Field(g), kDef)), 0.0);
}

TEST(Energy, CosineHandQuadrature) {
  // 1/2 (pi + pi) + (1/4) int cos^4 = pi + 3 pi / 16.
  auto g = make_cubic_grid(1, 64, 2 * pi);
  State s = to_v(fn(g, [](double x) { return std::cos(x); }), Field(g), kDef);
  EXPECT_NEAR(energy(s), pi + 3 * pi / 16, 1e-12);
}

TEST(Energy, ScaledSech) {
  auto g = make_cubic_grid(1, 2048, 80.0);
  for (double lam : {0.5, 1.1, 1.2}) {
    State s = to_v(fn(g, [=](double x) { return lam * std::sqrt(2.0) / std::cosh(x); }), Field(g), kFoc);
    const double expect = 8.0 / 3.0 * lam * lam - 4.0 / 3.0 * std::pow(lam, 4);
    EXPECT_NEAR(energy(s), expect, 1e-5) << lam;
  }
  State s = to_v(fn(g, [](double x) { return 0.5 * std::sqrt(2.0) / std::cosh(x); }), Field(g), kFoc);
  EXPECT_NEAR(energy(s), 0.583333, 1e-5);
}

TEST(Energy, QuadraticPotential) {
  auto g = make_cubic_grid(1, 64, 2 * pi);
  const ModelParams quad{2.0, 1, Nonlinearity::quadratic};
  // int (1+cos)^2 = 3 pi, int sin^2 = pi, -1/3 int (1+cos)^3 = -5 pi / 3 on [-pi, pi).
  State s = to_v(fn(g, [](double x) { return 1.0 + std::cos(x); }), Field(g), quad);
  EXPECT_NEAR(energy(s), 0.5 * (3 * pi + pi) - 5 * pi / 3, 1e-12);
}

TEST(Momentum, Examples) {
  auto g = make_cubic_grid(1, 64, 2 * pi);
  State a = to_v(fn(g, [](double x) { return std::cos(x) + std::sin(3 * x); }), Field(g), kDef);
  EXPECT_NEAR(momentum(a)[0], 0.0, 1e-14);
  State b = to_v(fn(g, [](double x) { return std::exp(-x * x); }), fn(g, [](double x) { return std::cos(2 * x); }), kDef);
  EXPECT_NEAR(momentum(b)[0], 0.0, 1e-14);
  // P = sin x, grad W = -sin x.
  State c = to_v(fn(g, [](double x) { return std::cos(x); }), fn(g, [](double x) { return std::sin(x); }), kDef);
  EXPECT_NEAR(momentum(c)[0], -pi, 1e-12);
  auto g3 = make_cubic_grid(3, 8, 2 * pi);
  EXPECT_EQ(momentum(to_v(Field(g3), Field(g3), kDef)).size(), 3u);
}

TEST(StaticFunctionals, GroundStateAndZero) {
  GroundState gs = petviashvili(make_cubic_grid(1, 2048, 80.0), 3.0);
  const StaticFunctionals sf = static_functionals(gs.phi, 3.0);
  EXPECT_LE(std::abs(sf.R), 1e-6 * gs.h1_norm_sq);
  EXPECT_NEAR(sf.E, gs.eta, 1e-6);
  const StaticFunctionals z = static_functionals(Field(gs.phi.grid_ptr()), 3.0);
  EXPECT_EQ(z.E, 0.0);
  EXPECT_EQ(z.R, 0.0);
}

TEST(Virial, Examples) {
  auto g = make_cubic_grid(1, 64, 2 * pi);
  State s = to_v(fn(g, [](double x) { return std::cos(x); }), Field(g), kDef);
  const Virial v = virial(s);
  EXPECT_NEAR(v.phi, pi, 1e-12);
  EXPECT_NEAR(v.rate, 0.0, 1e-14);
  State m = to_v(fn(g, [](double x) { return std::cos(x); }), fn(g, [](double x) { return std::cos(x); }), kDef);
  EXPECT_NEAR(virial(m).rate, 2 * pi, 1e-12);
}

TEST(VirialSecond, Examples) {
  GroundState gs = petviashvili(make_cubic_grid(1, 2048, 80.0), 3.0);
  State s = to_v(gs.phi, Field(gs.phi.grid_ptr()), kFoc);
  EXPECT_NEAR(virial_second(s, energy(s)), 0.0, 1e-8);
  auto g = make_cubic_grid(1, 32, 2 * pi);
  State z = to_v(Field(g), Field(g), kFoc);
  EXPECT_EQ(virial_second(z, 0.0), 0.0);
  EXPECT_THROW(virial_second(to_v(Field(g), Field(g), kDef), 0.0), Error);
}

TEST(VirialSecond, MatchesFiniteDifferenceAlongRun) {
  auto g = make_cubic_grid(1, 512, 60.0);
  State s = to_v(subtract_mean(fn(g, [](double x) { return 0.8 * std::sqrt(2.0) / std::cosh(x); })), Field(g), kFoc);
  const double e0 = energy(s);
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.sample_every = 50;
  std::vector<double> t, phi, second;
  evolve(s, cfg, [&](const State& st) {
    t.push_back(st.t);
    phi.push_back(virial(st).phi);
    second.push_back(virial_second(st, e0));
  });
  const double h = t[1] - t[0];
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double fd = (phi[i + 1] - 2 * phi[i] + phi[i - 1]) / (h * h);
    EXPECT_NEAR(fd, second[i], 5.0 * h * h + 1e-6) << t[i];
  }
}

TEST(Identities, FocusingEnergySplitAndCauchySchwarz) {
  auto g = make_cubic_grid(1, 256, 40.0);
  State s = to_v(subtract_mean(fn(g, [](double x) { return std::exp(-x * x) * std::cos(2 * x); })),
                 fn(g, [](double x) { return -2 * x * std::exp(-x * x); }), kFoc);
  StepperConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 2.0;
  cfg.sample_every = 10;
  int n = 0;
  evolve(s, cfg, [&](const State& st) {
    const DiagnosticsRecord r = compute_record(st);
    EXPECT_NEAR(r.energy, r.static_E + 0.5 * r.hm1_ut, 1e-10 * std::abs(r.energy));
    EXPECT_LE(0.25 * r.virial_rate * r.virial_rate, r.virial * r.hm1_ut * (1 + 1e-12) + 1e-300);
    ++n;
  });
  EXPECT_GT(n, 5);
}

TEST(MorawetzWeight, ProfileShape) {
  auto g = make_cubic_grid(3, 16, 40.0);
  for (auto prof : {MorawetzProfile::d3, MorawetzProfile::dge4}) {
    const MorawetzWeight w = morawetz_weight(g, 4.0, prof);
    EXPECT_NEAR(w.gamma1, prof == MorawetzProfile::d3 ? 2.0 : 1.5, 1e-14);
    for (std::size_t i = 0; i < w.table_r.size(); ++i) {
      EXPECT_GE(w.table_da[i], -1e-10);
      EXPECT_GE(w.table_dda[i], -1e-10);
      if (w.table_r[i] < 0.5) EXPECT_EQ(w.table_a[i], w.table_r[i] * w.table_r[i]);
    }
    const RadialProfile p(w.gamma1);
    for (double r : {0.5, 1.0}) {
      EXPECT_NEAR(p.value(r - 1e-9), p.value(r + 1e-9), 1e-8);
      EXPECT_NEAR(p.d1(r - 1e-9), p.d1(r + 1e-9), 1e-8);
      EXPECT_NEAR(p.d2(r - 1e-9), p.d2(r + 1e-9), 1e-7);
    }
    EXPECT_NEAR(p.value(3.0), w.gamma1 * 3.0 + w.gamma2, 1e-14);
  }
}

TEST(MorawetzWeight, SampledValues) {
  auto g = make_cubic_grid(3, 32, 32.0);  // spacing 1, origin at index 16
  const double R = 4.0;
  const MorawetzWeight w = morawetz_weight(g, R, MorawetzProfile::d3);
  EXPECT_EQ(w.a[g->flatten({16, 16, 16})], 0.0);
  // |x| = 1 < R/2: a = |x|^2, grad a = 2x, lap a = 2d.
  const std::size_t i1 = g->flatten({17, 16, 16});
  EXPECT_NEAR(w.a[i1], 1.0, 1e-14);
  EXPECT_NEAR(w.grad[0][i1], 2.0, 1e-14);
  EXPECT_NEAR(w.grad[1][i1], 0.0, 1e-14);
  EXPECT_NEAR(w.lap[i1], 6.0, 1e-14);
  const std::size_t im = g->flatten({15, 17, 16});
  EXPECT_NEAR(w.grad[0][im], -2.0, 1e-14);
  EXPECT_NEAR(w.grad[1][im], 2.0, 1e-14);
  // |x| = 2R sits on the tail: a = R^2 (2 * 2 + gamma2), gradient slope 2R.
  const std::size_t i2 = g->flatten({24, 16, 16});
  EXPECT_NEAR(w.a[i2], R * R * (4.0 + w.gamma2), 1e-12);
  EXPECT_NEAR(w.grad[0][i2], 2.0 * R, 1e-12);
  EXPECT_THROW(morawetz_weight(g, 0.5, MorawetzProfile::d3), Error);
}

TEST(Morawetz, ZeroVelocityGivesZero) {
  auto g = make_cubic_grid(2, 32, 20.0);
  const MorawetzWeight w = morawetz_weight(g, 3.0, MorawetzProfile::d3);
  State s = to_v(radial(g, [](double r) { return std::exp(-r * r); }), Field(g), kDef);
  EXPECT_EQ(morawetz_quantity(s, w), 0.0);
}

TEST(Morawetz, QuadraticRegionHandValue) {
  // R larger than the box: a = x^2 everywhere. u = cos x, u_t = cos 2x gives
  // M = int x cos 2x sin x dx - 1/2 int cos 2x cos x dx = -2 pi / 3.
  auto g = make_cubic_grid(1, 4096, 2 * pi);
  const MorawetzWeight w = morawetz_weight(g, 100.0, MorawetzProfile::d3);
  State s = to_v(fn(g, [](double x) { return std::cos(x); }), fn(g, [](double x) { return std::cos(2 * x); }), kDef);
  EXPECT_NEAR(morawetz_quantity(s, w), -2 * pi / 3, 1e-5);
}

TEST(Theta, Examples) {
  EXPECT_NEAR(theta_exponent(3.0, 3), 10.0 / 21.0, 1e-15);
  EXPECT_NEAR(theta_exponent(2.0, 4), 9.0 / 16.0, 1e-15);
  EXPECT_NEAR(theta_exponent(7.0 / 3.0, 3), 10.0 / 21.0, 1e-15);
  EXPECT_THROW(theta_exponent(3.0, 2), Error);
  for (int d = 3; d <= 8; ++d)
    for (double a = 1.01; a < (d + 2.0) / (d - 2.0); a += 0.05) {
      const double th = theta_exponent(a, d);
      EXPECT_GT(th, 0.0);
      EXPECT_LE(th, 1.0);
    }
}

TEST(SpacetimeIntegral, Basics) {
  std::vector<DiagnosticsRecord> rec(11);
  for (int i = 0; i <= 10; ++i) {
    rec[i].t = i * 0.5;
    rec[i].lp = 0.0;
  }
  EXPECT_EQ(spacetime_integral(rec, 0.0, 5.0, 3.0), 0.0);
  for (auto& r : rec) r.lp = std::pow(2.0, 0.25);  // lp^4 = 2
  EXPECT_NEAR(spacetime_integral(rec, 0.0, 5.0, 3.0), 10.0, 1e-12);
  EXPECT_NEAR(spacetime_integral(rec, 0.25, 1.3, 3.0), 2.1, 1e-12);
  EXPECT_THROW(spacetime_integral(rec, 0.0, 6.0, 3.0), Error);
}

TEST(AdmissiblePairs, ScalingExact) {
  for (int d = 1; d <= 6; ++d)
    for (const auto& p : admissible_pairs(d)) EXPECT_EQ(p.scaling_defect(d).num, 0) << d;
  const auto p3 = admissible_pairs(3);
  ASSERT_EQ(p3.size(), 3u);
  EXPECT_EQ(p3[2].p(), 2.0);
  EXPECT_EQ(p3[2].q(), 6.0);
  const auto p2 = admissible_pairs(2);
  ASSERT_EQ(p2.size(), 2u);
  EXPECT_TRUE(std::isinf(p2[0].p()));
  EXPECT_EQ(p2[0].q(), 2.0);
  EXPECT_EQ(p2[1].p(), 4.0);
  EXPECT_EQ(p2[1].q(), 4.0);
}

TEST(Strichartz, ZeroAndLinearMode) {
  auto g = make_cubic_grid(1, 64, 2 * pi);
  StrichartzTrace zero{0.5, admissible_pairs(1)};
  for (int i = 0; i < 4; ++i) zero.add(Field(g), i);
  EXPECT_EQ(strichartz_norm(zero), 0.0);
  StrichartzTrace empty{0.0, admissible_pairs(1)};
  EXPECT_THROW(strichartz_norm(empty), Error);

  const double k = 3.0, s = 1.0;
  State st = to_v(fn(g, [=](double x) { return std::cos(k * x); }), Field(g), kDef);
  StrichartzTrace tr{s, {admissible_pairs(1)[0]}};
  for (int i = 0; i <= 8; ++i) {
    const double t = 0.25 * i;
    tr.add(free_propagate(st.v, t), t);
  }
  for (const auto& row : tr.xnorms) EXPECT_NEAR(row[0], std::sqrt(1 + k * k) * std::sqrt(pi), 1e-12);
  EXPECT_NEAR(strichartz_norm(tr), std::sqrt(1 + k * k) * std::sqrt(pi), 1e-12);
}

TEST(Scattering, LinearTraceAndIdenticalTimes) {
  auto g = make_cubic_grid(1, 256, 40.0);
  State st = to_v(fn(g, [](double x) { return std::exp(-x * x); }), Field(g), {3.0, 1, Nonlinearity::none});
  ProfileTrace tr;
  for (double t : {0.0, 1.0, 2.0, 4.0}) tr.emplace(t, free_propagate(st.v, t));
  EXPECT_LE(scattering_residual(tr, 1.0, 2.0), 1e-12);
  EXPECT_LE(scattering_residual(tr, 0.0, 4.0), 1e-12);
  EXPECT_EQ(scattering_residual(tr, 2.0, 2.0), 0.0);
  EXPECT_THROW(scattering_residual(tr, 0.0, 3.0), Error);
}

TEST(RadialSobolev, GaussianPeak) {
  auto g = make_cubic_grid(3, 64, 16.0);  // spacing 1/4 puts a sample at r = 1
  const RadialSobolev r = radial_sobolev_check(radial(g, [](double r) { return std::exp(-r * r / 2); }));
  EXPECT_NEAR(r.lhs, std::exp(-0.5), 1e-12);
}

TEST(RadialSobolev, ScalingInvariance) {
  // Widths chosen so that the peak of r^{1/2} u sits on an axis sample.
  auto g = make_cubic_grid(2, 256, 40.0);
  const double h = g->spacing(0);
  std::vector<double> ratios;
  for (int m : {6, 9, 12}) {
    const double lam = 2.0 * m * h;
    ratios.push_back(radial_sobolev_check(radial(g, [=](double r) { return std::exp(-r * r / (lam * lam)); })).ratio);
  }
  for (double q : ratios) EXPECT_NEAR(q, ratios[0], 1e-3 * ratios[0]) << q;
}

TEST(RadialSobolev, RandomRadialFieldsBounded) {
  auto g = make_cubic_grid(2, 64, 30.0);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(1.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double a1 = nd(rng), a2 = nd(rng), w1 = ud(rng), w2 = ud(rng), c = ud(rng);
    Field f = radial(g, [=](double r) {
      return a1 * std::exp(-r * r / (w1 * w1)) + a2 * std::exp(-std::pow(r - c, 2) / (w2 * w2));
    });
    worst = std::max(worst, radial_sobolev_check(f).ratio);
  }
  EXPECT_LT(worst, 1.0);
}

TEST(RadialSobolev, RejectsNonRadial) {
  auto g = make_cubic_grid(2, 32, 20.0);
  Field f = Field::from_function(g, [](std::span<const double> x) { return cplx(std::exp(-(x[0] - 1) * (x[0] - 1) - x[1] * x[1]), 0.0); });
  EXPECT_THROW(radial_sobolev_check(f), Error);
  EXPECT_THROW(radial_sobolev_check(fn(make_cubic_grid(1, 32, 20.0), [](double x) { return std::exp(-x * x); })), Error);
}

TEST(DecayFit, OneDimensionalRate) {
  auto g = make_cubic_grid(1, 4096, 1024.0);
  const DecayFit f = decay_rate_fit(g, {1.0, 1.0}, {10, 14, 20, 28, 40});
  EXPECT_NEAR(f.slope, -0.5, 0.1);
  EXPECT_GT(f.prefactor, 0.0);
  EXPECT_THROW(decay_rate_fit(g, {1.0, 1.0}, {10.0, 1e4}), Error);
}

TEST(Csv, HeaderAndFormatting) {
  EXPECT_EQ(csv_header(1), "t,energy,momentum_x,E_u,R_u,h1_sq,lp,virial,virial_rate,morawetz,hm1_ut");
  EXPECT_EQ(csv_header(3),
            "t,energy,momentum_x,momentum_y,momentum_z,E_u,R_u,h1_sq,lp,virial,virial_rate,morawetz,hm1_ut");
  DiagnosticsRecord r;
  r.momentum = {0.1};
  const std::string row = csv_row(r);
  EXPECT_NE(row.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(row.find(",nan,"), std::string::npos);
}

TEST(CommutatorRatios, ResolvedPairsIgnoreRefinement) {
  const auto coarse = commutator_ratios(make_cubic_grid(1, 128, 2.0 * std::numbers::pi), 10, 5, 8);
  const auto fine = commutator_ratios(make_cubic_grid(1, 256, 2.0 * std::numbers::pi), 10, 5, 8);
  ASSERT_EQ(coarse.size(), 10u);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    EXPECT_GT(coarse[i], 0.0);
    // The finer grid samples grad phi more densely, so its ratio can only drop.
    EXPECT_LE(fine[i], coarse[i] * (1 + 1e-12));
    EXPECT_NEAR(fine[i], coarse[i], 0.05 * coarse[i]);
  }
  EXPECT_THROW(commutator_ratios(make_cubic_grid(1, 32, 1.0), 1, 0, 8), Error);
}
