#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "diagnostics.hpp"
#include "propagator.hpp"

using namespace gbq;
using std::numbers::pi;

namespace {

Field fn(GridPtr g, std::function<double(double)> f) {
  return Field::from_function(g, [f](std::span<const double> x) { return cplx(f(x[0]), 0.0); });
}

Field zeros(GridPtr g) { return Field(g); }

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double omega(double k) { return k * std::sqrt(1 + k * k); }

const ModelParams kDefocusing{3.0, 1, Nonlinearity::power};

}  // namespace

TEST(ModelParams, Validation) {
  EXPECT_THROW((ModelParams{1.0, 1, Nonlinearity::power}.validate()), Error);
  EXPECT_THROW((ModelParams{3.0, 0, Nonlinearity::power}.validate()), Error);
  EXPECT_THROW((ModelParams{3.0, 1, Nonlinearity::quadratic}.validate()), Error);
  EXPECT_NO_THROW((ModelParams{2.0, 1, Nonlinearity::quadratic}.validate()));
  EXPECT_EQ(parse_nonlinearity("linear"), Nonlinearity::none);
  EXPECT_THROW(parse_nonlinearity("cubic"), Error);
}

TEST(Transformation, CosineHasNoImaginaryPart) {
  auto g = make_cubic_grid(1, 32, 2 * pi);
  State s = to_v(fn(g, [](double x) { return std::cos(x); }), zeros(g), kDefocusing);
  EXPECT_EQ(s.t, 0.0);
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    EXPECT_NEAR(s.v[i].real(), std::cos(g->coordinate(0, i)), 1e-14);
    EXPECT_NEAR(s.v[i].imag(), 0.0, 1e-14);
  }
}

TEST(Transformation, SineVelocity) {
  auto g = make_cubic_grid(1, 32, 2 * pi);
  State s = to_v(zeros(g), fn(g, [](double x) { return std::sin(x); }), kDefocusing);
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    EXPECT_NEAR(s.v[i].real(), 0.0, 1e-14);
    EXPECT_NEAR(s.v[i].imag(), std::sin(g->coordinate(0, i)) / std::sqrt(2.0), 1e-14);
  }
}

TEST(Transformation, RoundTrip) {
  auto g = make_cubic_grid(2, 32, 10.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<double> a(g->size()), b(g->size());
  for (auto& x : a) x = nd(rng);
  for (auto& x : b) x = nd(rng);
  Field u0 = Field::from_real(g, a);
  Field u1 = subtract_mean(Field::from_real(g, b));
  Components c = from_v(to_v(u0, u1, kDefocusing));
  EXPECT_LT(max_diff(c.u, u0), 1e-12);
  EXPECT_LT(max_diff(c.ut, u1), 1e-11);
}

TEST(Transformation, NonzeroMeanVelocityRejected) {
  auto g = make_cubic_grid(1, 32, 2 * pi);
  try {
    to_v(zeros(g), fn(g, [](double x) { return 1.0 + std::sin(x); }), kDefocusing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ill_defined);
  }
}

TEST(LinearFlow, SingleMode) {
  auto g = make_cubic_grid(1, 64, 2 * pi);
  for (double k : {1.0, 3.0, 7.0}) {
    const double t = 1.0;
    Components c = linear_flow(fn(g, [k](double x) { return std::cos(k * x); }), zeros(g), t);
    Field expect = fn(g, [=](double x) { return std::cos(t * omega(k)) * std::cos(k * x); });
    EXPECT_LT(max_diff(c.u, expect), 1e-12);
  }
}

TEST(LinearFlow, IdentityAtZero) {
  auto g = make_cubic_grid(1, 32, 2 * pi);
  Field u1 = fn(g, [](double x) { return std::sin(2 * x) + 0.3 * std::cos(5 * x); });
  Components c = linear_flow(zeros(g), u1, 0.0);
  EXPECT_LT(c.u.max_abs(), 1e-14);
  EXPECT_LT(max_diff(c.ut, u1), 1e-13);
}

TEST(LinearFlow, Reversible) {
  auto g = make_cubic_grid(1, 128, 20.0);
  Field u0 = fn(g, [](double x) { return std::exp(-x * x); });
  Field u1 = fn(g, [](double x) { return -2 * x * std::exp(-x * x); });
  Components a = linear_flow(u0, u1, 2.5);
  Components b = linear_flow(a.u, subtract_mean(a.ut), -2.5);
  EXPECT_LT(max_diff(b.u, u0), 1e-12);
  EXPECT_LT(max_diff(b.ut, u1), 1e-11);
}

TEST(LinearFlow, LinearEnergyInvariant) {
  auto g = make_cubic_grid(1, 128, 20.0);
  const ModelParams lin{3.0, 1, Nonlinearity::none};
  State s = to_v(fn(g, [](double x) { return std::exp(-x * x); }), zeros(g), lin);
  const double e0 = energy(s);
  State s1{3.0, free_propagate(s.v, 3.0), lin};
  EXPECT_NEAR(energy(s1), e0, 1e-12 * e0);
}

TEST(NonlinearTerm, Examples) {
  auto g = make_cubic_grid(1, 32, 2 * pi);
  EXPECT_LT(nonlinear_term(to_v(zeros(g), zeros(g), kDefocusing)).max_abs(), 1e-15);
  Field c = fn(g, [](double) { return 0.7; });
  EXPECT_LT(nonlinear_term(to_v(c, zeros(g), kDefocusing)).max_abs(), 1e-14);
  // cos^3 = 3/4 cos x + 1/4 cos 3x; M scales k=1 by 1/sqrt2 and k=3 by 3/sqrt10.
  Field n = nonlinear_term(to_v(fn(g, [](double x) { return std::cos(x); }), zeros(g), kDefocusing));
  Field expect = fn(g, [](double x) { return 0.75 / std::sqrt(2.0) * std::cos(x) + 0.25 * 3.0 / std::sqrt(10.0) * std::cos(3 * x); });
  EXPECT_LT(max_diff(n, expect), 1e-14);
  const ModelParams foc{3.0, -1, Nonlinearity::power};
  Field nf = nonlinear_term(to_v(fn(g, [](double x) { return std::cos(x); }), zeros(g), foc));
  EXPECT_LT(max_diff(nf, -1.0 * expect), 1e-14);
}

TEST(NonlinearTerm, QuadraticMode) {
  // -cos^2 x = -1/2 - 1/2 cos 2x; M kills the mean and scales k=2 by 2/sqrt5.
  auto g = make_cubic_grid(1, 32, 2 * pi);
  const ModelParams quad{2.0, 1, Nonlinearity::quadratic};
  Field n = nonlinear_term(to_v(fn(g, [](double x) { return std::cos(x); }), zeros(g), quad));
  Field expect = fn(g, [](double x) { return -0.5 * 2.0 / std::sqrt(5.0) * std::cos(2 * x); });
  EXPECT_LT(max_diff(n, expect), 1e-14);
}

TEST(Step, ZeroStepIsIdentity) {
  auto g = make_cubic_grid(1, 32, 2 * pi);
  State s = to_v(fn(g, [](double x) { return 0.5 * std::cos(x); }), zeros(g), kDefocusing);
  State t = step(s, 0.0);
  EXPECT_EQ(max_diff(t.v, s.v), 0.0);
}

TEST(Step, LinearStepMatchesLinearFlow) {
  auto g = make_cubic_grid(1, 64, 2 * pi);
  const ModelParams lin{3.0, 1, Nonlinearity::none};
  Field u0 = fn(g, [](double x) { return std::cos(x) + 0.2 * std::sin(4 * x); });
  Field u1 = fn(g, [](double x) { return 0.1 * std::cos(2 * x); });
  State s = to_v(u0, u1, lin);
  State t = step(s, 0.37);
  Components lf = linear_flow(u0, u1, 0.37);
  Components st = from_v(t);
  EXPECT_LT(max_diff(st.u, lf.u), 1e-14);
  EXPECT_LT(max_diff(st.ut, lf.ut), 1e-13);
}

TEST(Evolve, ZeroDataStaysZero) {
  auto g = make_cubic_grid(1, 64, 2 * pi);
  State s = to_v(zeros(g), zeros(g), kDefocusing);
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.5;
  double maxabs = 0.0;
  RunOutcome out = evolve(s, cfg, [&](const State& st) {
    const DiagnosticsRecord r = compute_record(st);
    maxabs = std::max({maxabs, std::abs(r.energy), std::abs(r.h1_sq), std::abs(r.virial)});
  });
  EXPECT_EQ(out.status, RunStatus::completed);
  EXPECT_EQ(maxabs, 0.0);
}

TEST(Evolve, LinearEnergyDrift) {
  auto g = make_cubic_grid(1, 256, 2 * pi);
  const ModelParams lin{3.0, 1, Nonlinearity::none};
  State s = to_v(fn(g, [](double x) { return 0.5 * std::cos(x) + 0.3 * std::cos(2 * x); }), zeros(g), lin);
  const double e0 = energy(s);
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 10.0;
  RunOutcome out = evolve(s, cfg);
  EXPECT_EQ(out.status, RunStatus::completed);
  EXPECT_NEAR(out.final_state.t, 10.0, 1e-12);
  EXPECT_LE(std::abs(energy(out.final_state) - e0), 1e-10 * e0);
}

TEST(Evolve, ShortConservationAndMeans) {
  auto g = make_cubic_grid(1, 256, 2 * pi);
  State s = to_v(fn(g, [](double x) { return 0.5 * std::cos(x) + 0.3 * std::cos(2 * x) + 0.1; }),
                 fn(g, [](double x) { return 0.2 * std::sin(3 * x); }), kDefocusing);
  const DiagnosticsRecord r0 = compute_record(s);
  const cplx mean0 = to_spectral(s.v)[0];
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  RunOutcome out = evolve(s, cfg);
  const DiagnosticsRecord r1 = compute_record(out.final_state);
  EXPECT_LE(std::abs(r1.energy - r0.energy), 1e-6 * r0.energy);
  EXPECT_LE(std::abs(r1.momentum[0] - r0.momentum[0]), 1e-8);
  const cplx mean1 = to_spectral(out.final_state.v)[0];
  EXPECT_NEAR(mean1.real(), mean0.real(), 1e-10);
  EXPECT_NEAR(mean1.imag(), 0.0, 1e-10);
}

TEST(Evolve, FourthOrderSelfConvergence) {
  auto g = make_cubic_grid(1, 128, 2 * pi);
  State s = to_v(fn(g, [](double x) { return 0.5 * std::cos(x); }), zeros(g), kDefocusing);
  auto run = [&](double dt) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    return evolve(s, cfg).final_state.v;
  };
  const Field a = run(0.0125), b = run(0.00625), c = run(0.003125);
  const double ratio = norm(a - b, Norm::l2()) / norm(b - c, Norm::l2());
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Evolve, RunawayDetected) {
  auto g = make_cubic_grid(1, 256, 40.0);
  const ModelParams foc{3.0, -1, Nonlinearity::power};
  State s = to_v(fn(g, [](double x) { return 3.0 / std::cosh(x); }), zeros(g), foc);
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 20.0;
  int samples = 0;
  RunOutcome out = evolve(s, cfg, [&](const State&) { ++samples; });
  EXPECT_EQ(out.status, RunStatus::blowup_detected);
  EXPECT_LT(out.final_state.t, 20.0);
  EXPECT_TRUE(out.final_state.v.all_finite());
  EXPECT_GT(samples, 1);
}

TEST(Evolve, RemainderStepLandsOnEndTime) {
  auto g = make_cubic_grid(1, 32, 2 * pi);
  State s = to_v(fn(g, [](double x) { return 0.1 * std::cos(x); }), zeros(g), kDefocusing);
  StepperConfig cfg;
  cfg.dt = 0.3;
  cfg.t_end = 1.0;
  std::vector<double> times;
  RunOutcome out = evolve(s, cfg, [&](const State& st) { times.push_back(st.t); });
  ASSERT_EQ(times.size(), 5u);
  EXPECT_NEAR(times.back(), 1.0, 1e-14);
  EXPECT_EQ(out.steps, 4);
}

TEST(WrapAround, FinitePositive) {
  auto g = make_cubic_grid(1, 256, 100.0);
  Field v = fn(g, [](double x) { return std::exp(-x * x); });
  const double t = wrap_around_time(v);
  EXPECT_GT(t, 0.0);
  EXPECT_LT(t, 50.0);
  EXPECT_TRUE(std::isinf(wrap_around_time(zeros(g))));
}

TEST(Checkpoint, BitExactRoundTrip) {
  const int pts[] = {16, 8};
  const double side[] = {3.5, 2.25};
  auto g = make_grid(2, pts, side);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  State s;
  s.t = 1.25;
  s.params = {5.0, -1, Nonlinearity::power};
  s.v = Field(g);
  for (std::size_t i = 0; i < g->size(); ++i) s.v[i] = cplx(nd(rng), nd(rng));
  const auto bytes = encode_checkpoint(s);
  EXPECT_EQ(bytes.size(), 4 + 4 + 8 + 16 + 8 + 8 + 1 + 1 + 16 * g->size());
  EXPECT_EQ(bytes[0], 'G');
  EXPECT_EQ(bytes[4], 2);  // little-endian dim
  State r = decode_checkpoint(bytes);
  EXPECT_EQ(r.t, s.t);
  EXPECT_EQ(r.params.alpha, 5.0);
  EXPECT_EQ(r.params.beta, -1);
  EXPECT_TRUE(r.grid().same_shape(s.grid()));
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(r.v[i], s.v[i]);
  EXPECT_EQ(encode_checkpoint(r), bytes);

  const std::string path = ::testing::TempDir() + "gbq_ckpt_test.bin";
  write_checkpoint(path, s);
  EXPECT_EQ(encode_checkpoint(read_checkpoint(path)), bytes);
  std::remove(path.c_str());
}

TEST(Checkpoint, CorruptInputRejected) {
  auto g = make_cubic_grid(1, 8, 1.0);
  State s{0.0, Field(g), kDefocusing};
  auto bytes = encode_checkpoint(s);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode_checkpoint(truncated), Error);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), Error);
}
