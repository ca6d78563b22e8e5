#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "run_config.hpp"

using namespace gbq;

namespace {

const char* kSample = R"(
# focusing cubic, scaled ground state
[model]
alpha = 3
beta = -1

[grid]
dim = 1
points = 1024
box = 80

[stepper]
dt = 0.01
t_end = 2.5
sample_every = 10
dealias = true

[initial]
profile = ground_state
amplitude = 0.5   # lambda
mean_subtract = false

[diagnostics]
morawetz_R = 5, 10

[output]
csv = run.csv

[run]
seed = 17
)";

template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ConfigEntries, SectionsCommentsAndLines) {
  const auto e = parse_entries("[a]\nx = 1 # c\n\n[b]\ny=  two words \n");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].section, "a");
  EXPECT_EQ(e[0].value, "1");
  EXPECT_EQ(e[1].key, "y");
  EXPECT_EQ(e[1].value, "two words");
  EXPECT_EQ(e[1].line, 5);
}

TEST(ConfigEntries, SyntaxErrorsNameTheLine) {
  EXPECT_NE(error_of([] { parse_entries("[a]\nno equals sign\n"); }).find("line 2"), std::string::npos);
  EXPECT_NE(error_of([] { parse_entries("x = 1\n"); }).find("line 1"), std::string::npos);
  EXPECT_NE(error_of([] { parse_entries("[a\n"); }).find("line 1"), std::string::npos);
}

TEST(RunConfigParse, Fields) {
  const RunConfig c = parse_run_config(kSample);
  EXPECT_DOUBLE_EQ(c.model.alpha, 3.0);
  EXPECT_DOUBLE_EQ(c.model.beta, -1.0);
  EXPECT_EQ(c.points, std::vector<int>{1024});
  EXPECT_DOUBLE_EQ(c.stepper.t_end, 2.5);
  EXPECT_EQ(c.init.profile, Profile::ground_state);
  EXPECT_DOUBLE_EQ(c.init.amplitude, 0.5);
  EXPECT_EQ(c.morawetz_R, (std::vector<double>{5, 10}));
  EXPECT_EQ(c.csv_path, "run.csv");
  EXPECT_EQ(c.init.seed, 17u);
  EXPECT_EQ(c.make_grid()->size(), 1024u);
}

TEST(RunConfigParse, ErrorsNameLineAndField) {
  const std::string bad_value = error_of([] { parse_run_config("[model]\nalpha = three\n"); });
  EXPECT_NE(bad_value.find("line 2"), std::string::npos);
  EXPECT_NE(bad_value.find("model.alpha"), std::string::npos);

  const std::string unknown = error_of([] { parse_run_config("[stepper]\ndt = 0.1\nspeed = 2\n"); });
  EXPECT_NE(unknown.find("line 3"), std::string::npos);
  EXPECT_NE(unknown.find("stepper.speed"), std::string::npos);

  const std::string invalid = error_of([] { parse_run_config("[stepper]\ndt = -1\n"); });
  EXPECT_NE(invalid.find("field stepper"), std::string::npos);
  EXPECT_NE(invalid.find("dt"), std::string::npos);

  try {
    parse_run_config("[model]\nalpha = 0.5\n");
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

TEST(RunConfigSerialize, RoundTripIsIdempotent) {
  const std::string once = serialize(parse_run_config(kSample));
  const std::string twice = serialize(parse_run_config(once));
  EXPECT_EQ(once, twice);
  const std::string dflt = serialize(parse_run_config(""));
  EXPECT_EQ(dflt, serialize(parse_run_config(dflt)));
}

TEST(RunConfigSerialize, PreservesDoublesExactly) {
  RunConfig c = parse_run_config(kSample);
  set_config_value(c, "stepper.dt", "0.1");
  set_config_value(c, "initial.amplitude", "0.30000000000000004");
  const RunConfig back = parse_run_config(serialize(c));
  EXPECT_EQ(back.stepper.dt, 0.1);
  EXPECT_EQ(back.init.amplitude, 0.30000000000000004);
}

TEST(RunConfigSet, DottedKeys) {
  RunConfig c;
  set_config_value(c, "grid.box", "10, 20");
  set_config_value(c, "grid.dim", "2");
  set_config_value(c, "grid.points", "32");
  EXPECT_EQ(c.box, (std::vector<double>{10, 20}));
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(set_config_value(c, "nosuch.key", "1"), Error);
  EXPECT_THROW(set_config_value(c, "grid", "1"), Error);
}

TEST(SweepParse, ListsAndDefaults) {
  const SweepConfig s = parse_sweep_config(
      "[grid]\npoints = 512\nbox = 40\n[sweep]\namplitude = 0.5, 1.5\nbeta = -1, 1\n[output]\ncsv = out.csv\n");
  EXPECT_EQ(s.spec.points, 512);
  EXPECT_EQ(s.spec.amplitudes, (std::vector<double>{0.5, 1.5}));
  EXPECT_EQ(s.spec.betas, (std::vector<int>{-1, 1}));
  EXPECT_EQ(s.spec.alphas, std::vector<double>{3});
  ASSERT_EQ(s.spec.profiles.size(), 1u);
  EXPECT_EQ(s.spec.profiles[0], Profile::ground_state);
  EXPECT_FALSE(s.spec.confirm);
  EXPECT_EQ(s.csv_path, "out.csv");
}

TEST(SweepParse, EmptyListGivesNoCells) {
  const SweepConfig s = parse_sweep_config("[sweep]\namplitude =\n");
  EXPECT_TRUE(s.spec.amplitudes.empty());
  EXPECT_NE(error_of([] { parse_sweep_config("[sweep]\nalpha = 3, x\n"); }).find("line 2"), std::string::npos);
}

TEST(TextFiles, RoundTripAndMissing) {
  const std::string path = testing::TempDir() + "gbq_text_file.txt";
  write_text_file(path, "a\nb\n");
  EXPECT_EQ(read_text_file(path), "a\nb\n");
  std::remove(path.c_str());
  try {
    read_text_file(path);
    FAIL() << "expected io error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
}
