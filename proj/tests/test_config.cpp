#include <string>

#include <gtest/gtest.h>

#include "mtfrac/config.hpp"

using namespace mtfrac;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, Command::Solve);
  } catch (const DomainError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalParses) {
  const auto c = parse_config_text("[orders]\nalphas = 0.5\nqs = 1\n[initial]\nshape = mode\nmode = 1\n", Command::Solve);
  EXPECT_EQ(c.alphas, std::vector<double>{0.5});
  EXPECT_EQ(c.initial.shape, "mode");
  const Problem p = c.make_problem();
  EXPECT_NEAR(p.initial_modal()(0), 1.0, 1e-12);
}

TEST(Config, OrdersMustDecrease) {
  EXPECT_NE(error_of("[orders]\nalphas = 0.3, 0.8\nqs = 1, 1\n").find("strictly decreasing"), std::string::npos);
}

TEST(Config, FirstWeightIsOne) {
  EXPECT_NE(error_of("[orders]\nalphas = 0.5\nqs = 2\n").find("q_1 must equal 1"), std::string::npos);
}

TEST(Config, UnknownKeysAndSections) {
  EXPECT_NE(error_of("[orders]\nalpha = 0.5\n").find("unknown key 'alpha'"), std::string::npos);
  EXPECT_NE(error_of("[solver]\nx = 1\n").find("unknown section"), std::string::npos);
  EXPECT_NE(error_of("[preset]\nname = thm99\n").find("unknown preset"), std::string::npos);
}

TEST(Config, IllTypedValues) {
  EXPECT_NE(error_of("[operator]\nn_interior = many\n").find("operator.n_interior"), std::string::npos);
  EXPECT_NE(error_of("[numerics]\nt_min = 1e-2x\n").find("numerics.t_min"), std::string::npos);
}

TEST(Config, ConstraintViolationsCaughtAtParse) {
  EXPECT_NE(error_of("[numerics]\nlambda = 0\n").find("lambda must be positive"), std::string::npos);
  EXPECT_NE(error_of("[operator]\ndiffusion = constant -1\n").find("diffusion must be positive"), std::string::npos);
  EXPECT_NE(error_of("[operator]\npotential = constant 0.5\n").find("potential must be <= 0"), std::string::npos);
  EXPECT_NE(error_of("[operator]\ndiffusion = sinusoidal 1 0.2\n").find("needs 3 parameters"), std::string::npos);
  EXPECT_NE(error_of("[initial]\nshape = mode\nmode = 0\n").find("mode must lie"), std::string::npos);
  EXPECT_NE(error_of("[mml]\nbetas = 0.5, 0.2\nz = 1\n").find("one entry per beta"), std::string::npos);
}

TEST(Config, PresetsValidateAndOverride) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset_config(name).validate()) << name;
  const auto c = parse_config_text("[preset]\nname = thm24\n[orders]\nalphas = 0.8, 0.4\nqs = 1, 2\n", Command::Asymptotics);
  EXPECT_EQ(c.preset, "thm24");
  EXPECT_EQ(c.alphas, (std::vector<double>{0.8, 0.4}));
  EXPECT_EQ(c.command, Command::Asymptotics);
}

TEST(Config, EchoRoundTrips) {
  auto c = preset_config("thm23");
  c.numerics.d_q = 0.1 + 0.2;  // not exactly representable as a short decimal
  const auto again = parse_config_text(config_echo(c), Command::Stability);
  EXPECT_EQ(config_echo(again), config_echo(c));
  EXPECT_EQ(again.numerics.d_q, c.numerics.d_q);
}

TEST(Config, TolProfileFastCoarsens) {
  auto c = preset_config("thm23");
  apply_tol_profile(c, TolProfile::Fast);
  EXPECT_LE(c.n_interior, 63);
  EXPECT_LT(c.numerics.levels, 7);
  EXPECT_THROW(parse_tol_profile("loose"), DomainError);
}
