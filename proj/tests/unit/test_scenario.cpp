#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "isslab/error.hpp"
#include "isslab/scenario.hpp"

using namespace isslab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("defaults reproduce the reference constants") {
  const Scenario s;
  CHECK(s.c0 == doctest::Approx(13.0 * kPi * kPi / 5.0));
  CHECK(s.p0 == doctest::Approx(6.0 * kPi * kPi / 5.0));
  CHECK(s.steps() == 16000);
  CHECK(s.sup_lambda() == doctest::Approx(2.4 * kPi * kPi).epsilon(1e-6));
  CHECK(s.underline_c() == doctest::Approx(0.2 * kPi * kPi).epsilon(1e-5));
  CHECK_NOTHROW(validate(s));
}

TEST_CASE("reaction coefficient is the piecewise reference profile") {
  const LambdaSpec lambda;
  const double base = 1.2 * kPi * kPi;
  CHECK(lambda(0.0) == doctest::Approx(base));
  CHECK(lambda(0.5) == doctest::Approx(base * (std::pow(std::sin(2.5), 2) + 1.0)));
  CHECK(lambda(2.0) == doctest::Approx(
                           base * (std::pow(std::sin(10.0), 2) + std::exp(-2.0) - std::exp(-1.0) + 1.0)));
  CHECK(std::abs(lambda(1.0 - 1e-12) - lambda(1.0 + 1e-12)) < 1e-9);
  const LambdaSpec constant{LambdaSpec::Kind::kConstant, 3.5};
  CHECK(constant(7.0) == 3.5);
}

TEST_CASE("signals and profiles") {
  Scenario s;
  s.amp = {2.0, 1.0, 1.0, 1.0};
  CHECK(s.d0(0.0) == 0.0);
  CHECK(s.d0(1.0) == doctest::Approx(0.2 * (std::exp(-1.0) + 2.0 * std::sin(25.0))));
  CHECK(s.d1(0.3) == doctest::Approx(0.4 * std::sin(7.5)));
  CHECK(s.dm(0.3) == doctest::Approx(std::sin(12.0) / 44.0));
  CHECK(s.f(0.4, 0.2) == doctest::Approx(std::sin(12.0 + 0.4) / 3.0));
  CHECK(profile_value(Profile::kReference, 0.0) == doctest::Approx(-1.0 / 6.0 * -0.25 * 2.0 * -1.0));
  CHECK(profile_value(Profile::kSine, 0.5) == doctest::Approx(1.0));
  const double h = 1e-6;
  for (Profile p : {Profile::kReference, Profile::kSine}) {
    const double fd = (profile_value(p, 0.3 + h) - profile_value(p, 0.3 - h)) / (2 * h);
    CHECK(profile_derivative(p, 0.3) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK(parse_profile("SINE") == Profile::kSine);
  CHECK_THROWS_AS(parse_profile("cubic"), ConfigError);
}

TEST_CASE("modes parse case-insensitively") {
  for (Mode m : {Mode::kOpenLoop, Mode::kStateFeedback, Mode::kOutputFeedback,
                 Mode::kTargetDirect, Mode::kErrorDirect, Mode::kObserverTargetDirect}) {
    CHECK(parse_mode(mode_name(m)) == m);
  }
  CHECK(parse_mode("outputfeedback") == Mode::kOutputFeedback);
  CHECK_THROWS_AS(parse_mode("closed"), ConfigError);
}

TEST_CASE("presets") {
  CHECK(preset_names().size() == 16);
  const Scenario fig1 = make_preset("paper_fig1");
  CHECK(fig1.mode == Mode::kOpenLoop);
  CHECK(fig1.t_end == 1.0);
  const Scenario fig2b = make_preset("paper_fig2b");
  CHECK(fig2b.mode == Mode::kStateFeedback);
  CHECK(fig2b.amp.a == 2.0);
  CHECK(fig2b.amp.a0 == 1.0);
  CHECK(fig2b.amp.a2 == 0.0);
  const Scenario fig5c = make_preset("paper_fig5c");
  CHECK(fig5c.mode == Mode::kOutputFeedback);
  CHECK(fig5c.amp.a2 == 3.0);
  CHECK(make_preset("paper_fig3a").mode == Mode::kErrorDirect);
  CHECK(make_preset("paper_fig4a").amp.a == 0.0);
  for (const auto& name : preset_names()) CHECK_NOTHROW(validate(make_preset(name)));
  CHECK_THROWS_AS(make_preset("paper_fig4d"), ConfigError);
  CHECK_THROWS_AS(make_preset("nope"), ConfigError);
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "n = 101   # trailing comment\n"
      "mode=TargetDirect\n"
      "\n"
      "scale=3\n"
      "preset=paper_fig5a\n"
      "lambda=2.5\n");
  const Scenario s = parse_config(in);
  CHECK(s.preset == "paper_fig5a");
  CHECK(s.n == 101);
  CHECK(s.mode == Mode::kTargetDirect);
  CHECK(s.amp.a == 2.0);
  CHECK(s.amp.a1 == 3.0);
  CHECK(s.lambda(0.0) == 2.5);

  std::istringstream unknown("colour=blue\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::istringstream malformed("dt=fast\n");
  CHECK_THROWS_AS(parse_config(malformed), ConfigError);
  std::istringstream no_equals("n 101\n");
  CHECK_THROWS_AS(parse_config(no_equals), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/isslab.cfg"), ConfigError);
}

TEST_CASE("validation") {
  Scenario s;
  s.c0 = 20.0;  // below sup lambda = 2.4 pi^2
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = Scenario();
  s.dt = 0.3;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = Scenario();
  s.n = 3;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = Scenario();
  s.mode = Mode::kOutputFeedback;
  s.p0 = 0.0;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s.mode = Mode::kStateFeedback;
  CHECK_NOTHROW(validate(s));
}

TEST_CASE("describe round-trips through the parser") {
  Scenario s = make_preset("paper_fig4b");
  s.n = 101;
  s.dt = 5e-4;
  std::ostringstream out;
  describe(s, out);
  std::istringstream in(out.str());
  const Scenario back = parse_config(in);
  CHECK(back.mode == s.mode);
  CHECK(back.n == 101);
  CHECK(back.dt == s.dt);
  CHECK(back.amp.a2 == s.amp.a2);
  CHECK(back.c0 == s.c0);
}
