#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace isslab {

enum class Mode {
  kOpenLoop,
  kStateFeedback,
  kOutputFeedback,
  kTargetDirect,
  kErrorDirect,
  kObserverTargetDirect,
};

std::string_view mode_name(Mode mode);
/// Accepts the names returned by mode_name, case-insensitively.
Mode parse_mode(std::string_view text);

/// Reaction coefficient lambda(t): the reference piecewise profile
/// 1.2 pi^2 (sin^2 5t + 1) on [0,1], 1.2 pi^2 (sin^2 5t + e^{-t} - e^{-1} + 1)
/// afterwards, or a constant.
struct LambdaSpec {
  enum class Kind { kReference, kConstant };
  Kind kind = Kind::kReference;
  double value = 0.0;

  double operator()(double t) const;
};

/// Initial profile on [0, 1].
enum class Profile {
  kZero,
  /// -(1/6)(5x - 1/4)(2 - x)(3x^2 - 1).
  kReference,
  /// sin(pi x).
  kSine,
};

std::string_view profile_name(Profile p);
Profile parse_profile(std::string_view text);
double profile_value(Profile p, double x);
double profile_derivative(Profile p, double x);

/// Disturbance amplitudes of the reference family
///   f  = (A/6) sin(60t + x),        d0 = (A0/5)(sqrt(t) e^{-t} + 2 sin 25t),
///   d1 = (2 A1/5) sin 25t,          dm = (A2/44) sin 40t.
struct Amplitudes {
  double a = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  /// Sweep convention: A = 2 for any nonzero scale, A0 = A1 = A2 = scale.
  static Amplitudes from_scale(double scale);
};

struct Scenario {
  std::string preset = "custom";
  Mode mode = Mode::kStateFeedback;
  double q = 1.0;
  double c0 = 0.0;  // filled by the constructor with 13 pi^2 / 5
  double p0 = 0.0;  // 6 pi^2 / 5
  LambdaSpec lambda;
  std::size_t n = 201;
  double dt = 2.5e-4;
  double t_end = 4.0;
  Profile u0 = Profile::kReference;
  Profile u_hat0 = Profile::kZero;
  Amplitudes amp;
  /// Store every k-th step in traces (the final step is always stored).
  std::size_t output_stride = 40;

  Scenario();

  double f_time_sin(double t) const;  // (A/6) sin 60t
  double f_time_cos(double t) const;  // (A/6) cos 60t
  /// f(x,t) = (A/6)(sin 60t cos x + cos 60t sin x).
  double f(double x, double t) const;
  double d0(double t) const;
  double d1(double t) const;
  double dm(double t) const;

  std::size_t steps() const;
  /// max of lambda sampled on [0, t_end] at step dt.
  double sup_lambda() const;
  /// c0 - sup lambda.
  double underline_c() const;

  bool needs_observer() const;
};

/// Reference presets: paper_fig1, paper_fig2a..d, paper_fig3a..d,
/// paper_fig4a..c, paper_fig5a..d. The "d" presets are the amplitude-sweep
/// bases (scale 0); reproduce-figs expands them into families.
std::vector<std::string> preset_names();
Scenario make_preset(std::string_view name);

/// Applies one key=value setting; throws ConfigError on unknown keys or
/// malformed values. Setting `preset` resets every other field.
void apply_setting(Scenario& s, std::string_view key, std::string_view value);

/// Parses key=value lines ('#' starts a comment). A `preset` line, if any,
/// is applied first regardless of its position.
Scenario parse_config(std::istream& in, const std::string& origin = "config");
Scenario load_config(const std::string& path);

/// Throws ConfigError when the scenario cannot be simulated: nonpositive
/// dt, t_end, q, c0; n < 5; c0 <= sup lambda; invalid p0 for observer modes.
void validate(const Scenario& s);

/// Every resolved parameter as key=value lines, in a fixed order.
void describe(const Scenario& s, std::ostream& out);

}  // namespace isslab
