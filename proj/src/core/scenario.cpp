#include "isslab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

#include "isslab/error.hpp"
#include "isslab/gains.hpp"
#include "isslab/numfmt.hpp"

namespace isslab {
namespace {

constexpr double kPi = std::numbers::pi;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("invalid number for '" + std::string(key) + "': '" +
                      std::string(text) + "'");
  }
  return v;
}

std::size_t parse_count(std::string_view key, std::string_view text) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid count for '" + std::string(key) + "': '" +
                      std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kOpenLoop: return "OpenLoop";
    case Mode::kStateFeedback: return "StateFeedback";
    case Mode::kOutputFeedback: return "OutputFeedback";
    case Mode::kTargetDirect: return "TargetDirect";
    case Mode::kErrorDirect: return "ErrorDirect";
    case Mode::kObserverTargetDirect: return "ObserverTargetDirect";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  const std::string key = lower(trim(text));
  for (Mode m : {Mode::kOpenLoop, Mode::kStateFeedback, Mode::kOutputFeedback,
                 Mode::kTargetDirect, Mode::kErrorDirect,
                 Mode::kObserverTargetDirect}) {
    if (lower(mode_name(m)) == key) return m;
  }
  throw ConfigError("unknown mode '" + std::string(text) + "'");
}

double LambdaSpec::operator()(double t) const {
  if (kind == Kind::kConstant) return value;
  const double s = std::sin(5.0 * t);
  double base = s * s + 1.0;
  if (t > 1.0) base += std::exp(-t) - std::exp(-1.0);
  return 1.2 * kPi * kPi * base;
}

std::string_view profile_name(Profile p) {
  switch (p) {
    case Profile::kZero: return "zero";
    case Profile::kReference: return "reference";
    case Profile::kSine: return "sine";
  }
  return "?";
}

Profile parse_profile(std::string_view text) {
  const std::string key = lower(trim(text));
  if (key == "zero") return Profile::kZero;
  if (key == "reference") return Profile::kReference;
  if (key == "sine") return Profile::kSine;
  throw ConfigError("unknown initial profile '" + std::string(text) +
                    "' (expected zero, reference or sine)");
}

double profile_value(Profile p, double x) {
  switch (p) {
    case Profile::kZero: return 0.0;
    case Profile::kReference:
      return -(5.0 * x - 0.25) * (2.0 - x) * (3.0 * x * x - 1.0) / 6.0;
    case Profile::kSine: return std::sin(kPi * x);
  }
  return 0.0;
}

double profile_derivative(Profile p, double x) {
  switch (p) {
    case Profile::kZero: return 0.0;
    case Profile::kReference: {
      const double a = 5.0 * x - 0.25, b = 2.0 - x, c = 3.0 * x * x - 1.0;
      return -(5.0 * b * c - a * c + a * b * 6.0 * x) / 6.0;
    }
    case Profile::kSine: return kPi * std::cos(kPi * x);
  }
  return 0.0;
}

Amplitudes Amplitudes::from_scale(double scale) {
  return {scale != 0.0 ? 2.0 : 0.0, scale, scale, scale};
}

Scenario::Scenario() : c0(13.0 * kPi * kPi / 5.0), p0(6.0 * kPi * kPi / 5.0) {}

double Scenario::f_time_sin(double t) const { return amp.a / 6.0 * std::sin(60.0 * t); }
double Scenario::f_time_cos(double t) const { return amp.a / 6.0 * std::cos(60.0 * t); }

double Scenario::f(double x, double t) const {
  return f_time_sin(t) * std::cos(x) + f_time_cos(t) * std::sin(x);
}

double Scenario::d0(double t) const {
  return amp.a0 / 5.0 * (std::sqrt(t) * std::exp(-t) + 2.0 * std::sin(25.0 * t));
}

double Scenario::d1(double t) const { return 2.0 * amp.a1 / 5.0 * std::sin(25.0 * t); }

double Scenario::dm(double t) const { return amp.a2 / 44.0 * std::sin(40.0 * t); }

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

double Scenario::sup_lambda() const {
  double best = lambda(0.0);
  const std::size_t count = steps();
  for (std::size_t k = 1; k <= count; ++k) {
    best = std::max(best, lambda(static_cast<double>(k) * dt));
  }
  return best;
}

double Scenario::underline_c() const { return c0 - sup_lambda(); }

bool Scenario::needs_observer() const {
  return mode == Mode::kOutputFeedback || mode == Mode::kErrorDirect ||
         mode == Mode::kObserverTargetDirect;
}

std::vector<std::string> preset_names() {
  return {"paper_fig1",  "paper_fig2a", "paper_fig2b", "paper_fig2c",
          "paper_fig2d", "paper_fig3a", "paper_fig3b", "paper_fig3c",
          "paper_fig3d", "paper_fig4a", "paper_fig4b", "paper_fig4c",
          "paper_fig5a", "paper_fig5b", "paper_fig5c", "paper_fig5d"};
}

Scenario make_preset(std::string_view name) {
  Scenario s;
  s.preset = std::string(name);
  if (name == "paper_fig1") {
    s.mode = Mode::kOpenLoop;
    s.t_end = 1.0;
    return s;
  }
  if (name.size() != 11 || name.substr(0, 9) != "paper_fig") {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  const char figure = name[9];
  const char panel = name[10];
  const std::string_view panels = figure == '4' ? "abc" : "abcd";
  if (panels.find(panel) == std::string_view::npos) {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  switch (figure) {
    case '2': s.mode = Mode::kStateFeedback; break;
    case '3': s.mode = Mode::kErrorDirect; break;
    case '4':
    case '5': s.mode = Mode::kOutputFeedback; break;
    default: throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  const double scale = panel == 'b' ? 1.0 : panel == 'c' ? 3.0 : 0.0;
  s.amp = Amplitudes::from_scale(scale);
  // The state-feedback loop has no measurement channel.
  if (figure == '2') s.amp.a2 = 0.0;
  return s;
}

void apply_setting(Scenario& s, std::string_view key_in, std::string_view value) {
  const std::string key = lower(trim(key_in));
  value = trim(value);
  if (key == "preset") {
    s = make_preset(value);
  } else if (key == "mode") {
    s.mode = parse_mode(value);
  } else if (key == "q") {
    s.q = parse_real(key, value);
  } else if (key == "c0") {
    s.c0 = parse_real(key, value);
  } else if (key == "p0") {
    s.p0 = parse_real(key, value);
  } else if (key == "lambda") {
    if (lower(value) == "reference") {
      s.lambda = LambdaSpec{};
    } else {
      s.lambda = {LambdaSpec::Kind::kConstant, parse_real(key, value)};
    }
  } else if (key == "n") {
    s.n = parse_count(key, value);
  } else if (key == "dt") {
    s.dt = parse_real(key, value);
  } else if (key == "t_end") {
    s.t_end = parse_real(key, value);
  } else if (key == "u0") {
    s.u0 = parse_profile(value);
  } else if (key == "u_hat0") {
    s.u_hat0 = parse_profile(value);
  } else if (key == "a") {
    s.amp.a = parse_real(key, value);
  } else if (key == "a0") {
    s.amp.a0 = parse_real(key, value);
  } else if (key == "a1") {
    s.amp.a1 = parse_real(key, value);
  } else if (key == "a2") {
    s.amp.a2 = parse_real(key, value);
  } else if (key == "scale") {
    s.amp = Amplitudes::from_scale(parse_real(key, value));
  } else if (key == "output_stride") {
    s.output_stride = parse_count(key, value);
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

Scenario parse_config(std::istream& in, const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> settings;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected key=value");
    }
    settings.emplace_back(std::string(trim(view.substr(0, eq))),
                          std::string(trim(view.substr(eq + 1))));
  }
  Scenario s;
  auto apply = [&](const std::pair<std::string, std::string>& kv) {
    try {
      apply_setting(s, kv.first, kv.second);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ": " + e.what());
    }
  };
  for (const auto& kv : settings) {
    if (lower(kv.first) == "preset") apply(kv);
  }
  for (const auto& kv : settings) {
    if (lower(kv.first) != "preset") apply(kv);
  }
  return s;
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
  if (!(s.q > 0.0)) fail("q must be positive");
  if (!(s.c0 > 0.0)) fail("c0 must be positive");
  if (s.n < 5) fail("n must be at least 5");
  if (!(s.dt > 0.0)) fail("dt must be positive");
  if (!(s.t_end > 0.0)) fail("t_end must be positive");
  if (s.steps() == 0) fail("t_end must cover at least one step");
  if (std::abs(static_cast<double>(s.steps()) * s.dt - s.t_end) > 1e-9 * s.t_end) {
    fail("t_end must be a whole number of steps");
  }
  if (s.output_stride == 0) fail("output_stride must be at least 1");
  if (!(s.underline_c() > 0.0)) {
    fail("c0 = " + format_double(s.c0) + " does not exceed sup lambda = " +
         format_double(s.sup_lambda()));
  }
  if (s.needs_observer()) {
    const P0Check check = validate_p0(s.p0, s.c0, s.q);
    if (!check.valid) {
      fail("p0 must exceed c0/2 - q (margin " + format_double(check.margin) + ")");
    }
  }
}

void describe(const Scenario& s, std::ostream& out) {
  out << "preset=" << s.preset << '\n'
      << "mode=" << mode_name(s.mode) << '\n'
      << "q=" << format_double(s.q) << '\n'
      << "c0=" << format_double(s.c0) << '\n'
      << "p0=" << format_double(s.p0) << '\n'
      << "lambda="
      << (s.lambda.kind == LambdaSpec::Kind::kReference ? std::string("reference")
                                                        : format_double(s.lambda.value))
      << '\n'
      << "n=" << s.n << '\n'
      << "dt=" << format_double(s.dt) << '\n'
      << "t_end=" << format_double(s.t_end) << '\n'
      << "u0=" << profile_name(s.u0) << '\n'
      << "u_hat0=" << profile_name(s.u_hat0) << '\n'
      << "a=" << format_double(s.amp.a) << '\n'
      << "a0=" << format_double(s.amp.a0) << '\n'
      << "a1=" << format_double(s.amp.a1) << '\n'
      << "a2=" << format_double(s.amp.a2) << '\n'
      << "output_stride=" << s.output_stride << '\n';
}

}  // namespace isslab
