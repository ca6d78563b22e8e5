#include "run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace gbq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(ErrorCode::parse, "empty list element");
    out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  if (t == "nan" || t == "inf" || t == "-inf") fail(ErrorCode::parse, "expected a finite number, got '" + t + "'");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    fail(ErrorCode::parse, "expected a number, got '" + t + "'");
  return v;
}

long long to_integer(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    fail(ErrorCode::parse, "expected an integer, got '" + t + "'");
  return v;
}

int to_int(const std::string& s) {
  const long long v = to_integer(s);
  if (v < -2147483647LL || v > 2147483647LL) fail(ErrorCode::parse, "integer out of range");
  return static_cast<int>(v);
}

std::uint64_t to_seed(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE)
    fail(ErrorCode::parse, "expected a nonnegative integer, got '" + t + "'");
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  fail(ErrorCode::parse, "expected true or false, got '" + t + "'");
}

template <class T, class Conv>
std::vector<T> to_list(const std::string& s, Conv conv) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) out.push_back(conv(item));
  return out;
}

MorawetzProfile to_morawetz_profile(const std::string& s) {
  const std::string t = trim(s);
  if (t == "d3") return MorawetzProfile::d3;
  if (t == "dge4") return MorawetzProfile::dge4;
  fail(ErrorCode::parse, "expected d3 or dge4, got '" + t + "'");
}

std::string fmt(double x) { return format_double(x); }

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += f(v[i]);
  }
  return out;
}

std::string located(const ConfigEntry& e, const std::string& what) {
  std::ostringstream os;
  os << "line " << e.line << ", field " << e.section << '.' << e.key << ": " << what;
  return os.str();
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& run_setters() {
  static const std::map<std::string, Setter> table = {
      {"model.alpha", [](RunConfig& c, const std::string& v) { c.model.alpha = to_double(v); }},
      {"model.beta", [](RunConfig& c, const std::string& v) { c.model.beta = to_int(v); }},
      {"model.nonlinearity", [](RunConfig& c, const std::string& v) { c.model.nonlinearity = parse_nonlinearity(trim(v)); }},
      {"grid.dim", [](RunConfig& c, const std::string& v) { c.dim = to_int(v); }},
      {"grid.points", [](RunConfig& c, const std::string& v) { c.points = to_list<int>(v, to_int); }},
      {"grid.box", [](RunConfig& c, const std::string& v) { c.box = to_list<double>(v, to_double); }},
      {"stepper.dt", [](RunConfig& c, const std::string& v) { c.stepper.dt = to_double(v); }},
      {"stepper.t_end", [](RunConfig& c, const std::string& v) { c.stepper.t_end = to_double(v); }},
      {"stepper.sample_every", [](RunConfig& c, const std::string& v) { c.stepper.sample_every = to_int(v); }},
      {"stepper.blowup_factor", [](RunConfig& c, const std::string& v) { c.stepper.blowup_h1_factor = to_double(v); }},
      {"stepper.dealias", [](RunConfig& c, const std::string& v) { c.stepper.dealias = to_bool(v); }},
      {"initial.profile", [](RunConfig& c, const std::string& v) {
         try {
           c.init.profile = parse_profile(trim(v));
         } catch (const Error& e) {
           fail(ErrorCode::parse, e.what());
         }
       }},
      {"initial.amplitude", [](RunConfig& c, const std::string& v) { c.init.amplitude = to_double(v); }},
      {"initial.width", [](RunConfig& c, const std::string& v) { c.init.width = to_double(v); }},
      {"initial.modes", [](RunConfig& c, const std::string& v) { c.init.modes = to_list<int>(v, to_int); }},
      {"initial.weights", [](RunConfig& c, const std::string& v) { c.init.weights = to_list<double>(v, to_double); }},
      {"initial.mean_subtract", [](RunConfig& c, const std::string& v) { c.init.mean_subtract = to_bool(v); }},
      {"initial.noise", [](RunConfig& c, const std::string& v) { c.init.noise = to_double(v); }},
      {"initial.noise_band", [](RunConfig& c, const std::string& v) { c.init.noise_band = to_double(v); }},
      {"initial.ground_state", [](RunConfig& c, const std::string& v) { c.ground_state_path = trim(v); }},
      {"diagnostics.morawetz_R", [](RunConfig& c, const std::string& v) { c.morawetz_R = to_list<double>(v, to_double); }},
      {"diagnostics.morawetz_profile", [](RunConfig& c, const std::string& v) { c.morawetz_profile = to_morawetz_profile(v); }},
      {"output.csv", [](RunConfig& c, const std::string& v) { c.csv_path = trim(v); }},
      {"output.checkpoint", [](RunConfig& c, const std::string& v) { c.checkpoint_path = trim(v); }},
      {"run.seed", [](RunConfig& c, const std::string& v) { c.init.seed = to_seed(v); }},
  };
  return table;
}

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, "field " + field + ": " + what);
}

template <class T>
std::vector<T> per_axis(const std::vector<T>& v, int dim) {
  if (v.size() == 1) return std::vector<T>(dim, v[0]);
  return v;
}

}  // namespace

std::vector<ConfigEntry> parse_entries(const std::string& text) {
  std::vector<ConfigEntry> out;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) fail(ErrorCode::parse, "line " + std::to_string(line) + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(ErrorCode::parse, "line " + std::to_string(line) + ": expected key = value");
    ConfigEntry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) fail(ErrorCode::parse, "line " + std::to_string(line) + ": empty key");
    if (section.empty()) fail(ErrorCode::parse, "line " + std::to_string(line) + ": key '" + e.key + "' outside a section");
    out.push_back(std::move(e));
  }
  return out;
}

void RunConfig::validate() const {
  check(dim >= 1 && dim <= 3, "grid.dim", "must be 1, 2 or 3");
  check(points.size() == 1 || static_cast<int>(points.size()) == dim, "grid.points", "needs one value or one per axis");
  check(box.size() == 1 || static_cast<int>(box.size()) == dim, "grid.box", "needs one value or one per axis");
  for (int p : points) check(p >= 2 && p % 2 == 0, "grid.points", "must be even and at least 2");
  for (double b : box) check(b > 0.0, "grid.box", "must be positive");
  try {
    model.validate();
  } catch (const Error& e) {
    check(false, "model", e.what());
  }
  try {
    stepper.validate();
  } catch (const Error& e) {
    check(false, "stepper", e.what());
  }
  try {
    init.validate();
  } catch (const Error& e) {
    check(false, "initial", e.what());
  }
  for (double R : morawetz_R) check(R > 0.0, "diagnostics.morawetz_R", "radii must be positive");
  if (init.profile == Profile::ground_state)
    check(model.nonlinearity == Nonlinearity::power, "initial.profile", "ground_state data needs the power nonlinearity");
}

GridPtr RunConfig::make_grid() const {
  validate();
  const auto p = per_axis(points, dim);
  const auto b = per_axis(box, dim);
  return gbq::make_grid(dim, p, b);
}

void set_config_value(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const auto& table = run_setters();
  const auto it = table.find(dotted_key);
  if (it == table.end()) fail(ErrorCode::parse, "unknown field " + dotted_key);
  try {
    it->second(cfg, value);
  } catch (const Error& e) {
    fail(ErrorCode::parse, "field " + dotted_key + ": " + e.what());
  }
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  const auto& table = run_setters();
  for (const ConfigEntry& e : parse_entries(text)) {
    const auto it = table.find(e.section + "." + e.key);
    if (it == table.end()) fail(ErrorCode::parse, located(e, "unknown field"));
    try {
      it->second(cfg, e.value);
    } catch (const Error& err) {
      fail(ErrorCode::parse, located(e, err.what()));
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_text_file(path)); }

std::string serialize(const RunConfig& c) {
  auto ints = [](int x) { return std::to_string(x); };
  std::ostringstream os;
  os << "[model]\n"
     << "alpha = " << fmt(c.model.alpha) << '\n'
     << "beta = " << c.model.beta << '\n'
     << "nonlinearity = " << to_string(c.model.nonlinearity) << "\n\n"
     << "[grid]\n"
     << "dim = " << c.dim << '\n'
     << "points = " << join(c.points, ints) << '\n'
     << "box = " << join(c.box, fmt) << "\n\n"
     << "[stepper]\n"
     << "dt = " << fmt(c.stepper.dt) << '\n'
     << "t_end = " << fmt(c.stepper.t_end) << '\n'
     << "sample_every = " << c.stepper.sample_every << '\n'
     << "blowup_factor = " << fmt(c.stepper.blowup_h1_factor) << '\n'
     << "dealias = " << (c.stepper.dealias ? "true" : "false") << "\n\n"
     << "[initial]\n"
     << "profile = " << to_string(c.init.profile) << '\n'
     << "amplitude = " << fmt(c.init.amplitude) << '\n'
     << "width = " << fmt(c.init.width) << '\n'
     << "modes = " << join(c.init.modes, ints) << '\n'
     << "weights = " << join(c.init.weights, fmt) << '\n'
     << "mean_subtract = " << (c.init.mean_subtract ? "true" : "false") << '\n'
     << "noise = " << fmt(c.init.noise) << '\n'
     << "noise_band = " << fmt(c.init.noise_band) << '\n'
     << "ground_state = " << c.ground_state_path << "\n\n"
     << "[diagnostics]\n"
     << "morawetz_R = " << join(c.morawetz_R, fmt) << '\n'
     << "morawetz_profile = " << (c.morawetz_profile == MorawetzProfile::d3 ? "d3" : "dge4") << "\n\n"
     << "[output]\n"
     << "csv = " << c.csv_path << '\n'
     << "checkpoint = " << c.checkpoint_path << "\n\n"
     << "[run]\n"
     << "seed = " << c.init.seed << '\n';
  return os.str();
}

SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig sc;
  SweepSpec& s = sc.spec;
  s.alphas = {3.0};
  s.betas = {-1};
  s.profiles = {Profile::ground_state};
  for (const ConfigEntry& e : parse_entries(text)) {
    const std::string k = e.section + "." + e.key;
    try {
      if (k == "grid.dim") s.dim = to_int(e.value);
      else if (k == "grid.points") s.points = to_int(e.value);
      else if (k == "grid.box") s.box = to_double(e.value);
      else if (k == "sweep.alpha") s.alphas = to_list<double>(e.value, to_double);
      else if (k == "sweep.beta") s.betas = to_list<int>(e.value, to_int);
      else if (k == "sweep.amplitude") s.amplitudes = to_list<double>(e.value, to_double);
      else if (k == "sweep.profile")
        s.profiles = to_list<Profile>(e.value, [](const std::string& p) {
          try {
            return parse_profile(p);
          } catch (const Error& err) {
            fail(ErrorCode::parse, err.what());
          }
        });
      else if (k == "sweep.confirm") s.confirm = to_bool(e.value);
      else if (k == "initial.width") s.init.width = to_double(e.value);
      else if (k == "initial.modes") s.init.modes = to_list<int>(e.value, to_int);
      else if (k == "initial.weights") s.init.weights = to_list<double>(e.value, to_double);
      else if (k == "initial.mean_subtract") s.init.mean_subtract = to_bool(e.value);
      else if (k == "initial.noise") s.init.noise = to_double(e.value);
      else if (k == "initial.noise_band") s.init.noise_band = to_double(e.value);
      else if (k == "stepper.dt") s.run.stepper.dt = to_double(e.value);
      else if (k == "stepper.t_end") s.run.stepper.t_end = to_double(e.value);
      else if (k == "stepper.sample_every") s.run.stepper.sample_every = to_int(e.value);
      else if (k == "stepper.blowup_factor") s.run.stepper.blowup_h1_factor = to_double(e.value);
      else if (k == "stepper.dealias") s.run.stepper.dealias = to_bool(e.value);
      else if (k == "stepper.probe_time") s.run.probe_time = to_double(e.value);
      else if (k == "stepper.horizon_factor") s.run.horizon_factor = to_double(e.value);
      else if (k == "output.csv") sc.csv_path = trim(e.value);
      else if (k == "run.seed") s.init.seed = to_seed(e.value);
      else fail(ErrorCode::parse, "unknown field");
    } catch (const Error& err) {
      fail(ErrorCode::parse, located(e, err.what()));
    }
  }
  check(s.dim >= 1 && s.dim <= 3, "grid.dim", "must be 1, 2 or 3");
  check(s.points >= 2 && s.points % 2 == 0, "grid.points", "must be even and at least 2");
  check(s.box > 0.0, "grid.box", "must be positive");
  for (int b : s.betas) check(b == 1 || b == -1, "sweep.beta", "entries must be +1 or -1");
  try {
    s.run.stepper.validate();
  } catch (const Error& err) {
    check(false, "stepper", err.what());
  }
  check(s.run.probe_time > 0.0, "stepper.probe_time", "must be positive");
  check(s.run.horizon_factor >= 1.0, "stepper.horizon_factor", "must be at least 1");
  return sc;
}

SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(read_text_file(path)); }

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorCode::io, "cannot write " + path);
  os << text;
  if (!os) fail(ErrorCode::io, "write failed for " + path);
}

}  // namespace gbq
