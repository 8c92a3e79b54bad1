#include "sadp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sadp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    parts.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
  throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) +
                    "': " + std::string(what));
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    bad_value(key, text, "expected a number");
  }
  return value;
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    bad_value(key, text, "expected an integer");
  }
  return value;
}

Vector to_vector(std::string_view key, std::string_view text) {
  const auto parts = split_list(text);
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = to_double(key, parts[i]);
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v(i));
  }
  return out;
}

std::string_view wiring_name(NoiseWiring w) { return w == NoiseWiring::both ? "both" : "kf_only"; }

}  // namespace

PlantModel SimConfig::plant_model() const {
  if (custom_plant) return *custom_plant;
  return make_plant(plant);
}

RunningCost SimConfig::running_cost() const {
  return RunningCost(q_cost.asDiagonal().toDenseMatrix(), r_cost.asDiagonal().toDenseMatrix());
}

Eigen::Index SimConfig::step_count() const {
  return static_cast<Eigen::Index>(std::llround(T / dt));
}

Vector SimConfig::initial_control() const {
  const Eigen::Index m = plant_model().m;
  if (u0.size() == m) return u0;
  if (u0.size() == 1) return Vector::Constant(m, u0(0));
  throw ConfigError("u0 must have 1 or m entries");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "plant",  "x0",          "u0",    "dt",     "T",
      "sigma",  "noise_wiring", "q_cost", "r_cost", "L",
      "q_kf",   "r_kf",        "p0",    "alpha",  "beta",
      "n_critic_iter", "n_actor_iter", "N", "controller", "gradient_mode",
      "u_clamp", "seeds",      "threshold", "sustain_steps"};
  return keys;
}

void set_field(SimConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  try {
    if (key == "plant") {
      make_plant(value);
      cfg.plant = std::string(value);
      cfg.custom_plant.reset();
    } else if (key == "x0") {
      cfg.x0 = to_vector(key, value);
    } else if (key == "u0") {
      cfg.u0 = to_vector(key, value);
    } else if (key == "dt") {
      cfg.dt = to_double(key, value);
    } else if (key == "T") {
      cfg.T = to_double(key, value);
    } else if (key == "sigma") {
      cfg.sigma = to_double(key, value);
    } else if (key == "noise_wiring") {
      if (value == "both") cfg.noise_wiring = NoiseWiring::both;
      else if (value == "kf_only") cfg.noise_wiring = NoiseWiring::kf_only;
      else bad_value(key, value, "expected 'both' or 'kf_only'");
    } else if (key == "q_cost") {
      cfg.q_cost = to_vector(key, value);
    } else if (key == "r_cost") {
      cfg.r_cost = to_vector(key, value);
    } else if (key == "L") {
      cfg.L = to_integer<Eigen::Index>(key, value);
    } else if (key == "q_kf") {
      cfg.q_kf = to_double(key, value);
    } else if (key == "r_kf") {
      cfg.r_kf = to_double(key, value);
    } else if (key == "p0") {
      cfg.p0 = to_double(key, value);
    } else if (key == "alpha") {
      cfg.alpha = to_double(key, value);
    } else if (key == "beta") {
      cfg.beta = to_double(key, value);
    } else if (key == "n_critic_iter") {
      cfg.n_critic_iter = to_integer<int>(key, value);
    } else if (key == "n_actor_iter") {
      cfg.n_actor_iter = to_integer<int>(key, value);
    } else if (key == "N") {
      cfg.N = to_integer<Eigen::Index>(key, value);
    } else if (key == "controller") {
      cfg.controller = parse_controller(value);
    } else if (key == "gradient_mode") {
      cfg.gradient_mode = parse_gradient_mode(value);
    } else if (key == "u_clamp") {
      cfg.u_clamp = to_double(key, value);
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (auto part : split_list(value)) cfg.seeds.push_back(to_integer<std::uint64_t>(key, part));
    } else if (key == "threshold") {
      cfg.threshold = to_double(key, value);
    } else if (key == "sustain_steps") {
      cfg.sustain_steps = to_integer<int>(key, value);
    } else {
      throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SimConfig parse_config(std::string_view text, SimConfig base) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == text.npos ? text.npos : end - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == line.npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      set_field(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    if (end == text.npos) break;
    start = end + 1;
  }
  return base;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

void validate(const SimConfig& cfg) {
  PlantModel plant;
  try {
    plant = cfg.plant_model();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(cfg.x0.size() == plant.n, "x0 must have n = " + std::to_string(plant.n) + " entries");
  require(cfg.u0.size() == 1 || cfg.u0.size() == plant.m, "u0 must have 1 or m entries");
  require(cfg.q_cost.size() == plant.n, "q_cost must have n entries");
  require(cfg.r_cost.size() == plant.m, "r_cost must have m entries");
  require((cfg.q_cost.array() > 0).all() && (cfg.r_cost.array() > 0).all(),
          "cost weights must be positive");
  require(cfg.dt > 0, "dt must be > 0");
  require(cfg.T > 0, "T must be > 0");
  require(cfg.sigma >= 0, "sigma must be >= 0");
  require(cfg.L >= 1, "L must be >= 1");
  require(cfg.N >= 1, "N must be >= 1");
  require(cfg.q_kf >= 0, "q_kf must be >= 0");
  require(cfg.effective_r_kf() > 0, "r_kf must be > 0");
  require(cfg.p0 > 0, "p0 must be > 0");
  require(cfg.alpha >= 0 && cfg.beta >= 0, "gains must be >= 0");
  require(cfg.n_critic_iter >= 1 && cfg.n_actor_iter >= 1, "iteration counts must be >= 1");
  require(cfg.u_clamp >= 0, "u_clamp must be >= 0");
  require(!cfg.seeds.empty(), "at least one seed is required");
  require(cfg.threshold >= 0, "threshold must be >= 0");
  require(cfg.sustain_steps >= 1, "sustain_steps must be >= 1");
}

std::string serialize(const SimConfig& cfg) {
  std::ostringstream out;
  out << "plant = " << (cfg.custom_plant ? "custom:" + cfg.custom_plant->name : cfg.plant) << '\n'
      << "x0 = " << format_vector(cfg.x0) << '\n'
      << "u0 = " << format_vector(cfg.u0) << '\n'
      << "dt = " << format_double(cfg.dt) << '\n'
      << "T = " << format_double(cfg.T) << '\n'
      << "sigma = " << format_double(cfg.sigma) << '\n'
      << "noise_wiring = " << wiring_name(cfg.noise_wiring) << '\n'
      << "q_cost = " << format_vector(cfg.q_cost) << '\n'
      << "r_cost = " << format_vector(cfg.r_cost) << '\n'
      << "L = " << cfg.L << '\n'
      << "q_kf = " << format_double(cfg.q_kf) << '\n'
      << "r_kf = " << format_double(cfg.effective_r_kf()) << '\n'
      << "p0 = " << format_double(cfg.p0) << '\n'
      << "alpha = " << format_double(cfg.alpha) << '\n'
      << "beta = " << format_double(cfg.beta) << '\n'
      << "n_critic_iter = " << cfg.n_critic_iter << '\n'
      << "n_actor_iter = " << cfg.n_actor_iter << '\n'
      << "N = " << cfg.N << '\n'
      << "controller = " << to_string(cfg.controller) << '\n'
      << "gradient_mode = " << to_string(cfg.gradient_mode) << '\n'
      << "u_clamp = " << format_double(cfg.u_clamp) << '\n'
      << "threshold = " << format_double(cfg.threshold) << '\n'
      << "sustain_steps = " << cfg.sustain_steps << '\n';
  return out.str();
}

std::uint64_t config_hash(const SimConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : serialize(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace sadp
