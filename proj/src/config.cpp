#include "spad/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace spad {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw std::invalid_argument("config key '" + key + "': '" + v +
                                "' is not a number");
  }
  return d;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v[0] == '-') {
    throw std::invalid_argument("config key '" + key + "': '" + v +
                                "' is not a nonnegative integer");
  }
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE) {
    throw std::invalid_argument("config key '" + key + "': '" + v +
                                "' is not a nonnegative integer");
  }
  return u;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "': '" + v +
                              "' is not a boolean");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto real = [](double SensorConfig::*field) -> Setter {
    return [field](RunConfig& c, const std::string& k, const std::string& v) {
      c.sensor.*field = parse_double(k, v);
    };
  };
  static const std::map<std::string, Setter> table = {
      {"quantum_efficiency", real(&SensorConfig::quantum_efficiency)},
      {"dead_time", real(&SensorConfig::dead_time)},
      {"exposure", real(&SensorConfig::exposure)},
      {"pixel_pitch", real(&SensorConfig::pixel_pitch)},
      {"fill_factor", real(&SensorConfig::fill_factor)},
      {"wavelength", real(&SensorConfig::wavelength)},
      {"luminous_efficiency", real(&SensorConfig::luminous_efficiency)},
      {"dark_count_rate", real(&SensorConfig::dark_count_rate)},
      {"afterpulse_probability", real(&SensorConfig::afterpulse_probability)},
      {"afterpulse_delay", real(&SensorConfig::afterpulse_delay)},
      {"jitter_sigma", real(&SensorConfig::jitter_sigma)},
      {"lux", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.reference_lux = parse_double(k, v);
       }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_uint(k, v);
       }},
      {"mode", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "fixed-exposure") {
           c.mode = AcquisitionMode::kFixedExposure;
         } else if (v == "fixed-count") {
           c.mode = AcquisitionMode::kFixedCount;
         } else {
           throw std::invalid_argument("config key '" + k +
                                       "': expected fixed-exposure or fixed-count");
         }
       }},
      {"fixed_count", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fixed_count = parse_uint(k, v);
       }},
      {"steps", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.schedule.steps = parse_uint(k, v);
       }},
      {"beta_start", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.schedule.beta_start = parse_double(k, v);
       }},
      {"beta_end", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.schedule.beta_end = parse_double(k, v);
       }},
      {"rho0", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.schedule.rho0 = parse_double(k, v);
       }},
      {"rho_mode", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "gradient-norm") {
           c.schedule.scaling = GuidanceScaling::kGradientNorm;
         } else if (v == "fixed") {
           c.schedule.scaling = GuidanceScaling::kFixed;
         } else {
           throw std::invalid_argument("config key '" + k +
                                       "': expected gradient-norm or fixed");
         }
       }},
      {"transform_a", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.transform_a = parse_double(k, v);
       }},
      {"transform_b", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.transform_b = parse_double(k, v);
       }},
      {"clip_estimate", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.clip_estimate = parse_bool(k, v);
       }},
      {"verify_pixels", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.verify_pixels = parse_uint(k, v);
       }},
      {"verify_flux", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.verify_flux = parse_double(k, v);
       }},
  };
  return table;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  it->second(*this, key, value);
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    try {
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void RunConfig::validate() const {
  sensor.validate();
  if (!(sensor.exposure > 0.0)) throw std::invalid_argument("exposure must be > 0");
  if (!(reference_lux >= 0.0)) throw std::invalid_argument("lux must be >= 0");
  if (mode == AcquisitionMode::kFixedCount && fixed_count == 0) {
    throw std::invalid_argument("fixed_count must be >= 1");
  }
  if (schedule.steps == 0) throw std::invalid_argument("steps must be >= 1");
  if (!(schedule.beta_start > 0.0 && schedule.beta_end < 1.0 &&
        schedule.beta_start <= schedule.beta_end)) {
    throw std::invalid_argument("need 0 < beta_start <= beta_end < 1");
  }
  if (!(schedule.rho0 >= 0.0)) throw std::invalid_argument("rho0 must be >= 0");
  if (transform_a < 0.0) throw std::invalid_argument("transform_a must be >= 0");
  if (!(transform_b >= 1.0)) throw std::invalid_argument("transform_b must be >= 1");
}

double RunConfig::reference_flux() const {
  return sensor.quantum_efficiency * lux_to_flux(reference_lux, sensor);
}

DomainTransform RunConfig::transform() const {
  DomainTransform t;
  t.a = transform_a > 0.0 ? transform_a : reference_flux() / 2.0;
  t.b = transform_b;
  t.validate();
  return t;
}

ScheduleSet RunConfig::make_schedule() const {
  return make_linear_schedule(schedule, transform().a);
}

}  // namespace spad
