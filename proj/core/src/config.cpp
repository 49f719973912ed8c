#include <mlpbsde/config.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlpbsde {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw ConfigError("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + v);
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw ConfigError("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': " + v);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw ConfigError("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad unsigned value for '" + key + "': " + v);
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "problem" && section != "method" && section != "study" &&
          section != "output")
        throw ConfigError("config line " + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");

    if (section == "problem") {
      if (key == "family") {
        try {
          parse_family(val);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        cfg.family = val;
      } else if (key == "d") {
        const std::int64_t d = parse_int(key, val);
        if (d < 1 || d > 1'000'000) throw ConfigError("config: d out of range: " + val);
        cfg.d = static_cast<int>(d);
      } else if (key == "T" || key == "a" || key == "b" || key == "c" || key == "rho" ||
                 key == "beta" || key == "V0") {
        cfg.problem_params[key] = parse_double(key, val);
      } else {
        throw ConfigError("config: unknown [problem] key '" + key + "'");
      }
    } else if (section == "method") {
      if (key == "n") {
        const std::int64_t n = parse_int(key, val);
        if (n < 0 || n > 8) throw ConfigError("config: n out of range: " + val);
        cfg.n = static_cast<int>(n);
      } else if (key == "M") {
        const std::int64_t M = parse_int(key, val);
        if (M < 1) throw ConfigError("config: M must be >= 1");
        cfg.M = M;
      } else if (key == "seed") {
        cfg.seed = MasterSeed{parse_u64(key, val)};
      } else if (key == "replications") {
        const std::int64_t r = parse_int(key, val);
        if (r < 1) throw ConfigError("config: replications must be >= 1");
        cfg.replications = static_cast<int>(r);
      } else {
        throw ConfigError("config: unknown [method] key '" + key + "'");
      }
    } else if (section == "study") {
      if (key == "n_list") {
        cfg.n_list.clear();
        for (const auto& s : split_list(val)) {
          const std::int64_t n = parse_int(key, s);
          if (n < 1 || n > 8) throw ConfigError("config: n_list entry out of range: " + s);
          cfg.n_list.push_back(static_cast<int>(n));
        }
      } else if (key == "d_list") {
        cfg.d_list.clear();
        for (const auto& s : split_list(val)) {
          const std::int64_t d = parse_int(key, s);
          if (d < 1 || d > 1'000'000) throw ConfigError("config: d_list entry out of range: " + s);
          cfg.d_list.push_back(static_cast<int>(d));
        }
      } else if (key == "epsilon") {
        cfg.epsilon = parse_double(key, val);
        if (!(cfg.epsilon >= 0.0)) throw ConfigError("config: epsilon must be >= 0");
      } else {
        throw ConfigError("config: unknown [study] key '" + key + "'");
      }
    } else {  // output
      if (key == "dir") {
        cfg.out_dir = val;
      } else if (key == "formats") {
        cfg.formats = split_list(val);
        for (const auto& f : cfg.formats)
          if (f != "csv" && f != "json")
            throw ConfigError("config: unknown output format '" + f + "'");
        if (cfg.formats.empty()) throw ConfigError("config: formats list empty");
      } else {
        throw ConfigError("config: unknown [output] key '" + key + "'");
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

BsdeProblem ExperimentConfig::make_problem() const { return make_problem(d); }

BsdeProblem ExperimentConfig::make_problem(int dim) const {
  return builtin_problem(family, dim, problem_params);
}

std::string ExperimentConfig::to_json() const {
  std::ostringstream out;
  out << "{\"problem\": {\"family\": \"" << family << "\", \"d\": " << d;
  for (const auto& [k, v] : problem_params) out << ", \"" << k << "\": " << fmt17(v);
  out << "}, \"method\": {\"n\": " << n << ", \"M\": " << M << ", \"seed\": " << seed.value
      << ", \"replications\": " << replications << "}";
  out << ", \"study\": {\"n_list\": [";
  for (std::size_t i = 0; i < n_list.size(); ++i) out << (i ? ", " : "") << n_list[i];
  out << "], \"d_list\": [";
  for (std::size_t i = 0; i < d_list.size(); ++i) out << (i ? ", " : "") << d_list[i];
  out << "], \"epsilon\": " << fmt17(epsilon) << "}";
  out << ", \"output\": {\"dir\": \"" << out_dir << "\", \"formats\": [";
  for (std::size_t i = 0; i < formats.size(); ++i)
    out << (i ? ", " : "") << '"' << formats[i] << '"';
  out << "]}}";
  return out.str();
}

}  // namespace mlpbsde
