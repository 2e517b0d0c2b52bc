#include "bcl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bcl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  std::size_t used = 0;
  if (slash != std::string::npos) {
    const double num = std::stod(t.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument(t);
    const std::string den_s = t.substr(slash + 1);
    const double den = std::stod(den_s, &used);
    if (used != den_s.size()) throw std::invalid_argument(t);
    const double v = num / den;
    if (!std::isfinite(v)) throw std::invalid_argument(t);
    return v;
  }
  const double v = std::stod(t, &used);
  if (used != t.size()) throw std::invalid_argument(t);
  return v;
}

KeyValues KeyValues::parse(const std::string& text, const std::string& source) {
  KeyValues kv;
  kv.source_ = source;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (kv.values_.count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + key + ": duplicate key");
    kv.values_[key] = trim(line.substr(eq + 1));
    kv.lines_[key] = lineno;
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string KeyValues::where(const std::string& key) const {
  const auto it = lines_.find(key);
  if (it == lines_.end()) return source_ + ": " + key;
  return source_ + ":" + std::to_string(it->second) + ": " + key;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return parse_number(it->second);
  } catch (const std::exception&) {
    throw ConfigError(where(key) + ": expected a number, got '" + it->second + "'");
  }
}

std::int64_t KeyValues::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where(key) + ": expected an integer, got '" + it->second + "'");
  }
}

std::uint64_t KeyValues::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(it->second, &used);
    if (used != it->second.size() || it->second.front() == '-')
      throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where(key) + ": expected an unsigned integer, got '" + it->second + "'");
  }
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(where(key) + ": expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValues::get_doubles(const std::string& key,
                                           const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) {
    try {
      out.push_back(parse_number(item));
    } catch (const std::exception&) {
      throw ConfigError(where(key) + ": bad list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(where(key) + ": list must be nonempty");
  return out;
}

std::vector<std::string> KeyValues::get_strings(const std::string& key,
                                                const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  auto out = split_list(it->second);
  if (out.empty()) throw ConfigError(where(key) + ": list must be nonempty");
  return out;
}

void KeyValues::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (!allowed.count(key)) throw ConfigError(where(key) + ": unknown key");
  }
}

ModelParams model_params_from(const KeyValues& kv, ModelParams p) {
  p.beta = kv.get_double("beta", p.beta);
  p.lambda = kv.get_double("lambda", p.lambda);
  p.alpha = kv.get_double("alpha", p.alpha);
  p.gamma = kv.get_double("gamma", p.gamma);
  p.kappa = kv.get_double("kappa", p.kappa);
  p.delta = kv.get_double("delta", p.delta);
  p.n = static_cast<int>(kv.get_int("n", p.n));
  try {
    validate(p);
  } catch (const DomainError& e) {
    // DomainError messages start with the field name
    const std::string msg = e.what();
    const std::string field = msg.substr(0, msg.find(':'));
    throw ConfigError(kv.where(field) + msg.substr(msg.find(':')));
  }
  return p;
}

}  // namespace bcl
