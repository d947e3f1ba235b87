#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace twisted_dirac::cli {

#ifndef TWISTED_DIRAC_VERSION
#define TWISTED_DIRAC_VERSION "0.1.0"
#endif

inline constexpr const char* kVersion = TWISTED_DIRAC_VERSION;

struct ResultRecord {
  std::size_t index = 0;
  std::string command;
  std::string quantity;
  double value = 0.0;
  double error_bound = 0.0;
  std::string method;
  bool converged = true;
  double wall_time = 0.0;
  std::string version = kVersion;
  std::string config_hash;
  nlohmann::json input;  // model (and sweep point) the value belongs to
  std::vector<std::pair<std::string, double>> params;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

inline void to_json(nlohmann::json& j, const ResultRecord& r) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& [k, v] : r.params) params.push_back({{"name", k}, {"value", v}});
  j = {{"index", r.index},
       {"command", r.command},
       {"quantity", r.quantity},
       {"value", r.value},
       {"error_bound", r.error_bound},
       {"method", r.method},
       {"converged", r.converged},
       {"wall_time", r.wall_time},
       {"version", r.version},
       {"config_hash", r.config_hash},
       {"input", r.input},
       {"params", params}};
}

inline void from_json(const nlohmann::json& j, ResultRecord& r) {
  j.at("index").get_to(r.index);
  j.at("command").get_to(r.command);
  j.at("quantity").get_to(r.quantity);
  j.at("value").get_to(r.value);
  j.at("error_bound").get_to(r.error_bound);
  j.at("method").get_to(r.method);
  j.at("converged").get_to(r.converged);
  j.at("wall_time").get_to(r.wall_time);
  j.at("version").get_to(r.version);
  j.at("config_hash").get_to(r.config_hash);
  r.input = j.at("input");
  r.params.clear();
  for (const auto& p : j.at("params")) r.params.emplace_back(p.at("name").get<std::string>(), p.at("value").get<double>());
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_json(std::ostream& os, const std::vector<ResultRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(r);
  os << arr.dump(2) << '\n';
}

/// Fixed columns, then one column per parameter name in order of first
/// appearance; cells for parameters a record lacks are empty.
inline void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  std::vector<std::string> names;
  for (const auto& r : records)
    for (const auto& [k, v] : r.params)
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
  os << "index,command,quantity,value,error_bound,method,converged,wall_time,version,config_hash,input";
  for (const auto& n : names) os << ',' << detail::csv_quote(n);
  os << '\n';
  for (const auto& r : records) {
    os << r.index << ',' << r.command << ',' << r.quantity << ',' << format_double(r.value) << ','
       << format_double(r.error_bound) << ',' << r.method << ',' << (r.converged ? "true" : "false") << ','
       << format_double(r.wall_time) << ',' << r.version << ',' << r.config_hash << ','
       << detail::csv_quote(r.input.dump());
    for (const auto& n : names) {
      os << ',';
      for (const auto& [k, v] : r.params)
        if (k == n) {
          os << format_double(v);
          break;
        }
    }
    os << '\n';
  }
}

}  // namespace twisted_dirac::cli
