#pragma once

// Stream ingestion (CSV and JSON-lines) and the per-observation output
// record. Every parse error names the 1-based line it came from. Floating
// point output is serialized with 17 significant digits so records round
// trip exactly.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hafvf/errors.hpp"

namespace hafvf {

enum class Encoding { Csv, JsonLines };

enum class Schema { Scalar, Vector, Binary, RegressorResponse };

inline Encoding encoding_from_name(const std::string& name) {
  if (name == "csv") return Encoding::Csv;
  if (name == "jsonl" || name == "json-lines") return Encoding::JsonLines;
  throw config_error("unknown stream format '" + name + "' (valid: csv, jsonl)");
}

// One numeric row per observation, in stream order.
struct StreamRows {
  std::vector<std::vector<double>> rows;
  std::vector<long> line_numbers;  // 1-based source lines, parallel to rows
};

namespace io_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> try_parse_double(const std::string& text) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return out;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace io_detail

// CSV: one observation per line, comma separated; a non-numeric first row is
// treated as a header. JSON-lines: one object per line, either
// {"x": <number>}, {"x": [..]}, or {"u": [..], "y": <number>} (flattened to
// u..., y).
inline StreamRows read_rows(std::istream& in, Encoding encoding) {
  StreamRows out;
  std::string line;
  long lineno = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = io_detail::trim(line);
    if (trimmed.empty()) continue;
    if (encoding == Encoding::Csv) {
      const auto fields = io_detail::split_csv(trimmed);
      std::vector<double> row;
      row.reserve(fields.size());
      bool ok = true;
      for (const auto& f : fields) {
        const auto v = io_detail::try_parse_double(f);
        if (!v) {
          ok = false;
          break;
        }
        row.push_back(*v);
      }
      if (!ok) {
        if (first_data_line) continue;  // header row
        throw input_error("line " + std::to_string(lineno) + ": malformed CSV row '" + trimmed +
                          "'");
      }
      first_data_line = false;
      out.rows.push_back(std::move(row));
      out.line_numbers.push_back(lineno);
    } else {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(trimmed);
      } catch (const nlohmann::json::exception& e) {
        throw input_error("line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
      }
      std::vector<double> row;
      try {
        if (j.contains("u") && j.contains("y")) {
          for (const auto& v : j.at("u")) row.push_back(v.get<double>());
          row.push_back(j.at("y").get<double>());
        } else if (j.contains("x")) {
          const auto& x = j.at("x");
          if (x.is_array()) {
            for (const auto& v : x) row.push_back(v.get<double>());
          } else {
            row.push_back(x.get<double>());
          }
        } else {
          throw input_error("line " + std::to_string(lineno) +
                            ": expected an object with 'x' or 'u'/'y'");
        }
      } catch (const nlohmann::json::exception& e) {
        throw input_error("line " + std::to_string(lineno) + ": invalid record: " + e.what());
      }
      out.rows.push_back(std::move(row));
      out.line_numbers.push_back(lineno);
    }
  }
  return out;
}

inline void require_row_width(const StreamRows& rows, std::size_t index, std::size_t expected,
                              const char* what) {
  if (rows.rows[index].size() != expected) {
    throw input_error("line " + std::to_string(rows.line_numbers[index]) + ": expected " +
                      std::to_string(expected) + " " + what + ", got " +
                      std::to_string(rows.rows[index].size()));
  }
}

// ---- output records ----

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct StepRecord {
  long t = 0;
  std::string family;
  std::optional<double> e_w, var_w, e_b;
  std::optional<double> eta_eff, eta_asymptote, elbo, log_pred;
  std::optional<bool> reset_w, reset_b;
  std::optional<long> iterations;
  std::vector<std::pair<std::string, double>> posterior_summary;
  std::optional<bool> change;
};

namespace io_detail {

inline void append_field(std::string& out, const char* key, const std::optional<double>& v) {
  out += "\"";
  out += key;
  out += "\":";
  out += (v && std::isfinite(*v)) ? fmt_g17(*v) : "null";
  out += ",";
}

inline void append_field(std::string& out, const char* key, const std::optional<bool>& v) {
  out += "\"";
  out += key;
  out += "\":";
  out += v ? (*v ? "true" : "false") : "null";
  out += ",";
}

}  // namespace io_detail

inline std::string to_json_line(const StepRecord& r) {
  std::string out = "{\"t\":" + std::to_string(r.t) + ",\"family\":\"" + r.family + "\",";
  io_detail::append_field(out, "e_w", r.e_w);
  io_detail::append_field(out, "var_w", r.var_w);
  io_detail::append_field(out, "e_b", r.e_b);
  io_detail::append_field(out, "eta_eff", r.eta_eff);
  io_detail::append_field(out, "eta_asymptote", r.eta_asymptote);
  io_detail::append_field(out, "elbo", r.elbo);
  io_detail::append_field(out, "log_pred", r.log_pred);
  io_detail::append_field(out, "reset_w", r.reset_w);
  io_detail::append_field(out, "reset_b", r.reset_b);
  out += "\"iterations\":";
  out += r.iterations ? std::to_string(*r.iterations) : "null";
  out += ",\"posterior_summary\":{";
  for (std::size_t i = 0; i < r.posterior_summary.size(); ++i) {
    if (i) out += ",";
    out += "\"" + r.posterior_summary[i].first + "\":";
    const double v = r.posterior_summary[i].second;
    out += std::isfinite(v) ? fmt_g17(v) : "null";
  }
  out += "},";
  std::optional<bool> change = r.change;
  out += "\"change\":";
  out += change ? (*change ? "true" : "false") : "null";
  out += "}";
  return out;
}

}  // namespace hafvf
