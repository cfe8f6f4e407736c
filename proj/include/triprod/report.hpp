#ifndef TRIPROD_REPORT_HPP
#define TRIPROD_REPORT_HPP

// JSON / CSV serialization of suite results.  Numbers are printed with 17
// significant digits so reports diff cleanly and round-trip exactly;
// non-finite values become null (JSON) or empty fields (CSV).

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "triprod/identities.hpp"

namespace triprod {

struct Report {
  // Ordered key/value metadata; values are pre-rendered JSON.
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<IdentityReport> suites;

  bool pass() const {
    for (const auto& s : suites)
      if (!s.pass) return false;
    return !suites.empty();
  }
};

namespace json {

inline std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

inline std::string complex(cplx z) { return "[" + number(z.real()) + ", " + number(z.imag()) + "]"; }

}  // namespace json

namespace detail {

inline void write_point(std::ostream& os, const PointRecord& p, const char* indent) {
  os << indent << "{\"params\": [";
  for (std::size_t i = 0; i < p.params.size(); ++i) os << (i ? ", " : "") << json::complex(p.params[i]);
  os << "], \"value_re\": " << json::number(p.value.real()) << ", \"value_im\": " << json::number(p.value.imag())
     << ", \"abs_err\": " << json::number(p.abs_err) << ", \"residual\": " << json::number(p.residual);
  if (!p.note.empty()) os << ", \"note\": " << json::string(p.note);
  os << "}";
}

}  // namespace detail

inline void write_json(std::ostream& os, const Report& r) {
  os << "{\n  \"meta\": {";
  for (std::size_t i = 0; i < r.meta.size(); ++i)
    os << (i ? "," : "") << "\n    " << json::string(r.meta[i].first) << ": " << r.meta[i].second;
  os << "\n  },\n  \"pass\": " << (r.pass() ? "true" : "false") << ",\n  \"suites\": [";
  for (std::size_t s = 0; s < r.suites.size(); ++s) {
    const auto& su = r.suites[s];
    os << (s ? "," : "") << "\n    {\n      \"name\": " << json::string(su.identity_name) << ",\n      \"points\": [";
    for (std::size_t i = 0; i < su.points.size(); ++i) {
      os << (i ? ",\n" : "\n");
      detail::write_point(os, su.points[i], "        ");
    }
    os << (su.points.empty() ? "]" : "\n      ]");
    if (!su.skipped.empty()) {
      os << ",\n      \"skipped\": [";
      for (std::size_t i = 0; i < su.skipped.size(); ++i) {
        os << (i ? ",\n" : "\n");
        detail::write_point(os, su.skipped[i], "        ");
      }
      os << "\n      ]";
    }
    os << ",\n      \"max_residual\": " << json::number(su.max_residual) << ",\n      \"tolerance\": "
       << json::number(su.tolerance);
    if (su.constant) os << ",\n      \"constant\": " << json::complex(*su.constant);
    os << ",\n      \"pass\": " << (su.pass ? "true" : "false") << "\n    }";
  }
  os << (r.suites.empty() ? "]" : "\n  ]") << "\n}\n";
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string csv_number(double v) { return std::isfinite(v) ? json::number(v) : std::string(); }

}  // namespace detail

/// One row per point; params are rendered as "re:im" joined with ';'.
/// Metadata goes into leading '#' comment lines.
inline void write_csv(std::ostream& os, const Report& r) {
  for (const auto& [k, v] : r.meta) os << "# " << k << " = " << v << "\n";
  os << "suite,status,index,params,value_re,value_im,abs_err,residual,tolerance,suite_pass,note\n";
  for (const auto& su : r.suites) {
    auto row = [&](const PointRecord& p, const char* status, std::size_t i) {
      std::string params;
      for (std::size_t j = 0; j < p.params.size(); ++j)
        params += (j ? ";" : "") + json::number(p.params[j].real()) + ":" + json::number(p.params[j].imag());
      os << detail::csv_field(su.identity_name) << "," << status << "," << i << "," << params << ","
         << detail::csv_number(p.value.real()) << "," << detail::csv_number(p.value.imag()) << ","
         << detail::csv_number(p.abs_err) << "," << detail::csv_number(p.residual) << ","
         << detail::csv_number(su.tolerance) << "," << (su.pass ? "true" : "false") << ","
         << detail::csv_field(p.note) << "\n";
    };
    for (std::size_t i = 0; i < su.points.size(); ++i) row(su.points[i], "ok", i);
    for (std::size_t i = 0; i < su.skipped.size(); ++i) row(su.skipped[i], "skipped", i);
  }
}

}  // namespace triprod

#endif  // TRIPROD_REPORT_HPP
