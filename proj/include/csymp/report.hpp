#ifndef CSYMP_REPORT_HPP
#define CSYMP_REPORT_HPP

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "csymp/check.hpp"

namespace csymp {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class ReportFormat { Json, CsvSummary };

/// Full result of one scenario run.
struct RunReport {
    nlohmann::ordered_json scenario_echo;
    std::vector<CheckReport> checks;
    nlohmann::ordered_json details;  // scenario-specific payload, may be null
    std::uint64_t wall_time_ms = 0;

    bool ok() const { return all_passed(checks); }
};

namespace detail {

/// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s == "inf") return "1e999";
    if (s == "-inf") return "-1e999";
    return s;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

/// Serializes a report with stable key order and fixed float formatting so
/// identical runs yield identical bytes; wall_time_ms sits on its own line
/// as the only run-dependent field.
inline std::string emit_report(const RunReport& r, ReportFormat format) {
    if (format == ReportFormat::CsvSummary) {
        std::string out = "name,status,measured,tolerance\n";
        for (const auto& c : r.checks) {
            out += c.name + "," + to_string(c.status) + "," + detail::format_double(c.measured) +
                   "," + detail::format_double(c.tolerance) + "\n";
        }
        return out;
    }
    std::string out;
    out += "{\n";
    out += "  \"schema_version\": " + std::to_string(kSchemaVersion) + ",\n";
    out += std::string("  \"version\": \"") + kVersion + "\",\n";
    out += "  \"scenario_echo\": " + r.scenario_echo.dump() + ",\n";
    out += "  \"checks\": [\n";
    for (size_t i = 0; i < r.checks.size(); ++i) {
        const auto& c = r.checks[i];
        out += "    {\"name\": \"" + detail::json_escape(c.name) + "\", \"paper_anchor\": \"" +
               detail::json_escape(c.anchor) + "\", \"status\": \"" + to_string(c.status) +
               "\", \"measured\": " + detail::format_double(c.measured) +
               ", \"tolerance\": " + detail::format_double(c.tolerance) + "}";
        out += (i + 1 < r.checks.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"details\": " + (r.details.is_null() ? std::string("null") : r.details.dump()) + ",\n";
    out += "  \"wall_time_ms\": " + std::to_string(r.wall_time_ms) + "\n";
    out += "}\n";
    return out;
}

/// Report bytes with the timing line removed, for determinism comparisons.
inline std::string report_without_timing(const std::string& report_json) {
    std::string out;
    size_t start = 0;
    while (start < report_json.size()) {
        size_t end = report_json.find('\n', start);
        if (end == std::string::npos) end = report_json.size();
        std::string line = report_json.substr(start, end - start);
        if (line.find("\"wall_time_ms\"") == std::string::npos) {
            out += line;
            out += '\n';
        }
        start = end + 1;
    }
    return out;
}

}  // namespace csymp

#endif  // CSYMP_REPORT_HPP
