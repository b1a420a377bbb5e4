#pragma once

#include <string>
#include <vector>

namespace ferrospin {

inline constexpr int kReportSchemaVersion = 1;

// One checked relation: pass means lhs <= rhs + tolerance unless the check
// states otherwise in `relation`.
struct ReportRow {
    std::string instance; // instance hash or label
    std::string op;
    std::string relation;
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    double slack() const { return rhs - lhs; }
};

struct Report {
    std::string title;
    std::vector<ReportRow> rows;
    std::vector<std::string> notes;

    bool all_pass() const;
    std::size_t failures() const;
    // Smallest slack over all rows (infinity when empty).
    double worst_slack() const;
    void add(ReportRow row) { rows.push_back(std::move(row)); }
    void append(const Report& other);
};

// lhs <= rhs + tol.
ReportRow le_row(std::string instance, std::string op, std::string relation, double lhs, double rhs, double tol);

std::string report_csv(const Report& report);
std::string report_json(const Report& report);
Report parse_report_csv(const std::string& text);
Report parse_report_json(const std::string& text);
// Writes prefix.csv and prefix.json.
void emit_report(const Report& report, const std::string& prefix);

std::string format_double(double x);

} // namespace ferrospin
