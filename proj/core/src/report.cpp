#include "ferrospin/report.hpp"

#include "ferrospin/errors.hpp"
#include "ferrospin/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ferrospin {

namespace {

const char* kDeskNote =
    "desk-scale: each row is an exact finite-n check; asymptotic statements are not reproduced";

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw InputError("bad number '" + s + "' in report");
    }
}

nlohmann::json number_json(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double number_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_number(j.get<std::string>());
    throw InputError("bad number in report JSON");
}

} // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool Report::all_pass() const { return failures() == 0; }

std::size_t Report::failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.pass; }));
}

double Report::worst_slack() const {
    double w = INFINITY;
    for (const auto& r : rows) w = std::min(w, r.slack());
    return w;
}

void Report::append(const Report& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

ReportRow le_row(std::string instance, std::string op, std::string relation, double lhs, double rhs, double tol) {
    ReportRow r;
    r.instance = std::move(instance);
    r.op = std::move(op);
    r.relation = std::move(relation);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tol;
    r.pass = lhs <= rhs + tol;
    return r;
}

std::string report_csv(const Report& report) {
    std::ostringstream out;
    out << "# schema_version=" << kReportSchemaVersion << '\n';
    out << "# title=" << report.title << '\n';
    out << "# " << kDeskNote << '\n';
    for (const auto& n : report.notes) out << "# note=" << n << '\n';
    out << "instance,op,relation,lhs,rhs,slack,tolerance,pass\n";
    for (const auto& r : report.rows) {
        out << csv_field(r.instance) << ',' << csv_field(r.op) << ',' << csv_field(r.relation) << ','
            << format_double(r.lhs) << ',' << format_double(r.rhs) << ',' << format_double(r.slack()) << ','
            << format_double(r.tolerance) << ',' << (r.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string report_json(const Report& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["title"] = report.title;
    j["scope"] = kDeskNote;
    j["notes"] = report.notes;
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json rec;
        rec["instance_hash"] = r.instance;
        rec["op"] = r.op;
        rec["relation"] = r.relation;
        rec["value"] = number_json(r.lhs);
        rec["bound"] = number_json(r.rhs);
        rec["slack"] = number_json(r.slack());
        rec["tolerance"] = number_json(r.tolerance);
        rec["pass"] = r.pass;
        j["records"].push_back(rec);
    }
    j["pass"] = report.all_pass();
    return j.dump(2) + "\n";
}

Report parse_report_csv(const std::string& text) {
    Report rep;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# title=", 0) == 0) rep.title = line.substr(8);
            if (line.rfind("# note=", 0) == 0) rep.notes.push_back(line.substr(7));
            if (line.rfind("# schema_version=", 0) == 0 &&
                std::stoi(line.substr(17)) != kReportSchemaVersion) {
                throw InputError("unsupported report schema version");
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw InputError("report row has " + std::to_string(f.size()) + " fields");
        ReportRow r;
        r.instance = f[0];
        r.op = f[1];
        r.relation = f[2];
        r.lhs = parse_number(f[3]);
        r.rhs = parse_number(f[4]);
        r.tolerance = parse_number(f[6]);
        r.pass = f[7] == "true";
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

Report parse_report_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("malformed report JSON: ") + e.what());
    }
    if (j.value("schema_version", -1) != kReportSchemaVersion) throw InputError("unsupported report schema version");
    Report rep;
    rep.title = j.value("title", "");
    rep.notes = j.value("notes", std::vector<std::string>{});
    for (const auto& rec : j.at("records")) {
        ReportRow r;
        r.instance = rec.at("instance_hash").get<std::string>();
        r.op = rec.at("op").get<std::string>();
        r.relation = rec.at("relation").get<std::string>();
        r.lhs = number_from_json(rec.at("value"));
        r.rhs = number_from_json(rec.at("bound"));
        r.tolerance = number_from_json(rec.at("tolerance"));
        r.pass = rec.at("pass").get<bool>();
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

void emit_report(const Report& report, const std::string& prefix) {
    write_file(prefix + ".csv", report_csv(report));
    write_file(prefix + ".json", report_json(report));
}

} // namespace ferrospin
