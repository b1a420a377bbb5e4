#include "ferrospin/io.hpp"

#include "ferrospin/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ferrospin {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("bad field '") + key + "': " + e.what());
    }
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

TwoSpinSystem parse_instance(const std::string& text) {
    const json j = parse_json(text);
    const auto n = field<long long>(j, "n");
    if (n < 0) throw InputError("n must be non-negative");
    const auto lambda = field<std::vector<double>>(j, "lambda");
    std::vector<EdgeParams> edges;
    if (j.contains("edges")) {
        if (!j.at("edges").is_array()) throw InputError("'edges' must be an array");
        for (const auto& e : j.at("edges")) {
            const auto u = field<long long>(e, "u");
            const auto v = field<long long>(e, "v");
            if (u < 0 || v < 0) throw InputError("edge endpoints must be non-negative");
            const double beta = field<double>(e, "beta");
            const double gamma = field<double>(e, "gamma");
            if (!(beta * gamma > 1.0)) {
                throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                 ") is not ferromagnetic: beta*gamma must exceed 1");
            }
            edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v), beta, gamma});
        }
    }
    return TwoSpinSystem::from_values(static_cast<std::size_t>(n), lambda, edges);
}

TwoSpinSystem load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string instance_to_json(const TwoSpinSystem& system) {
    std::ostringstream out;
    out << "{\"n\":" << system.size() << ",\"lambda\":[";
    for (std::size_t v = 0; v < system.size(); ++v) {
        if (v) out << ',';
        out << format_double(system.lambda(v));
    }
    out << "],\"edges\":[";
    for (std::size_t i = 0; i < system.edges().size(); ++i) {
        const auto& e = system.edge(i);
        if (i) out << ',';
        out << "{\"u\":" << e.u << ",\"v\":" << e.v << ",\"beta\":" << format_double(e.beta())
            << ",\"gamma\":" << format_double(e.gamma()) << '}';
    }
    out << "]}";
    return out.str();
}

RbmParams parse_rbm(const std::string& text) {
    const json j = parse_json(text);
    const auto n0 = field<long long>(j, "n0");
    const auto n1 = field<long long>(j, "n1");
    if (n0 < 0 || n1 < 0) throw InputError("n0 and n1 must be non-negative");
    RbmParams rbm;
    rbm.n0 = static_cast<std::size_t>(n0);
    rbm.n1 = static_cast<std::size_t>(n1);
    rbm.theta = field<std::vector<double>>(j, "theta");
    const auto w = field<std::vector<std::vector<double>>>(j, "W");
    const std::size_t n = rbm.size();
    const bool cross_block = w.size() == rbm.n0 && rbm.n0 != n &&
                             (w.empty() || w.front().size() == rbm.n1);
    if (cross_block) {
        rbm.weights.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < rbm.n0; ++i) {
            if (w[i].size() != rbm.n1) throw InputError("W cross block must be n0 x n1");
            for (std::size_t j2 = 0; j2 < rbm.n1; ++j2) {
                rbm.weights[i][rbm.n0 + j2] = w[i][j2];
                rbm.weights[rbm.n0 + j2][i] = w[i][j2];
            }
        }
    } else {
        rbm.weights = w;
    }
    rbm.validate();
    return rbm;
}

RbmParams load_rbm(const std::string& path) { return parse_rbm(read_file(path)); }

std::string instance_hash(const TwoSpinSystem& system) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : instance_to_json(system)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << contents;
}

} // namespace ferrospin
