#pragma once

// Oracle fixture files: one row per evaluation with columns
// family,s,x,value,error_estimate,config_hash. The hash covers the family,
// the evaluation point and the quadrature settings, so a stale file whose
// settings no longer match the generator is rejected on load.

#include "lowregret/oracle.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lowregret::fixtures {

struct Row {
    std::string family;
    double s = 0.0;
    double x = 0.0;
    double value = 0.0;
    double error_estimate = 0.0;
    std::string config_hash;
};

inline std::string hex_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

inline std::string canonical(const std::string& family, double s, double x,
                             const oracle::QuadratureSpec& spec) {
    std::ostringstream out;
    out << family << ";s=" << hex_double(s) << ";x=" << hex_double(x)
        << ";abs_tol=" << hex_double(spec.abs_tol) << ";rel_tol=" << hex_double(spec.rel_tol)
        << ";max_subdivisions=" << spec.max_subdivisions
        << ";split=" << hex_double(spec.singularity_split_radius) << ";breakpoints=";
    for (const double b : spec.breakpoints) out << hex_double(b) << ",";
    return out.str();
}

inline std::string row_hash(const std::string& family, double s, double x,
                            const oracle::QuadratureSpec& spec) {
    return oracle::config_hash(canonical(family, s, x, spec));
}

/// Settings shared by the generator and the readers.
inline oracle::QuadratureSpec profile_spec() {
    oracle::QuadratureSpec spec;
    spec.breakpoints = {-1.0, 1.0};
    return spec;
}

inline const char* header() { return "family,s,x,value,error_estimate,config_hash"; }

inline std::vector<Row> load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing oracle fixture " + path);
    std::string line;
    std::getline(in, line);
    if (line != header()) throw std::runtime_error("bad fixture header in " + path);
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Row r;
        std::getline(ss, r.family, ',');
        std::getline(ss, cell, ',');
        r.s = std::stod(cell);
        std::getline(ss, cell, ',');
        r.x = std::stod(cell);
        std::getline(ss, cell, ',');
        r.value = std::stod(cell);
        std::getline(ss, cell, ',');
        r.error_estimate = std::stod(cell);
        std::getline(ss, r.config_hash, ',');
        rows.push_back(r);
    }
    return rows;
}

/// Rows of one family and order; throws if any hash disagrees with the
/// current settings.
inline std::vector<Row> select(const std::vector<Row>& rows, const std::string& family, double s,
                               const oracle::QuadratureSpec& spec) {
    std::vector<Row> out;
    for (const auto& r : rows) {
        if (r.family != family || r.s != s) continue;
        if (r.config_hash != row_hash(family, s, r.x, spec)) {
            throw std::runtime_error("stale oracle fixture row for " + family);
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace lowregret::fixtures
