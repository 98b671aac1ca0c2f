#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "operator_core.hpp"

namespace renyi {

// 17 significant digits, enough to round-trip doubles exactly; infinities
// become the literals "inf" / "-inf".
inline std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON value token: numbers stay bare, non-finite values become strings.
inline std::string json_token(double x) {
    if (std::isinf(x) || std::isnan(x)) return "\"" + format_double(x) + "\"";
    return format_double(x);
}

inline std::string json_array(const std::vector<double>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += json_token(v[i]);
    }
    return s + "]";
}

inline std::string json_array(const std::vector<int>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

// Operator JSON schema: {"dim": d, "entries": [[re, im], ...]} with d*d
// row-major entries.
inline std::string operator_to_json(const PositiveOperator& A) {
    std::ostringstream os;
    const int d = A.dim();
    os << "{\"dim\": " << d << ", \"entries\": [";
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i || j) os << ", ";
            os << "[" << format_double(A.entries(i, j).real()) << ", "
               << format_double(A.entries(i, j).imag()) << "]";
        }
    os << "]}";
    return os.str();
}

inline void save_operator(const PositiveOperator& A, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw precondition_error("save_operator: cannot open " + path);
    out << operator_to_json(A) << "\n";
}

inline PositiveOperator load_operator(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw precondition_error("load_operator: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw precondition_error("load_operator: malformed JSON in " + path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
        throw precondition_error("load_operator: " + path + " must carry \"dim\" and \"entries\"");
    long long d = 0;
    try {
        d = j.at("dim").get<long long>();
    } catch (const std::exception&) {
        throw precondition_error("load_operator: " + path + ": \"dim\" is not an integer");
    }
    const auto& ent = j.at("entries");
    if (d < 1 || !ent.is_array() || static_cast<long long>(ent.size()) != d * d)
        throw precondition_error("load_operator: " + path + ": entries must hold dim^2 [re, im] pairs");
    Mat A(d, d);
    for (long long k = 0; k < d * d; ++k) {
        const auto& e = ent[static_cast<size_t>(k)];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw precondition_error("load_operator: " + path + ": entry " + std::to_string(k) +
                                     " is not an [re, im] pair");
        A(k / d, k % d) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
    try {
        return make_positive_operator(A);
    } catch (const precondition_error& e) {
        throw precondition_error("load_operator: " + path + ": " + e.what());
    }
}

// Real grid "start:end:step" (end inclusive up to step rounding) or a single
// value. Throws std::invalid_argument on malformed input.
inline std::vector<double> parse_real_grid(const std::string& s) {
    auto parse_one = [](const std::string& tok) {
        size_t pos = 0;
        double v;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("invalid number: " + tok);
        }
        if (pos != tok.size()) throw std::invalid_argument("invalid number: " + tok);
        return v;
    };
    size_t c1 = s.find(':');
    if (c1 == std::string::npos) return {parse_one(s)};
    size_t c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos || s.find(':', c2 + 1) != std::string::npos)
        throw std::invalid_argument("invalid range, expected start:end:step: " + s);
    double start = parse_one(s.substr(0, c1));
    double end = parse_one(s.substr(c1 + 1, c2 - c1 - 1));
    double step = parse_one(s.substr(c2 + 1));
    if (!(step > 0.0)) throw std::invalid_argument("range step must be positive: " + s);
    if (end < start - 1e-12) throw std::invalid_argument("range end is below start: " + s);
    long long count = static_cast<long long>(std::floor((end - start) / step + 1e-9));
    std::vector<double> out;
    out.reserve(static_cast<size_t>(count) + 1);
    for (long long k = 0; k <= count; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
}

// Integer list "lo..hi" or a single value.
inline std::vector<int> parse_n_list(const std::string& s) {
    auto parse_one = [](const std::string& tok) {
        size_t pos = 0;
        int v;
        try {
            v = std::stoi(tok, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("invalid integer: " + tok);
        }
        if (pos != tok.size()) throw std::invalid_argument("invalid integer: " + tok);
        return v;
    };
    size_t dd = s.find("..");
    if (dd == std::string::npos) {
        int v = parse_one(s);
        if (v < 1) throw std::invalid_argument("n must be >= 1: " + s);
        return {v};
    }
    int lo = parse_one(s.substr(0, dd));
    int hi = parse_one(s.substr(dd + 2));
    if (lo < 1 || hi < lo) throw std::invalid_argument("invalid n range, expected lo..hi: " + s);
    std::vector<int> out;
    out.reserve(static_cast<size_t>(hi - lo) + 1);
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
}

}  // namespace renyi
