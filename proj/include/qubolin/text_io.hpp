#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qubolin/matrix.hpp"

namespace qubolin {

// Plain text formats. Matrix: first line "R C", then R lines of C numbers
// separated by single spaces. Vector: first line "N", then N lines of one
// number each. Writers emit 17 significant digits and '\n' endings, which
// round-trips doubles exactly.

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double read_double_token(std::istream& in, const std::string& what) {
    double v;
    if (!(in >> v)) throw std::runtime_error("parse error: expected a number in " + what);
    if (!std::isfinite(v)) throw std::runtime_error("parse error: non-finite value in " + what);
    return v;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

}  // namespace detail

inline void write_matrix(std::ostream& out, const DenseMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << detail::format_double(m(i, j));
        }
        out << '\n';
    }
}

inline void write_matrix(const std::string& path, const DenseMatrix& m) {
    auto out = detail::open_out(path);
    write_matrix(out, m);
}

inline DenseMatrix read_matrix(std::istream& in, const std::string& what = "matrix") {
    long long rows = -1, cols = -1;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0)
        throw std::runtime_error("parse error: bad header in " + what);
    DenseMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    for (double& e : m.data()) e = detail::read_double_token(in, what);
    return m;
}

inline DenseMatrix read_matrix(const std::string& path) {
    auto in = detail::open_in(path);
    return read_matrix(in, path);
}

inline void write_vector(std::ostream& out, const Vector& v) {
    out << v.size() << '\n';
    for (double e : v) out << detail::format_double(e) << '\n';
}

inline void write_vector(const std::string& path, const Vector& v) {
    auto out = detail::open_out(path);
    write_vector(out, v);
}

inline Vector read_vector(std::istream& in, const std::string& what = "vector") {
    long long n = -1;
    if (!(in >> n) || n < 0) throw std::runtime_error("parse error: bad header in " + what);
    Vector v(static_cast<std::size_t>(n));
    for (double& e : v) e = detail::read_double_token(in, what);
    return v;
}

inline Vector read_vector(const std::string& path) {
    auto in = detail::open_in(path);
    return read_vector(in, path);
}

}  // namespace qubolin
