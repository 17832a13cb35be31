#pragma once

// Exact scalar arithmetic: arbitrary-precision rationals and Gaussian
// rationals. The ground field "R" of the library is realized as Q, and
// "C" as Q[i]; every operation in the library is exact.

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace gcdef {

using BigInt = boost::multiprecision::cpp_int;
using Q = boost::multiprecision::cpp_rational;

inline std::string q_to_string(const Q& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

inline Q q_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Q(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator: " + s);
    if (den < 0) { num = -num; den = -den; }
    return Q(num, den);
}

// Gaussian rational a + bi.
struct QI {
    Q re{0};
    Q im{0};

    QI() = default;
    QI(Q r) : re(std::move(r)) {}
    QI(long r) : re(r) {}
    QI(int r) : re(r) {}
    QI(Q r, Q i) : re(std::move(r)), im(std::move(i)) {}

    static QI i() { return QI(Q(0), Q(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    QI conj() const { return QI(re, -im); }
    // |z|^2, always a nonnegative rational.
    Q norm() const { return re * re + im * im; }

    QI operator-() const { return QI(-re, -im); }
    QI operator+(const QI& o) const { return QI(re + o.re, im + o.im); }
    QI operator-(const QI& o) const { return QI(re - o.re, im - o.im); }
    QI operator*(const QI& o) const {
        return QI(re * o.re - im * o.im, re * o.im + im * o.re);
    }
    QI operator/(const QI& o) const {
        Q n = o.norm();
        if (n == 0) throw std::domain_error("division by zero Gaussian rational");
        QI num = *this * o.conj();
        return QI(num.re / n, num.im / n);
    }
    QI& operator+=(const QI& o) { re += o.re; im += o.im; return *this; }
    QI& operator-=(const QI& o) { re -= o.re; im -= o.im; return *this; }
    QI& operator*=(const QI& o) { *this = *this * o; return *this; }

    bool operator==(const QI& o) const { return re == o.re && im == o.im; }
    bool operator!=(const QI& o) const { return !(*this == o); }
    // Total order for canonical container keys (not a field order).
    bool operator<(const QI& o) const {
        if (re != o.re) return re < o.re;
        return im < o.im;
    }
};

inline std::string qi_to_string(const QI& z) {
    if (z.im == 0) return q_to_string(z.re);
    if (z.re == 0) return q_to_string(z.im) + "*i";
    std::string s = q_to_string(z.re);
    s += (z.im > 0) ? "+" : "-";
    Q a = z.im > 0 ? z.im : Q(-z.im);
    s += q_to_string(a) + "*i";
    return s;
}

}  // namespace gcdef
