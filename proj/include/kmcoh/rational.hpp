#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmcoh {

using Rational = mpq_class;
using Integer = mpz_class;

// Canonical n/d; mpq_class(n, d) alone does not reduce.
inline Rational frac(long n, long d) {
    if (d == 0) throw std::invalid_argument("zero denominator");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

inline std::string to_string(const Rational& r) { return r.get_str(); }

// Accepts "p", "p/q", "-p/q"; result is canonical.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational");
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    r.canonicalize();
    return r;
}

inline Rational binomial(long n, long k) {
    // generalized C(n,k) for integer n, k >= 0
    if (k < 0) return 0;
    Rational r = 1;
    for (long i = 0; i < k; ++i) {
        r *= Rational(n - i);
        r /= Rational(i + 1);
    }
    return r;
}

// Polynomial in the level parameter h; coefficients low degree first, no trailing zeros.
class PolyQ {
public:
    PolyQ() = default;
    PolyQ(int c) : PolyQ(Rational(c)) {}
    PolyQ(const Rational& c) {
        if (!kmcoh::is_zero(c)) c_.push_back(c);
    }
    static PolyQ monomial(const Rational& c, std::size_t deg) {
        PolyQ p;
        if (kmcoh::is_zero(c)) return p;
        p.c_.assign(deg + 1, Rational(0));
        p.c_[deg] = c;
        return p;
    }
    static PolyQ h() { return monomial(1, 1); }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    Rational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
    const std::vector<Rational>& coeffs() const { return c_; }

    Rational eval(const Rational& x) const {
        Rational r = 0;
        for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    PolyQ& operator+=(const PolyQ& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    PolyQ& operator-=(const PolyQ& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    PolyQ& operator*=(const PolyQ& o) {
        *this = *this * o;
        return *this;
    }
    friend PolyQ operator+(PolyQ a, const PolyQ& b) { return a += b; }
    friend PolyQ operator-(PolyQ a, const PolyQ& b) { return a -= b; }
    friend PolyQ operator-(PolyQ a) {
        for (auto& x : a.c_) x = -x;
        return a;
    }
    friend PolyQ operator*(const PolyQ& a, const PolyQ& b) {
        PolyQ r;
        if (a.is_zero() || b.is_zero()) return r;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        r.trim();
        return r;
    }
    friend bool operator==(const PolyQ& a, const PolyQ& b) { return a.c_ == b.c_; }
    friend bool operator!=(const PolyQ& a, const PolyQ& b) { return !(a == b); }

    std::string str() const {
        if (c_.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (kmcoh::is_zero(c_[i])) continue;
            if (!s.empty()) s += " + ";
            s += "(" + c_[i].get_str() + ")";
            if (i >= 1) s += "*h";
            if (i >= 2) s += "^" + std::to_string(i);
        }
        return s;
    }

private:
    void trim() {
        while (!c_.empty() && kmcoh::is_zero(c_.back())) c_.pop_back();
    }
    std::vector<Rational> c_;
};

inline bool is_zero(const PolyQ& p) { return p.is_zero(); }
inline std::ostream& operator<<(std::ostream& os, const PolyQ& p) { return os << p.str(); }

// Lift a Rational into a coefficient ring.
template <class C>
inline C lift(const Rational& r) {
    return C(r);
}

}  // namespace kmcoh
