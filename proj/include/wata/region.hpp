#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace wata {

using Rational = boost::rational<std::int64_t>;

inline Rational floor_of(const Rational& v) {
    std::int64_t q = v.numerator() / v.denominator();
    if (v.numerator() < 0 && q * v.denominator() != v.numerator()) --q;
    return Rational(q);
}

inline Rational fract(const Rational& v) { return v - floor_of(v); }

// Regions of [0,inf) for a given d_max, numbered in increasing order:
// index 2d is the point {d}, index 2d+1 is the open interval (d,d+1) (written I_{d+1}),
// and index 2*d_max+1 is (d_max, inf) (written I_inf).
struct Region {
    int index = 0;

    bool is_point() const { return index % 2 == 0; }
    bool is_interval() const { return index % 2 == 1; }
    bool is_unbounded(int d_max) const { return index == 2 * d_max + 1; }
    // For a point {d} returns d; for I_d returns d.
    int d() const { return is_point() ? index / 2 : index / 2 + 1; }

    static Region point(int d) { return Region{2 * d}; }
    static Region interval(int d) { return Region{2 * d - 1}; }
    static Region unbounded(int d_max) { return Region{2 * d_max + 1}; }
    static int count(int d_max) { return 2 * (d_max + 1); }

    // A clock value lying in this region.
    Rational sample(int d_max) const {
        if (is_point()) return Rational(index / 2);
        if (is_unbounded(d_max)) return Rational(2 * d_max + 1, 2);
        return Rational(index, 2);
    }

    std::string name(int d_max) const {
        if (is_point()) return "{" + std::to_string(index / 2) + "}";
        if (is_unbounded(d_max)) return "Iinf";
        return "I" + std::to_string(d());
    }

    friend bool operator==(const Region&, const Region&) = default;
};

inline Region region_of(const Rational& v, int d_max) {
    if (v > Rational(d_max)) return Region::unbounded(d_max);
    Rational fl = floor_of(v);
    int d = static_cast<int>(fl.numerator());
    if (fl == v) return Region::point(d);
    return Region{2 * d + 1};
}

}  // namespace wata
