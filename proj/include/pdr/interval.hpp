#ifndef PDR_INTERVAL_HPP
#define PDR_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>
#include <stdexcept>
#include <string>

// Directed-rounding interval arithmetic. Rounding is emulated by next-float
// nudging: every non-exact endpoint is pushed one ulp outward, so results
// stay sound under the default round-to-nearest mode and no global FP state
// is touched. Exactness is detected with fma/error-term tricks where cheap,
// which keeps dyadic arithmetic (box geometry, powers of two) tight.

namespace pdr {

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double next_up(double x)
{
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline double next_down(double x)
{
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

// k ulps outward; used for libm calls whose last-ulp behaviour is unverified.
inline double nudge_up(double x, int k)
{
    for (int i = 0; i < k; ++i) x = next_up(x);
    return x;
}

inline double nudge_down(double x, int k)
{
    for (int i = 0; i < k; ++i) x = next_down(x);
    return x;
}

inline bool add_exact(double a, double b, double s)
{
    // Fast2Sum error term; valid since |a|,|b| finite and s = fl(a+b).
    const double bb = s - a;
    return (s - bb == a) && (bb == b);
}

inline bool mul_exact(double a, double b, double p)
{
    return std::fma(a, b, -p) == 0.0;
}

} // namespace detail

struct Interval {
    double lo;
    double hi;

    Interval() : lo(0.0), hi(0.0) {}
    Interval(double v) : lo(v), hi(v) {}
    Interval(double l, double h) : lo(l), hi(h)
    {
        if (!(l <= h))
            throw domain_error("Interval: lo > hi or NaN endpoint");
    }

    static Interval hull(double a, double b)
    {
        return Interval(std::min(a, b), std::max(a, b));
    }

    double mid() const
    {
        const double m = 0.5 * (lo + hi);
        return std::isfinite(m) ? m : 0.5 * lo + 0.5 * hi;
    }
    double width() const { return hi - lo; }
    double rad() const { return 0.5 * (hi - lo); }

    // mag = sup |x|, mig = inf |x| over the interval.
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    double mig() const
    {
        if (lo > 0.0) return lo;
        if (hi < 0.0) return -hi;
        return 0.0;
    }

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
    bool strictly_inside(const Interval& o) const { return o.lo < lo && hi < o.hi; }
    bool disjoint(const Interval& o) const { return hi < o.lo || o.hi < lo; }
};

inline Interval hull(const Interval& a, const Interval& b)
{
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline bool try_intersect(const Interval& a, const Interval& b, Interval& out)
{
    const double l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
    if (l > h) return false;
    out = Interval(l, h);
    return true;
}

inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }

inline Interval operator+(const Interval& a, const Interval& b)
{
    double l = a.lo + b.lo, h = a.hi + b.hi;
    if (!detail::add_exact(a.lo, b.lo, l)) l = detail::next_down(l);
    if (!detail::add_exact(a.hi, b.hi, h)) h = detail::next_up(h);
    if (!std::isfinite(l) || !std::isfinite(h))
        throw domain_error("interval add: non-finite endpoint");
    return Interval(l, h);
}

inline Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

inline Interval operator*(const Interval& a, const Interval& b)
{
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    double l = std::min(std::min(p1, p2), std::min(p3, p4));
    double h = std::max(std::max(p1, p2), std::max(p3, p4));
    // The min/max pick one of the four products; exactness of that one product
    // decides whether the endpoint needs a nudge.
    auto lex = [&](double p, double x, double y) { return p == l && detail::mul_exact(x, y, p); };
    auto hex = [&](double p, double x, double y) { return p == h && detail::mul_exact(x, y, p); };
    if (!(lex(p1, a.lo, b.lo) || lex(p2, a.lo, b.hi) || lex(p3, a.hi, b.lo) || lex(p4, a.hi, b.hi)))
        l = detail::next_down(l);
    if (!(hex(p1, a.lo, b.lo) || hex(p2, a.lo, b.hi) || hex(p3, a.hi, b.lo) || hex(p4, a.hi, b.hi)))
        h = detail::next_up(h);
    if (!std::isfinite(l) || !std::isfinite(h))
        throw domain_error("interval mul: non-finite endpoint");
    return Interval(l, h);
}

inline Interval operator/(const Interval& a, const Interval& b)
{
    if (b.contains_zero())
        throw domain_error("interval div: denominator contains zero");
    const double q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
    double l = std::min(std::min(q1, q2), std::min(q3, q4));
    double h = std::max(std::max(q1, q2), std::max(q3, q4));
    auto exact = [](double q, double x, double y) { return std::fma(q, y, -x) == 0.0; };
    auto lex = [&](double q, double x, double y) { return q == l && exact(q, x, y); };
    auto hex = [&](double q, double x, double y) { return q == h && exact(q, x, y); };
    if (!(lex(q1, a.lo, b.lo) || lex(q2, a.lo, b.hi) || lex(q3, a.hi, b.lo) || lex(q4, a.hi, b.hi)))
        l = detail::next_down(l);
    if (!(hex(q1, a.lo, b.lo) || hex(q2, a.lo, b.hi) || hex(q3, a.hi, b.lo) || hex(q4, a.hi, b.hi)))
        h = detail::next_up(h);
    if (!std::isfinite(l) || !std::isfinite(h))
        throw domain_error("interval div: non-finite endpoint");
    return Interval(l, h);
}

inline Interval& operator+=(Interval& a, const Interval& b) { a = a + b; return a; }
inline Interval& operator-=(Interval& a, const Interval& b) { a = a - b; return a; }
inline Interval& operator*=(Interval& a, const Interval& b) { a = a * b; return a; }
inline Interval& operator/=(Interval& a, const Interval& b) { a = a / b; return a; }

inline Interval sqr(const Interval& a)
{
    const double m = a.mig(), M = a.mag();
    double l = m * m, h = M * M;
    if (!detail::mul_exact(m, m, l)) l = detail::next_down(l);
    if (!detail::mul_exact(M, M, h)) h = detail::next_up(h);
    return Interval(l, h);
}

inline Interval sqrt(const Interval& a)
{
    if (a.lo < 0.0)
        throw domain_error("interval sqrt: negative argument");
    double l = std::sqrt(a.lo), h = std::sqrt(a.hi);
    if (std::fma(l, l, -a.lo) != 0.0) l = detail::next_down(l);
    if (std::fma(h, h, -a.hi) != 0.0) h = detail::next_up(h);
    return Interval(std::max(l, 0.0), h);
}

// log/exp: monotone libm enclosure nudged 4 ulps outward (documented slack
// well below 1e-14 relative, tolerated by every dimension-type bound here).
inline Interval log(const Interval& a)
{
    if (a.lo <= 0.0)
        throw domain_error("interval log: non-positive argument");
    return Interval(detail::nudge_down(std::log(a.lo), 4), detail::nudge_up(std::log(a.hi), 4));
}

inline Interval exp(const Interval& a)
{
    return Interval(std::max(0.0, detail::nudge_down(std::exp(a.lo), 4)),
                    detail::nudge_up(std::exp(a.hi), 4));
}

inline Interval abs(const Interval& a) { return Interval(a.mig(), a.mag()); }

inline Interval min(const Interval& a, const Interval& b)
{
    return Interval(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}

inline Interval max(const Interval& a, const Interval& b)
{
    return Interval(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

// Integer powers; even powers route through sqr so intervals straddling
// zero stay tight.
inline Interval pow_n(const Interval& a, int n)
{
    if (n == 0) return Interval(1.0);
    if (n < 0) return Interval(1.0) / pow_n(a, -n);
    Interval s = sqr(a);
    Interval r = (n % 2 == 0) ? Interval(1.0) : a;
    for (int m = n / 2; m > 0; m /= 2) {
        if (m % 2 == 1) r = r * s;
        if (m > 1) s = sqr(s);
    }
    return r;
}

inline Interval widened(const Interval& a, double eps)
{
    return Interval(a.lo - eps, a.hi + eps);
}

// Shortest decimal string that round-trips to the exact binary value.
inline std::string format_shortest(double x)
{
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// --- 2-vectors and 2x2 matrices over intervals ------------------------------

struct IVec2 {
    Interval x, u;

    IVec2() = default;
    IVec2(Interval a, Interval b) : x(a), u(b) {}

    IVec2 operator+(const IVec2& o) const { return {x + o.x, u + o.u}; }
    IVec2 operator-(const IVec2& o) const { return {x - o.x, u - o.u}; }

    bool contains(const IVec2& o) const { return x.contains(o.x) && u.contains(o.u); }
    bool disjoint(const IVec2& o) const { return x.disjoint(o.x) || u.disjoint(o.u); }
    IVec2 mid_point() const { return {Interval(x.mid()), Interval(u.mid())}; }
    double max_rad() const { return std::max(x.rad(), u.rad()); }
};

inline IVec2 hull(const IVec2& a, const IVec2& b)
{
    return {hull(a.x, b.x), hull(a.u, b.u)};
}

struct IMat2 {
    Interval a, b, c, d;  // [[a, b], [c, d]]

    IMat2() = default;
    IMat2(Interval a_, Interval b_, Interval c_, Interval d_) : a(a_), b(b_), c(c_), d(d_) {}

    static IMat2 identity() { return {Interval(1.0), Interval(0.0), Interval(0.0), Interval(1.0)}; }
    static IMat2 diagonal(Interval p, Interval q) { return {p, Interval(0.0), Interval(0.0), q}; }

    IVec2 operator*(const IVec2& v) const { return {a * v.x + b * v.u, c * v.x + d * v.u}; }
    IMat2 operator*(const IMat2& m) const
    {
        return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    }

    Interval det() const { return a * d - b * c; }
    Interval trace() const { return a + d; }
};

inline Interval norm2_bound(const IVec2& v)
{
    return sqrt(sqr(v.x) + sqr(v.u));
}

// Exact 2x2 singular values evaluated in interval arithmetic:
//   2 s_max^2 = e + sqrt(f^2 + g^2),   2 s_min^2 = e - sqrt(f^2 + g^2),
// with e = a^2+b^2+c^2+d^2, f = a^2+b^2-c^2-d^2, g = 2(ac+bd).
inline void singular_values(const IMat2& m, Interval& smax, Interval& smin)
{
    const Interval a2 = sqr(m.a), b2 = sqr(m.b), c2 = sqr(m.c), d2 = sqr(m.d);
    const Interval e = a2 + b2 + c2 + d2;
    const Interval f = (a2 + b2) - (c2 + d2);
    const Interval g = Interval(2.0) * (m.a * m.c + m.b * m.d);
    const Interval h = sqrt(sqr(f) + sqr(g));
    const Interval half(0.5);
    smax = sqrt(max(Interval(0.0), half * (e + h)));
    Interval lo_arg = half * (e - h);
    if (lo_arg.lo < 0.0) lo_arg = Interval(0.0, std::max(0.0, lo_arg.hi));
    smin = sqrt(lo_arg);
    // |det| = smax*smin can sharpen the lower singular value when the
    // difference above cancels badly.
    const Interval ad = abs(m.det());
    if (smax.lo > 0.0) {
        const Interval alt = ad / smax;
        if (alt.lo > smin.lo) smin = Interval(alt.lo, smin.hi);
    }
}

inline Interval opnorm_bound(const IMat2& m)
{
    Interval smax, smin;
    singular_values(m, smax, smin);
    return smax;
}

inline Interval min_singular_bound(const IMat2& m)
{
    Interval smax, smin;
    singular_values(m, smax, smin);
    return smin;
}

} // namespace pdr

#endif
