#ifndef PDR_POLY_HPP
#define PDR_POLY_HPP

#include <pdr/interval.hpp>

#include <cassert>
#include <cstddef>
#include <vector>

// Dense bivariate polynomials truncated by total degree, templated on the
// scalar (double for the fast path, Interval for certified work).
// Coefficients are stored in centered coordinates; the expansion point
// lives in the enclosing FuncBall / map object, not here.

namespace pdr {

template <class T>
struct scalar_ops {
    static double mag(const T& x);
    static double mid(const T& x);
};

template <>
struct scalar_ops<double> {
    static double mag(double x) { return std::fabs(x); }
    static double mid(double x) { return x; }
};

template <>
struct scalar_ops<Interval> {
    static double mag(const Interval& x) { return x.mag(); }
    static double mid(const Interval& x) { return x.mid(); }
};

inline constexpr int tri(int d) { return d * (d + 1) / 2; }

template <class T>
class Poly2 {
public:
    Poly2() : deg_(0), c_(1, T(0.0)) {}
    explicit Poly2(int degree) : deg_(degree), c_(tri(degree + 1), T(0.0)) {}

    int degree() const { return deg_; }
    std::size_t size() const { return c_.size(); }

    const T& at(int i, int j) const { return c_[tri(i + j) + j]; }
    T& at(int i, int j) { return c_[tri(i + j) + j]; }
    const T& operator[](std::size_t k) const { return c_[k]; }
    T& operator[](std::size_t k) { return c_[k]; }

    static Poly2 constant(int degree, T v)
    {
        Poly2 p(degree);
        p.at(0, 0) = v;
        return p;
    }

    static Poly2 monomial(int degree, int i, int j, T v)
    {
        Poly2 p(degree);
        p.at(i, j) = v;
        return p;
    }

    Poly2 resized(int degree) const
    {
        Poly2 p(degree);
        for (int d = 0; d <= std::min(deg_, degree); ++d)
            for (int j = 0; j <= d; ++j) p.at(d - j, j) = at(d - j, j);
        return p;
    }

    Poly2 operator+(const Poly2& o) const
    {
        assert(deg_ == o.deg_);
        Poly2 r(deg_);
        for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] = c_[k] + o.c_[k];
        return r;
    }

    Poly2 operator-(const Poly2& o) const
    {
        assert(deg_ == o.deg_);
        Poly2 r(deg_);
        for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] = c_[k] - o.c_[k];
        return r;
    }

    Poly2 operator*(const T& s) const
    {
        Poly2 r(deg_);
        for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] = c_[k] * s;
        return r;
    }

    void axpy(const T& s, const Poly2& o)
    {
        assert(deg_ == o.deg_);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += s * o.c_[k];
    }

    // Truncated product. Mass of the dropped terms, weighted by
    // outer_radius^degree, is reported through drop_mass (upper bound) when
    // requested; the fast path passes nullptr and skips the bookkeeping.
    Poly2 mul(const Poly2& o, double outer_radius = 0.0, double* drop_mass = nullptr) const
    {
        assert(deg_ == o.deg_);
        Poly2 r(deg_);
        Interval dropped(0.0);
        std::vector<Interval> rowmass;  // per-degree mass of o, times R^d offsets
        std::vector<Interval> rpow;
        if (drop_mass) {
            rpow.assign(2 * deg_ + 1, Interval(1.0));
            for (int d = 1; d <= 2 * deg_; ++d) rpow[d] = rpow[d - 1] * Interval(outer_radius);
            rowmass.assign(deg_ + 1, Interval(0.0));
            for (int d2 = 0; d2 <= deg_; ++d2)
                for (int j2 = 0; j2 <= d2; ++j2)
                    rowmass[d2] += Interval(scalar_ops<T>::mag(o.c_[tri(d2) + j2]));
        }
        for (int d1 = 0; d1 <= deg_; ++d1) {
            for (int j1 = 0; j1 <= d1; ++j1) {
                const T& a = c_[tri(d1) + j1];
                if (scalar_ops<T>::mag(a) == 0.0) continue;
                for (int d2 = 0; d2 <= deg_ - d1; ++d2) {
                    const int base = tri(d1 + d2) + j1;
                    for (int j2 = 0; j2 <= d2; ++j2)
                        r.c_[base + j2] += a * o.c_[tri(d2) + j2];
                }
                if (drop_mass) {
                    const Interval am(scalar_ops<T>::mag(a));
                    for (int d2 = deg_ - d1 + 1; d2 <= deg_; ++d2)
                        dropped += am * rowmass[d2] * rpow[d1 + d2];
                }
            }
        }
        if (drop_mass) *drop_mass = dropped.hi;
        return r;
    }

    // Evaluate at a centered point via nested Horner over y-columns.
    template <class S>
    S eval(const S& dx, const S& dy) const
    {
        // column polynomials A_j(dx) = sum_i c_ij dx^i, then Horner in dy
        S acc(0.0);
        for (int j = deg_; j >= 0; --j) {
            S col(0.0);
            for (int i = deg_ - j; i >= 0; --i) col = col * dx + S(at(i, j));
            acc = acc * dy + col;
        }
        return acc;
    }

    Poly2 partial(int axis) const
    {
        Poly2 r(deg_);
        for (int d = 1; d <= deg_; ++d) {
            for (int j = 0; j <= d; ++j) {
                const int i = d - j;
                const T& v = c_[tri(d) + j];
                if (axis == 1) {
                    if (i >= 1) r.at(i - 1, j) += v * T(double(i));
                } else {
                    if (j >= 1) r.at(i, j - 1) += v * T(double(j));
                }
            }
        }
        return r;
    }

    // l1 coefficient norm weighted by radius^degree; upper bound.
    double l1_norm(double radius) const
    {
        Interval acc(0.0), rp(1.0);
        for (int d = 0; d <= deg_; ++d) {
            Interval m(0.0);
            for (int j = 0; j <= d; ++j) m += Interval(scalar_ops<T>::mag(c_[tri(d) + j]));
            acc += m * rp;
            rp = rp * Interval(radius);
        }
        return acc.hi;
    }

    double max_coeff_mag() const
    {
        double m = 0.0;
        for (const auto& v : c_) m = std::max(m, scalar_ops<T>::mag(v));
        return m;
    }

private:
    int deg_;
    std::vector<T> c_;
};

// f(U(.,.), V(.,.)) with U, V already expressed in f's centered coordinates.
template <class T>
Poly2<T> poly_compose(const Poly2<T>& f, const Poly2<T>& U, const Poly2<T>& V)
{
    const int N = f.degree();
    std::vector<Poly2<T>> vp;
    vp.reserve(N + 1);
    vp.push_back(Poly2<T>::constant(N, T(1.0)));
    for (int j = 1; j <= N; ++j) vp.push_back(vp[j - 1].mul(V));
    Poly2<T> res(N);
    Poly2<T> upow = Poly2<T>::constant(N, T(1.0));
    for (int i = 0; i <= N; ++i) {
        Poly2<T> w(N);
        bool any = false;
        for (int j = 0; i + j <= N; ++j) {
            const T& cij = f.at(i, j);
            if (scalar_ops<T>::mag(cij) == 0.0) continue;
            w.axpy(cij, vp[j]);
            any = true;
        }
        if (any) res = res + upow.mul(w);
        if (i < N) upow = upow.mul(U);
    }
    return res;
}

// series reciprocal by Newton-Schulz; the constant term must be nonzero
template <class T>
Poly2<T> poly_reciprocal(const Poly2<T>& w)
{
    const T c0 = w.at(0, 0);
    if (scalar_ops<T>::mag(c0) == 0.0)
        throw domain_error("poly_reciprocal: zero constant term");
    const int N = w.degree();
    Poly2<T> r = Poly2<T>::constant(N, T(1.0) / c0);
    int correct = 1;
    while (correct <= N) {
        // r <- r (2 - w r), doubles the number of correct orders
        Poly2<T> t = w.mul(r) * T(-1.0);
        t.at(0, 0) += T(2.0);
        r = r.mul(t);
        correct *= 2;
    }
    return r;
}

using PolyD = Poly2<double>;
using PolyI = Poly2<Interval>;

inline PolyD midpoint(const PolyI& p)
{
    PolyD r(p.degree());
    for (std::size_t k = 0; k < p.size(); ++k) r[k] = p[k].mid();
    return r;
}

inline PolyI exact(const PolyD& p)
{
    PolyI r(p.degree());
    for (std::size_t k = 0; k < p.size(); ++k) r[k] = Interval(p[k]);
    return r;
}

// Symmetric-subspace machinery: the constraint is
//   (i+1) c_{i+1,j} = (j+1) c_{j+1,i}   for all i, j >= 0,
// i.e. for a >= 1 the pair (a,b) <-> (b+1,a-1) lies on the line
// (c_ab, c_partner) = t (b+1, a). Coefficients with a = 0 are free.
struct SymPair {
    int a, b;    // representative index, a >= 1
    int p, q;    // partner (b+1, a-1); equals (a,b) on the diagonal a == b+1
};

// The partner of (a,b) has the same total degree, so truncation never
// splits an orbit.
inline std::vector<SymPair> symmetric_pairs(int deg)
{
    std::vector<SymPair> out;
    for (int d = 1; d <= deg; ++d) {
        for (int b = 0; b <= d - 1; ++b) {
            const int a = d - b;
            const int p = b + 1, q = a - 1;
            if (std::make_pair(p, q) < std::make_pair(a, b)) continue;
            out.push_back({a, b, p, q});
        }
    }
    return out;
}

template <class T>
Poly2<T> symmetric_projection(const Poly2<T>& f)
{
    Poly2<T> r = f;
    for (const SymPair& s : symmetric_pairs(f.degree())) {
        if (s.p == s.a && s.q == s.b) continue;  // diagonal orbit, already consistent
        const double w1 = double(s.b + 1), w2 = double(s.a);
        const T den(w1 * w1 + w2 * w2);
        const T t = f.at(s.a, s.b) * T(w1) + f.at(s.p, s.q) * T(w2);
        r.at(s.a, s.b) = t * T(w1) / den;
        r.at(s.p, s.q) = t * T(w2) / den;
    }
    return r;
}

template <class T>
bool is_symmetric(const Poly2<T>& f, double tol)
{
    for (const SymPair& s : symmetric_pairs(f.degree())) {
        const double lhs = scalar_ops<T>::mid(f.at(s.a, s.b)) * double(s.a);
        const double rhs = scalar_ops<T>::mid(f.at(s.p, s.q)) * double(s.b + 1);
        if (std::fabs(lhs - rhs) > tol * (1.0 + std::fabs(lhs) + std::fabs(rhs))) return false;
    }
    return true;
}

} // namespace pdr

#endif
