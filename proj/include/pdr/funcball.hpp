#ifndef PDR_FUNCBALL_HPP
#define PDR_FUNCBALL_HPP

#include <pdr/interval.hpp>
#include <pdr/poly.hpp>

#include <iostream>
#include <sstream>
#include <string>

// FuncBall models a ball in the space of bivariate functions analytic on a
// complex bi-disk: a truncated series with interval coefficients plus an l1
// tail bound. Coefficients are taken in coordinates centered at the
// expansion point; the tail field bounds sum_{i+j>N} |c_ij| rho_outer^(i+j)
// over every member. Two radii are carried: rho (working) and rho_outer
// (analyticity), the gap pays for Cauchy estimates in partial().

namespace pdr {

struct BallGeometry {
    double cx = 0.5, cy = 0.5;
    double rho = 1.6;
    double rho_outer = 1.75;

    bool operator==(const BallGeometry& o) const
    {
        return cx == o.cx && cy == o.cy && rho == o.rho && rho_outer == o.rho_outer;
    }
};

class FuncBall {
public:
    FuncBall() : poly_(0), tail_(0.0) {}
    explicit FuncBall(int degree, BallGeometry g = BallGeometry())
        : poly_(degree), tail_(0.0), geom_(g)
    {
        check_geom();
    }
    FuncBall(PolyI p, double tail, BallGeometry g = BallGeometry())
        : poly_(std::move(p)), tail_(tail), geom_(g)
    {
        if (tail_ < 0.0) throw domain_error("FuncBall: negative tail");
        check_geom();
    }

    const PolyI& poly() const { return poly_; }
    PolyI& poly() { return poly_; }
    double tail() const { return tail_; }
    void set_tail(double t)
    {
        if (t < 0.0) throw domain_error("FuncBall: negative tail");
        tail_ = t;
    }
    const BallGeometry& geom() const { return geom_; }
    int degree() const { return poly_.degree(); }

    // upper bound for the l1 norm at radius r <= rho_outer
    double l1_at(double r) const
    {
        Interval acc(poly_.l1_norm(r));
        if (tail_ > 0.0) {
            const Interval q = Interval(r) / Interval(geom_.rho_outer);
            acc += Interval(tail_) * pow_n(q, degree() + 1);
        }
        return acc.hi;
    }

    double norm_rho() const { return l1_at(geom_.rho); }

private:
    void check_geom() const
    {
        if (!(geom_.rho > 0.0) || !(geom_.rho_outer > geom_.rho))
            throw domain_error("FuncBall: need rho_outer > rho > 0");
    }

    PolyI poly_;
    double tail_;
    BallGeometry geom_;
};

namespace detail {

inline void require_compatible(const FuncBall& f, const FuncBall& g)
{
    if (!(f.geom() == g.geom()) || f.degree() != g.degree())
        throw domain_error("FuncBall: incompatible geometry");
}

// sup_{M >= K} M r^(M-1) / R^M, the sharp per-degree Cauchy factor used to
// bound derivative tails. Unimodal in M, peak near -1/log(r/R).
inline double cauchy_derivative_factor(double r, double R, int K)
{
    const Interval q = Interval(r) / Interval(R);
    if (!(q.hi < 1.0)) throw domain_error("cauchy factor: r >= R");
    const double mstar = -1.0 / std::log(q.hi);
    double best = 0.0;
    for (int m = std::max(K, int(mstar) - 1); m <= std::max(K, int(mstar) + 2); ++m) {
        const Interval v = Interval(double(m)) * pow_n(q, m - 1) / Interval(R);
        best = std::max(best, v.hi);
    }
    // the generic Cauchy quotient is also valid and covers the tail of the sup
    const Interval generic = Interval(1.0) / (Interval(R) - Interval(r));
    return std::min(best == 0.0 ? generic.hi : best, generic.hi);
}

// sum_{M >= K} (M+1) q^M = q^K ((K+1)(1-q) + q) / (1-q)^2, upper bound
inline double weighted_geometric_tail(double q, int K)
{
    if (!(q < 1.0)) throw domain_error("geometric tail: q >= 1");
    const Interval Q(q);
    const Interval one(1.0);
    const Interval v =
        pow_n(Q, K) * ((Interval(double(K + 1)) * (one - Q)) + Q) / sqr(one - Q);
    return v.hi;
}

} // namespace detail

// Enclosure of f over a raw-coordinate box; the box must stay within the
// working bi-disk.
inline Interval eval(const FuncBall& f, const IVec2& p)
{
    const Interval dx = p.x - Interval(f.geom().cx);
    const Interval dy = p.u - Interval(f.geom().cy);
    const double r = std::max(dx.mag(), dy.mag());
    if (r > f.geom().rho)
        throw domain_error("FuncBall eval: point escapes the working bi-disk");
    Interval v = f.poly().eval(dx, dy);
    if (f.tail() > 0.0) {
        const Interval q = Interval(r) / Interval(f.geom().rho_outer);
        const double t = (Interval(f.tail()) * pow_n(q, f.degree() + 1)).hi;
        v += Interval(-t, t);
    }
    return v;
}

inline FuncBall operator+(const FuncBall& f, const FuncBall& g)
{
    detail::require_compatible(f, g);
    return FuncBall(f.poly() + g.poly(), (Interval(f.tail()) + Interval(g.tail())).hi,
                    f.geom());
}

inline FuncBall operator-(const FuncBall& f, const FuncBall& g)
{
    detail::require_compatible(f, g);
    return FuncBall(f.poly() - g.poly(), (Interval(f.tail()) + Interval(g.tail())).hi,
                    f.geom());
}

inline FuncBall scale(const FuncBall& f, const Interval& s)
{
    return FuncBall(f.poly() * s, (Interval(f.tail()) * Interval(s.mag())).hi, f.geom());
}

inline FuncBall mul(const FuncBall& f, const FuncBall& g)
{
    detail::require_compatible(f, g);
    const double R = f.geom().rho_outer;
    double dropped = 0.0;
    PolyI p = f.poly().mul(g.poly(), R, &dropped);
    // cross terms polynomial x tail and tail x tail, all l1 at R
    Interval t(dropped);
    if (f.tail() > 0.0 || g.tail() > 0.0) {
        const Interval nf(f.poly().l1_norm(R)), ng(g.poly().l1_norm(R));
        t += Interval(f.tail()) * ng + Interval(g.tail()) * nf +
             Interval(f.tail()) * Interval(g.tail());
    }
    return FuncBall(std::move(p), t.hi, f.geom());
}

inline FuncBall partial(const FuncBall& f, int axis)
{
    const double rho = f.geom().rho, R = f.geom().rho_outer;
    if (!(R > rho)) throw domain_error("partial: radii equal, no room for Cauchy estimate");
    PolyI p = f.poly().partial(axis);
    BallGeometry g = f.geom();
    double t = 0.0;
    if (f.tail() > 0.0) {
        g.rho_outer = std::sqrt(rho * R);  // geometric mean keeps later Cauchy room
        t = (Interval(f.tail()) *
             Interval(detail::cauchy_derivative_factor(g.rho_outer, R, f.degree() + 1)))
                .hi;
    }
    return FuncBall(std::move(p), t, g);
}

// f(u(.,.), v(.,.)). u and v share geometry; their ranges (in l1 sense at
// their own analyticity radius) must stay within f's analyticity bi-disk.
inline FuncBall compose2(const FuncBall& f, const FuncBall& u, const FuncBall& v)
{
    detail::require_compatible(u, v);
    if (f.degree() != u.degree())
        throw domain_error("compose2: degree mismatch");
    const int N = f.degree();
    const BallGeometry& gi = u.geom();   // inner (result) geometry
    const BallGeometry& go = f.geom();   // outer function geometry
    const double R = gi.rho_outer;

    // centered inner functions
    FuncBall U = u, V = v;
    U.poly().at(0, 0) -= Interval(go.cx);
    V.poly().at(0, 0) -= Interval(go.cy);

    // ranges over the working bi-disk must stay within f's analyticity bi-disk
    if (!(std::max(U.l1_at(gi.rho), V.l1_at(gi.rho)) < go.rho_outer))
        throw domain_error("compose2: inner range escapes the analyticity bi-disk");

    std::vector<FuncBall> upow, vpow;
    upow.reserve(N + 1);
    vpow.reserve(N + 1);
    upow.push_back(FuncBall(PolyI::constant(N, Interval(1.0)), 0.0, gi));
    vpow.push_back(upow[0]);
    for (int k = 1; k <= N; ++k) {
        upow.push_back(mul(upow[k - 1], U));
        vpow.push_back(mul(vpow[k - 1], V));
    }

    // result = sum_i U^i * (sum_j c_ij V^j)
    FuncBall res(PolyI(N), 0.0, gi);
    Interval tail_acc(0.0);
    for (int i = 0; i <= N; ++i) {
        FuncBall w(PolyI(N), 0.0, gi);
        Interval wt(0.0);
        bool any = false;
        for (int j = 0; j + i <= N; ++j) {
            const Interval& cij = f.poly().at(i, j);
            if (cij.mag() == 0.0) continue;
            w.poly().axpy(cij, vpow[j].poly());
            wt += Interval(cij.mag()) * Interval(vpow[j].tail());
            any = true;
        }
        if (!any) continue;
        w.set_tail(wt.hi);
        FuncBall term = mul(upow[i], w);
        res.poly() = res.poly() + term.poly();
        tail_acc += Interval(term.tail());
    }
    res.set_tail(tail_acc.hi);

    // remainder of f's own tail pushed through the composition: analytic on
    // the R bi-disk with sup bound b, so Cauchy gives |d_ij| <= b / R^(i+j)
    if (f.tail() > 0.0) {
        const double rbar = std::max(U.l1_at(R), V.l1_at(R));
        if (!(rbar < go.rho_outer))
            throw domain_error("compose2: tail push needs range inside the outer bi-disk");
        const Interval q = Interval(rbar) / Interval(go.rho_outer);
        const double b = (Interval(f.tail()) * pow_n(q, N + 1)).hi;
        BallGeometry gr = gi;
        gr.rho_outer = std::sqrt(gi.rho * R);
        Interval rp(1.0);
        const Interval Ri(R);
        PolyI rc = res.poly();
        for (int d = 0; d <= N; ++d) {
            const double w = (Interval(b) / rp).hi;
            for (int j = 0; j <= d; ++j) rc.at(d - j, j) += Interval(-w, w);
            rp = rp * Ri;
        }
        const Interval qq = Interval(gr.rho_outer) / Interval(R);
        const double extra =
            (Interval(b) * Interval(detail::weighted_geometric_tail(qq.hi, N + 1))).hi;
        return FuncBall(std::move(rc), (Interval(res.tail()) + Interval(extra)).hi, gr);
    }
    return res;
}

// 1/f via a Neumann series around the constant coefficient.
inline FuncBall reciprocal(const FuncBall& f)
{
    const int N = f.degree();
    const BallGeometry& g = f.geom();
    const IVec2 full_box(Interval(g.cx - g.rho, g.cx + g.rho),
                         Interval(g.cy - g.rho, g.cy + g.rho));
    if (eval(f, full_box).contains_zero())
        throw domain_error("reciprocal: range contains zero");

    const Interval c0 = f.poly().at(0, 0);
    if (c0.contains_zero()) throw domain_error("reciprocal: constant term contains zero");
    FuncBall gball = f;
    gball.poly().at(0, 0) = Interval(0.0);
    FuncBall h = scale(gball, -(Interval(1.0) / c0));

    const double q = h.l1_at(g.rho_outer);
    if (!(q < 1.0))
        throw domain_error("reciprocal: Neumann series diverges at the outer radius");

    // Horner for sum_{k<=K} h^k; h has no constant term, so the dropped
    // series terms h^k, k > K >= N, are pure tail mass q^(K+1)/(1-q).
    const int K = std::max(40, N + 1);
    FuncBall acc(PolyI::constant(N, Interval(1.0)), 0.0, g);
    for (int k = 0; k < K; ++k) {
        acc = mul(h, acc);
        acc.poly().at(0, 0) += Interval(1.0);
    }
    const Interval rem = pow_n(Interval(q), K + 1) / (Interval(1.0) - Interval(q));
    acc.set_tail((Interval(acc.tail()) + rem).hi);
    return scale(acc, Interval(1.0) / c0);
}

inline FuncBall symmetric_project(const FuncBall& f)
{
    return FuncBall(symmetric_projection(f.poly()), f.tail(), f.geom());
}

inline bool symmetric_within_overlap(const FuncBall& f)
{
    for (const SymPair& s : symmetric_pairs(f.degree())) {
        const Interval lhs = f.poly().at(s.a, s.b) * Interval(double(s.a));
        const Interval rhs = f.poly().at(s.p, s.q) * Interval(double(s.b + 1));
        Interval dummy;
        if (!try_intersect(lhs, rhs, dummy)) return false;
    }
    return true;
}

// Build a ball from monomials in raw (uncentered) coordinates.
inline FuncBall from_raw_monomials(int degree,
                                   const std::vector<std::tuple<int, int, double>>& terms,
                                   BallGeometry g = BallGeometry())
{
    const PolyI x = PolyI::monomial(degree, 1, 0, Interval(1.0)) +
                    PolyI::constant(degree, Interval(g.cx));
    const PolyI y = PolyI::monomial(degree, 0, 1, Interval(1.0)) +
                    PolyI::constant(degree, Interval(g.cy));
    PolyI acc(degree);
    for (const auto& [i, j, cv] : terms) {
        PolyI t = PolyI::constant(degree, Interval(cv));
        for (int k = 0; k < i; ++k) t = t.mul(x);
        for (int k = 0; k < j; ++k) t = t.mul(y);
        acc = acc + t;
    }
    return FuncBall(std::move(acc), 0.0, g);
}

inline void write_coeff_csv(const FuncBall& f, std::ostream& os)
{
    os << "i,j,lo,hi\n";
    for (int d = 0; d <= f.degree(); ++d)
        for (int j = 0; j <= d; ++j) {
            const Interval& c = f.poly().at(d - j, j);
            os << (d - j) << ',' << j << ',' << format_shortest(c.lo) << ','
               << format_shortest(c.hi) << '\n';
        }
}

} // namespace pdr

#endif
