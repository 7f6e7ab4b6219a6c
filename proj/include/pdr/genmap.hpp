#ifndef PDR_GENMAP_HPP
#define PDR_GENMAP_HPP

#include <pdr/funcball.hpp>

#include <optional>

// Reversible area-preserving maps from a generating function s:
//   F: (x, -s(y,x)) |-> (y, s(x,y)),
// with the derivative assembled from the partials of s and the implicit
// solution y(x,u) of -s(y,x) = u. Two execution modes: a float path on the
// midpoint polynomial (Newton iterations, plots, seeds) and an interval path
// whose every output is a certified enclosure.

namespace pdr {

struct Vec2 {
    double x = 0.0, u = 0.0;
    Vec2() = default;
    Vec2(double a, double b) : x(a), u(b) {}
    Vec2 operator+(const Vec2& o) const { return {x + o.x, u + o.u}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, u - o.u}; }
    Vec2 operator*(double s) const { return {x * s, u * s}; }
    double norm() const { return std::hypot(x, u); }
};

struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}
    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.u, c * v.x + d * v.u}; }
    Mat2 operator*(const Mat2& m) const
    {
        return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    }
    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
};

struct ScalingPair {
    Interval lambda;  // < 0
    Interval mu;      // > 0

    ScalingPair() : lambda(-0.25), mu(0.06) {}
    ScalingPair(Interval l, Interval m) : lambda(l), mu(m)
    {
        if (!(lambda.hi < 0.0) || !(mu.lo > 0.0))
            throw domain_error("ScalingPair: need lambda < 0 < mu");
    }
};

struct orbit_escape : domain_error {
    int step;
    explicit orbit_escape(int s)
        : domain_error("orbit escapes certified domain at step " + std::to_string(s)), step(s)
    {
    }
};

class GeneratingMap {
public:
    // The generating function is projected onto the symmetric subspace:
    // reversibility (and with it det DF = 1) holds only there.
    explicit GeneratingMap(FuncBall s, double solver_tol = 1e-13, int max_iter = 60)
        : s_(symmetric_project(std::move(s))),
          s1_(partial(s_, 1)),
          s2_(partial(s_, 2)),
          sf_(midpoint(s_.poly())),
          s1f_(sf_.partial(1)),
          s2f_(sf_.partial(2)),
          solver_tol_(solver_tol),
          max_iter_(max_iter)
    {
        const double r = s_.geom().rho;
        y_lo_ = s_.geom().cx - r;
        y_hi_ = s_.geom().cx + r;
    }

    const FuncBall& gen() const { return s_; }
    const BallGeometry& geom() const { return s_.geom(); }
    double solver_tol() const { return solver_tol_; }

    // ---- float path -------------------------------------------------------

    double eval_s_f(double x, double y) const
    {
        return sf_.eval(x - geom().cx, y - geom().cy);
    }
    double eval_s1_f(double x, double y) const
    {
        return s1f_.eval(x - geom().cx, y - geom().cy);
    }
    double eval_s2_f(double x, double y) const
    {
        return s2f_.eval(x - geom().cx, y - geom().cy);
    }

    // solve -s(y,x) = u for y; unseeded calls try Newton from the disk center
    // and fall back to a bracket scan
    double solve_y_f(double x, double u, double seed = -1e300) const
    {
        const bool seeded = (seed >= y_lo_ && seed <= y_hi_);
        double y = seeded ? seed : geom().cx;
        if (newton_y_f(x, u, y)) return y;
        y = scan_seed_f(x, u);
        if (newton_y_f(x, u, y)) return y;
        throw domain_error("solve_y: float Newton did not converge");
    }

    Vec2 apply_f(const Vec2& p, double seed = -1e300) const
    {
        const double y = solve_y_f(p.x, p.u, seed);
        return {y, eval_s_f(p.x, y)};
    }

    Mat2 derivative_f(const Vec2& p, double seed = -1e300) const
    {
        const double y = solve_y_f(p.x, p.u, seed);
        const double s1yx = eval_s1_f(y, p.x), s2yx = eval_s2_f(y, p.x);
        const double s1xy = eval_s1_f(p.x, y), s2xy = eval_s2_f(p.x, y);
        return {-s2yx / s1yx, -1.0 / s1yx, s1xy - s2xy * s2yx / s1yx, -s2xy / s1yx};
    }

    Vec2 inverse_apply_f(const Vec2& p) const
    {
        const Vec2 q = apply_f({p.x, -p.u});
        return {q.x, -q.u};
    }

    Vec2 iterate_f(int n, Vec2 p, Mat2* chain = nullptr) const
    {
        if (chain) *chain = Mat2::identity();
        for (int k = 0; k < std::abs(n); ++k) {
            if (chain) {
                Mat2 d = (n > 0) ? derivative_f(p) : inverse_derivative_f(p);
                *chain = d * *chain;
            }
            p = (n > 0) ? apply_f(p) : inverse_apply_f(p);
            if (!std::isfinite(p.x) || !std::isfinite(p.u)) throw orbit_escape(k);
        }
        return p;
    }

    Mat2 inverse_derivative_f(const Vec2& p) const
    {
        // D(T F T)(p) = T DF(T p) T
        Mat2 d = derivative_f({p.x, -p.u});
        return {d.a, -d.b, -d.c, d.d};
    }

    // ---- interval path ----------------------------------------------------

    Interval eval_s(const Interval& x, const Interval& y) const
    {
        return eval(s_, IVec2(x, y));
    }
    Interval eval_s1(const Interval& x, const Interval& y) const
    {
        return eval(s1_, IVec2(x, y));
    }
    Interval eval_s2(const Interval& x, const Interval& y) const
    {
        return eval(s2_, IVec2(x, y));
    }

    // Certified parametric solve: the returned Y contains, for every member
    // generating function and every (x,u) in the input box, the unique
    // solution of -s(y,x) = u near the seed; an interval Newton step mapping
    // Y strictly into itself is the existence and uniqueness witness.
    Interval solve_y(const Interval& x, const Interval& u, double seed = -1e300) const
    {
        double ymid = seed;
        if (!(ymid >= y_lo_ && ymid <= y_hi_)) ymid = solve_y_f(x.mid(), u.mid());
        double rad = std::max(1e-8, 4.0 * (x.rad() + u.rad()));
        for (int grow = 0; grow < 40; ++grow) {
            Interval Y = widened(Interval(ymid), rad);
            if (Y.lo < y_lo_ || Y.hi > y_hi_)
                throw domain_error("solve_y: bracket escapes the working bi-disk");
            bool contracted = false;
            for (int it = 0; it < max_iter_; ++it) {
                const Interval m(Y.mid());
                const Interval fm = eval_s(m, x) + u;
                const Interval d = eval_s1(Y, x);
                if (d.contains_zero()) break;
                const Interval newton = m - fm / d;
                if (newton.strictly_inside(Y)) contracted = true;
                Interval next;
                if (!try_intersect(newton, Y, next)) {
                    // no solution in this bracket: widen and retry
                    break;
                }
                if (contracted && next.width() > 0.99 * Y.width()) {
                    return next;
                }
                Y = next;
            }
            if (contracted) return Y;
            rad *= 3.0;
        }
        throw domain_error("solve_y: no certified contraction found");
    }

    IVec2 apply(const IVec2& p, double seed = -1e300) const
    {
        const Interval y = solve_y(p.x, p.u, seed);
        return IVec2(y, eval_s(p.x, y));
    }

    IMat2 derivative(const IVec2& p, double seed = -1e300) const
    {
        const Interval y = solve_y(p.x, p.u, seed);
        return derivative_at(p.x, y);
    }

    // derivative of F at (x, u) expressed through x and y = y(x,u)
    IMat2 derivative_at(const Interval& x, const Interval& y) const
    {
        const Interval s1yx = eval_s1(y, x), s2yx = eval_s2(y, x);
        const Interval s1xy = eval_s1(x, y), s2xy = eval_s2(x, y);
        if (s1yx.contains_zero()) throw domain_error("derivative: s1 enclosure contains zero");
        return IMat2(-(s2yx / s1yx), -(Interval(1.0) / s1yx),
                     s1xy - s2xy * (s2yx / s1yx), -(s2xy / s1yx));
    }

    IVec2 inverse_apply(const IVec2& p) const
    {
        const IVec2 q = apply(IVec2(p.x, -p.u));
        return IVec2(q.x, -q.u);
    }

    IMat2 inverse_derivative(const IVec2& p) const
    {
        IMat2 d = derivative(IVec2(p.x, -p.u));
        return IMat2(d.a, -d.b, -d.c, d.d);
    }

    // Mean-value-form image intersected with the direct interval image;
    // the implicit solve over the box is shared with the derivative. The
    // optional out-parameter returns DF over the box.
    IVec2 apply_mvf(const IVec2& p, IMat2* diff_out = nullptr) const
    {
        const Interval y = solve_y(p.x, p.u);
        const IVec2 direct(y, eval_s(p.x, y));
        if (diff_out) *diff_out = derivative_at(p.x, y);
        if (p.max_rad() == 0.0) return direct;
        const IVec2 m = p.mid_point();
        const Interval ym = solve_y(m.x, m.u, y.mid());
        const IVec2 fm(ym, eval_s(m.x, ym));
        const IMat2 dd = diff_out ? *diff_out : derivative_at(p.x, y);
        const IVec2 dp(p.x - m.x, p.u - m.u);
        const IVec2 mvf = fm + dd * dp;
        IVec2 out;
        if (!try_intersect(direct.x, mvf.x, out.x) || !try_intersect(direct.u, mvf.u, out.u))
            throw domain_error("apply_mvf: inconsistent enclosures");
        return out;
    }

    IVec2 inverse_apply_mvf(const IVec2& p, IMat2* diff_out = nullptr) const
    {
        IMat2 d;
        const IVec2 q = apply_mvf(IVec2(p.x, -p.u), diff_out ? &d : nullptr);
        if (diff_out) {
            // D(T F T) = T DF(T p) T
            *diff_out = IMat2(d.a, -d.b, -d.c, d.d);
        }
        return IVec2(q.x, -q.u);
    }

    IVec2 iterate(int n, IVec2 p, IMat2* chain = nullptr) const
    {
        if (chain) *chain = IMat2::identity();
        for (int k = 0; k < std::abs(n); ++k) {
            try {
                IMat2 d;
                IVec2 q = (n > 0) ? apply_mvf(p, chain ? &d : nullptr)
                                  : inverse_apply_mvf(p, chain ? &d : nullptr);
                if (chain) *chain = d * *chain;
                p = q;
            } catch (const domain_error&) {
                throw orbit_escape(k);
            }
        }
        return p;
    }

    // Certified fixed point. Reversible maps have p0 on the symmetry line
    // u = 0, where the fixed-point condition reduces to s(x,x) = 0; a 2-d
    // Newton fallback handles seeds off the line.
    IVec2 find_fixed_point(const IVec2& seed) const
    {
        if (seed.u.contains(0.0)) {
            double x = seed.x.mid();
            for (int it = 0; it < max_iter_; ++it) {
                const double g = eval_s_f(x, x);
                const double dg = eval_s1_f(x, x) + eval_s2_f(x, x);
                const double step = g / dg;
                x -= step;
                if (std::fabs(step) < solver_tol_) break;
            }
            // interval Newton certification on g(x) = s(x,x)
            double rad = 1e-10;
            for (int grow = 0; grow < 30; ++grow) {
                Interval X = widened(Interval(x), rad);
                const Interval m(X.mid());
                const Interval gm = eval_s(m, m);
                const Interval dg = eval_s1(X, X) + eval_s2(X, X);
                if (!dg.contains_zero()) {
                    const Interval newton = m - gm / dg;
                    if (newton.strictly_inside(X)) return IVec2(newton, Interval(0.0));
                }
                rad *= 4.0;
            }
            throw domain_error("find_fixed_point: no certification on the symmetry line");
        }
        return find_fixed_point_2d(seed);
    }

private:
    bool newton_y_f(double x, double u, double& y) const
    {
        for (int it = 0; it < max_iter_; ++it) {
            const double r = eval_s_f(y, x) + u;
            const double d = eval_s1_f(y, x);
            if (d == 0.0 || !std::isfinite(r)) return false;
            const double step = r / d;
            y = std::clamp(y - step, y_lo_, y_hi_);
            if (std::fabs(step) < solver_tol_)
                return std::fabs(eval_s_f(y, x) + u) < 1e-8;
        }
        return false;
    }

    double scan_seed_f(double x, double u) const
    {
        // bisection scan over the y-bracket for a sign change of s(y,x) + u
        const int K = 96;
        double prev_y = y_lo_ + 1e-9, prev_v = eval_s_f(prev_y, x) + u;
        double best = prev_y;
        double best_mag = std::fabs(prev_v);
        for (int k = 1; k <= K; ++k) {
            const double y = y_lo_ + (y_hi_ - y_lo_) * (double(k) / K);
            const double v = eval_s_f(y, x) + u;
            if (std::fabs(v) < best_mag) {
                best_mag = std::fabs(v);
                best = y;
            }
            if (prev_v == 0.0 || (prev_v < 0.0) != (v < 0.0)) {
                // refine the bracket with a few bisection steps
                double a = prev_y, b = y, va = prev_v;
                for (int t = 0; t < 20; ++t) {
                    const double mid = 0.5 * (a + b);
                    const double vm = eval_s_f(mid, x) + u;
                    if (vm == 0.0) return mid;
                    if ((vm < 0.0) == (va < 0.0)) {
                        a = mid;
                        va = vm;
                    } else {
                        b = mid;
                    }
                }
                return 0.5 * (a + b);
            }
            prev_y = y;
            prev_v = v;
        }
        return best;
    }

    IVec2 find_fixed_point_2d(const IVec2& seed) const
    {
        Vec2 p(seed.x.mid(), seed.u.mid());
        for (int it = 0; it < max_iter_; ++it) {
            const Vec2 r = apply_f(p) - p;
            Mat2 j = derivative_f(p);
            j.a -= 1.0;
            j.d -= 1.0;
            const double det = j.det();
            if (det == 0.0) throw domain_error("find_fixed_point: singular Jacobian");
            const Vec2 step{(j.d * r.x - j.b * r.u) / det, (-j.c * r.x + j.a * r.u) / det};
            p = p - step;
            if (step.norm() < solver_tol_) break;
        }
        // certify with an interval Krawczyk-style check around p
        double rad = 1e-9;
        for (int grow = 0; grow < 25; ++grow) {
            IVec2 X(widened(Interval(p.x), rad), widened(Interval(p.u), rad));
            const IVec2 m = X.mid_point();
            const IVec2 fm = apply(m);
            const IVec2 rm(fm.x - m.x, fm.u - m.u);
            IMat2 J = derivative(X);
            J.a -= Interval(1.0);
            J.d -= Interval(1.0);
            const Interval det = J.det();
            if (!det.contains_zero()) {
                const IVec2 step((J.d * rm.x - J.b * rm.u) / det,
                                 (-J.c * rm.x + J.a * rm.u) / det);
                const IVec2 newton(m.x - step.x, m.u - step.u);
                if (newton.x.strictly_inside(X.x) && newton.u.strictly_inside(X.u))
                    return newton;
            }
            rad *= 4.0;
        }
        throw domain_error("find_fixed_point: no 2-d certification");
    }

    FuncBall s_, s1_, s2_;
    PolyD sf_, s1f_, s2f_;
    double solver_tol_;
    int max_iter_;
    double y_lo_, y_hi_;
};

// eigenvalues of a 2x2 interval matrix with real spectrum
inline std::pair<Interval, Interval> real_eigenvalues(const IMat2& m)
{
    const Interval tr = m.trace(), det = m.det();
    const Interval disc = sqr(tr) - Interval(4.0) * det;
    if (disc.lo < 0.0) throw domain_error("real_eigenvalues: discriminant not certified positive");
    const Interval root = sqrt(disc);
    const Interval half(0.5);
    return {half * (tr + root), half * (tr - root)};
}

} // namespace pdr

#endif
