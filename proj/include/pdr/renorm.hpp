#ifndef PDR_RENORM_HPP
#define PDR_RENORM_HPP

#include <pdr/genmap.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <vector>

// The period-doubling renormalization operator on generating functions,
//   R[s](x,y) = mu^-1 s(z(x,y), lambda y),
// with z solving s(lambda x, z) + s(lambda y, z) = 0 and the scalings fixed
// by s(lambda,1) + s(0,1) = 0 and mu = d1 z(1,0). The float pipeline works
// on midpoint polynomials; certified enclosures for the scalings are
// produced from a coefficient-widened ball around the computed fixed point.

namespace pdr {

namespace rn {

inline double eval_raw(const PolyD& p, const BallGeometry& g, double x, double y)
{
    return p.eval(x - g.cx, y - g.cy);
}

// inner arguments for composition, already centered: U = lam*x - cx
inline PolyD centered_scaled_x(int deg, const BallGeometry& g, double lam)
{
    PolyD u(deg);
    u.at(0, 0) = g.cx * (lam - 1.0);
    u.at(1, 0) = lam;
    return u;
}

inline PolyD centered_scaled_y(int deg, const BallGeometry& g, double lam)
{
    PolyD v(deg);
    v.at(0, 0) = g.cy * (lam - 1.0);
    v.at(0, 1) = lam;
    return v;
}

} // namespace rn

struct RenormStep {
    PolyD s_new;              // symmetric-projected renormalized function
    PolyD z;                  // midpoint function, raw values
    double lambda = 0.0;
    double mu = 0.0;
    double midpoint_residual = 0.0;  // l1 norm at rho of s(lx,z)+s(ly,z)
    double norm_s10 = 0.0;           // |s_new(1,0)|
    double norm_ds10 = 0.0;          // |d1 s_new(1,0) - 1|
    double z_asymmetry = 0.0;        // max |z_ij - z_ji|
};

class RenormOperator {
public:
    explicit RenormOperator(int deg, BallGeometry g = BallGeometry(), double tol = 1e-13,
                            int max_iter = 80)
        : deg_(deg), geom_(g), tol_(tol), max_iter_(max_iter)
    {
    }

    int degree() const { return deg_; }
    const BallGeometry& geom() const { return geom_; }

    // root of s(lambda,1) + s(0,1) = 0, bracketed in [-0.4, -0.1]
    double lambda_root(const PolyD& s) const
    {
        const double c = rn::eval_raw(s, geom_, 0.0, 1.0);
        auto ell = [&](double lam) { return rn::eval_raw(s, geom_, lam, 1.0) + c; };
        double a = -0.4, b = -0.1;
        double fa = ell(a), fb = ell(b);
        if ((fa < 0.0) == (fb < 0.0))
            throw domain_error("lambda_root: no sign change in [-0.4,-0.1]");
        for (int it = 0; it < 30; ++it) {
            const double m = 0.5 * (a + b), fm = ell(m);
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        const PolyD s1 = s.partial(1);
        double lam = 0.5 * (a + b);
        for (int it = 0; it < max_iter_; ++it) {
            const double step = ell(lam) / rn::eval_raw(s1, geom_, lam, 1.0);
            lam -= step;
            if (std::fabs(step) < tol_) break;
        }
        return lam;
    }

    // z(x,y) with s(lambda x, z) + s(lambda y, z) = 0; Newton in function
    // space, the optional seed warm-starts Jacobian columns
    PolyD solve_midpoint(const PolyD& s, double lambda, const PolyD* seed = nullptr,
                         double* residual_out = nullptr) const
    {
        const PolyD s2 = s.partial(2);
        const PolyD U = rn::centered_scaled_x(deg_, geom_, lambda);
        const PolyD V = rn::centered_scaled_y(deg_, geom_, lambda);
        const double degenerate = s2.l1_norm(geom_.rho);
        if (degenerate < 1e-12)
            throw domain_error("solve_midpoint: degenerate, s2 vanishes identically");

        PolyD z(deg_);
        if (seed && seed->degree() == deg_) {
            z = *seed;
        } else {
            // constant seed from the center equation 2 s(lambda/2, z) = 0
            double zc = 1.0;
            const PolyD s2p = s2;
            for (int it = 0; it < max_iter_; ++it) {
                const double r = rn::eval_raw(s, geom_, lambda * geom_.cx, zc);
                const double d = rn::eval_raw(s2p, geom_, lambda * geom_.cx, zc);
                if (d == 0.0) throw domain_error("solve_midpoint: s2 vanishes at seed");
                const double step = r / d;
                zc -= step;
                if (std::fabs(step) < tol_) break;
            }
            z = PolyD::constant(deg_, zc);
        }

        double resid = 0.0;
        for (int it = 0; it < max_iter_; ++it) {
            PolyD zc = z;
            zc.at(0, 0) -= geom_.cy;  // z as inner argument, centered
            const PolyD rx = poly_compose(s, U, zc);
            const PolyD ry = poly_compose(s, V, zc);
            const PolyD r = rx + ry;
            resid = r.l1_norm(geom_.rho);
            if (resid < tol_ * std::max(1.0, s.l1_norm(geom_.rho))) break;
            const PolyD wx = poly_compose(s2, U, zc);
            const PolyD wy = poly_compose(s2, V, zc);
            PolyD w = wx + wy;
            if (std::fabs(w.at(0, 0)) < 1e-10)
                throw domain_error("solve_midpoint: s2 enclosure vanishes along Newton path");
            z = z - r.mul(poly_reciprocal(w));
            if (it == max_iter_ - 1)
                throw domain_error("solve_midpoint: Newton did not converge");
        }
        if (residual_out) *residual_out = resid;
        return z;
    }

    RenormStep step(const PolyD& s, const PolyD* z_seed = nullptr) const
    {
        RenormStep out;
        out.lambda = lambda_root(s);
        out.z = solve_midpoint(s, out.lambda, z_seed, &out.midpoint_residual);

        const PolyD z1 = out.z.partial(1);
        out.mu = rn::eval_raw(z1, geom_, 1.0, 0.0);
        if (out.mu == 0.0) throw domain_error("renorm_step: mu vanishes");

        PolyD zc = out.z;
        zc.at(0, 0) -= geom_.cx;
        const PolyD V = rn::centered_scaled_y(deg_, geom_, out.lambda);
        PolyD snew = poly_compose(s, zc, V) * (1.0 / out.mu);
        out.s_new = symmetric_projection(snew);

        out.norm_s10 = std::fabs(rn::eval_raw(out.s_new, geom_, 1.0, 0.0));
        out.norm_ds10 = std::fabs(rn::eval_raw(out.s_new.partial(1), geom_, 1.0, 0.0) - 1.0);
        double asym = 0.0;
        for (int d = 0; d <= deg_; ++d)
            for (int j = 0; j <= d; ++j)
                asym = std::max(asym, std::fabs(out.z.at(d - j, j) - out.z.at(j, d - j)));
        out.z_asymmetry = asym;
        return out;
    }

    int degree_dim() const { return tri(deg_ + 1); }

private:
    int deg_;
    BallGeometry geom_;
    double tol_;
    int max_iter_;
};

// Reduced coordinates: free parameters of the symmetric subspace with the
// two normalization conditions s(1,0) = 0 and d1 s(1,0) = 1 eliminated
// against the best-conditioned pivot pair.
class SymCoords {
public:
    SymCoords(int deg, BallGeometry g = BallGeometry()) : deg_(deg), geom_(g)
    {
        for (int j = 0; j <= deg_; ++j) singles_.push_back(j);  // c_{0,j}
        pairs_ = symmetric_pairs(deg_);
        const int M = int(singles_.size() + pairs_.size());

        // linear functionals of the full parameter vector
        Eigen::VectorXd g0(M), g1(M);
        for (int k = 0; k < M; ++k) {
            PolyD s = param_basis(k);
            g0[k] = rn::eval_raw(s, geom_, 1.0, 0.0);
            g1[k] = rn::eval_raw(s.partial(1), geom_, 1.0, 0.0);
        }
        int p0 = 0;
        for (int k = 0; k < M; ++k)
            if (std::fabs(g0[k]) > std::fabs(g0[p0])) p0 = k;
        int p1 = -1;
        double best = 0.0;
        for (int k = 0; k < M; ++k) {
            if (k == p0) continue;
            const double det = g0[p0] * g1[k] - g0[k] * g1[p0];
            if (std::fabs(det) > best) {
                best = std::fabs(det);
                p1 = k;
            }
        }
        if (p1 < 0) throw domain_error("SymCoords: degenerate normalization functionals");
        piv0_ = p0;
        piv1_ = p1;
        g0_ = g0;
        g1_ = g1;
        for (int k = 0; k < M; ++k)
            if (k != p0 && k != p1) free_.push_back(k);
    }

    int dim() const { return int(free_.size()); }
    int full_dim() const { return int(singles_.size() + pairs_.size()); }

    PolyD to_poly(const Eigen::VectorXd& q) const
    {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(full_dim());
        for (int k = 0; k < dim(); ++k) p[free_[k]] = q[k];
        // solve the 2x2 system for the pivots: g0.p = 0, g1.p = 1
        double r0 = 0.0, r1 = 1.0;
        for (int k = 0; k < dim(); ++k) {
            r0 -= g0_[free_[k]] * q[k];
            r1 -= g1_[free_[k]] * q[k];
        }
        const double det = g0_[piv0_] * g1_[piv1_] - g0_[piv1_] * g1_[piv0_];
        p[piv0_] = (r0 * g1_[piv1_] - g0_[piv1_] * r1) / det;
        p[piv1_] = (g0_[piv0_] * r1 - r0 * g1_[piv0_]) / det;
        return assemble(p);
    }

    Eigen::VectorXd from_poly(const PolyD& s_in) const
    {
        const PolyD s = symmetric_projection(s_in);
        Eigen::VectorXd q(dim());
        for (int k = 0; k < dim(); ++k) {
            const int idx = free_[k];
            if (idx < int(singles_.size()))
                q[k] = s.at(0, singles_[idx]);
            else
                q[k] = s.at(pairs_[idx - singles_.size()].a, pairs_[idx - singles_.size()].b);
        }
        return q;
    }

private:
    // basis polynomial of one parameter (with its symmetric partner)
    PolyD param_basis(int k) const
    {
        PolyD s(deg_);
        if (k < int(singles_.size())) {
            s.at(0, singles_[k]) = 1.0;
        } else {
            const SymPair& pr = pairs_[k - singles_.size()];
            s.at(pr.a, pr.b) = 1.0;
            if (!(pr.p == pr.a && pr.q == pr.b))
                s.at(pr.p, pr.q) = double(pr.a) / double(pr.b + 1);
        }
        return s;
    }

    PolyD assemble(const Eigen::VectorXd& p) const
    {
        PolyD s(deg_);
        for (int k = 0; k < full_dim(); ++k) {
            if (p[k] == 0.0) continue;
            if (k < int(singles_.size())) {
                s.at(0, singles_[k]) += p[k];
            } else {
                const SymPair& pr = pairs_[k - singles_.size()];
                s.at(pr.a, pr.b) += p[k];
                if (!(pr.p == pr.a && pr.q == pr.b))
                    s.at(pr.p, pr.q) += p[k] * double(pr.a) / double(pr.b + 1);
            }
        }
        return s;
    }

    int deg_;
    BallGeometry geom_;
    std::vector<int> singles_;
    std::vector<SymPair> pairs_;
    std::vector<int> free_;
    int piv0_ = 0, piv1_ = 0;
    Eigen::VectorXd g0_, g1_;
};

struct FixedPointResult {
    PolyD s;
    PolyD z;
    double lambda = 0.0, mu = 0.0;
    double residual = 0.0;  // ||R[s] - s||_rho
    int iterations = 0;
    std::vector<double> residual_history;
};

// Newton for R[s] = s on the reduced symmetric coordinates.
inline FixedPointResult newton_fixed_point(const RenormOperator& op, const PolyD& seed,
                                           double tol = 1e-10, int max_steps = 30)
{
    const SymCoords coords(op.degree(), op.geom());
    const int n = coords.dim();
    Eigen::VectorXd q = coords.from_poly(seed);

    PolyD z_cache(op.degree());
    bool have_z = false;

    auto phi = [&](const Eigen::VectorXd& qq, RenormStep* step_out) {
        const PolyD s = coords.to_poly(qq);
        RenormStep st = op.step(s, have_z ? &z_cache : nullptr);
        Eigen::VectorXd r = coords.from_poly(st.s_new) - qq;
        if (step_out) *step_out = st;
        return r;
    };

    FixedPointResult out;
    RenormStep st;
    Eigen::VectorXd r = phi(q, &st);
    z_cache = st.z;
    have_z = true;
    double rnorm = (st.s_new - coords.to_poly(q)).l1_norm(op.geom().rho);
    out.residual_history.push_back(rnorm);

    for (int it = 0; it < max_steps; ++it) {
        if (rnorm < tol) break;
        // forward-difference Jacobian of phi
        const double h = 1e-7;
        Eigen::MatrixXd J(n, n);
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd qk = q;
            qk[k] += h;
            J.col(k) = (phi(qk, nullptr) - r) / h;
        }
        Eigen::VectorXd dq = J.partialPivLu().solve(-r);
        if (!dq.allFinite()) throw domain_error("newton_fixed_point: singular Jacobian");

        double scale = 1.0;
        for (int half = 0; half < 10; ++half) {
            Eigen::VectorXd qn = q + scale * dq;
            RenormStep stn;
            Eigen::VectorXd rn;
            try {
                rn = phi(qn, &stn);
            } catch (const domain_error&) {
                scale *= 0.5;
                continue;
            }
            const double rnn = (stn.s_new - coords.to_poly(qn)).l1_norm(op.geom().rho);
            if (rnn < rnorm || scale < 0.02) {
                q = qn;
                r = rn;
                st = stn;
                z_cache = st.z;
                rnorm = rnn;
                break;
            }
            scale *= 0.5;
        }
        out.iterations = it + 1;
        out.residual_history.push_back(rnorm);
    }

    out.s = coords.to_poly(q);
    out.z = st.z;
    out.lambda = st.lambda;
    out.mu = st.mu;
    out.residual = rnorm;
    return out;
}

// normalized Henon-like seed inside the Newton basin; the quadratic
// coefficient puts the lambda-root near the fixed-point scaling
inline PolyD henon_like_seed(int deg, BallGeometry g = BallGeometry())
{
    return midpoint(
        from_raw_monomials(deg, {{0, 0, -1.0}, {1, 0, 1.0}, {0, 2, 1.12}}, g).poly());
}

// degree schedule 8 -> 12 -> 16 -> final, warm-starting each level
inline FixedPointResult fixed_point_pipeline(int deg_final, double tol = 1e-10,
                                             BallGeometry g = BallGeometry(),
                                             int max_steps = 30)
{
    std::vector<int> schedule;
    for (int d : {8, 12, 16})
        if (d < deg_final) schedule.push_back(d);
    if (schedule.empty() || schedule.back() != deg_final) schedule.push_back(deg_final);

    PolyD s = henon_like_seed(schedule.front(), g);
    FixedPointResult r;
    for (int d : schedule) {
        RenormOperator op(d, g);
        r = newton_fixed_point(op, s.resized(d), tol, max_steps);
        s = r.s;
    }
    return r;
}

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;  // sorted by modulus, descending
    int expanding_count = 0;
    double contraction_bound = 0.0;  // max modulus among the non-expanding part
    double delta1 = 0.0;             // leading eigenvalue (real part)
};

// dense spectrum of the truncated differential of R on the reduced
// coordinates; diagnostic, float mode only
inline SpectrumReport linearization_spectrum(const RenormOperator& op, const PolyD& s_star,
                                             double fd_step = 1e-7)
{
    const SymCoords coords(op.degree(), op.geom());
    const int n = coords.dim();
    const Eigen::VectorXd q0 = coords.from_poly(s_star);

    RenormStep base = op.step(coords.to_poly(q0));
    const Eigen::VectorXd r0 = coords.from_poly(base.s_new);
    PolyD z_cache = base.z;

    Eigen::MatrixXd J(n, n);
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd qk = q0;
        qk[k] += fd_step;
        RenormStep st = op.step(coords.to_poly(qk), &z_cache);
        J.col(k) = (coords.from_poly(st.s_new) - r0) / fd_step;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    SpectrumReport rep;
    for (int k = 0; k < n; ++k) rep.eigenvalues.push_back(es.eigenvalues()[k]);
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  return std::abs(a) > std::abs(b);
              });
    for (const auto& ev : rep.eigenvalues)
        if (std::abs(ev) > 1.0) ++rep.expanding_count;
    rep.contraction_bound =
        rep.expanding_count < int(rep.eigenvalues.size())
            ? std::abs(rep.eigenvalues[rep.expanding_count])
            : 0.0;
    rep.delta1 = rep.eigenvalues.empty() ? 0.0 : rep.eigenvalues[0].real();
    return rep;
}

// omega = min{ mu/|lambda|, b/A } of the weak-rigidity threshold
inline Interval omega_bound(const Interval& mu, const Interval& lambda, const Interval& b,
                            const Interval& A)
{
    if (!(mu.lo > 0.0) || !(b.lo > 0.0) || !(A.lo > 0.0) || !(lambda.hi < 0.0))
        throw domain_error("omega_bound: inputs must be sign-definite");
    return min(mu / abs(lambda), b / A);
}

// certified ball around a computed fixed point: every coefficient widened so
// the total l1 inflation at rho equals the achieved Newton residual
inline FuncBall widened_ball(const PolyD& s, double residual, BallGeometry g = BallGeometry())
{
    PolyI p = exact(s);
    const int N = p.degree();
    const double per = residual / double(tri(N + 1));
    for (int d = 0; d <= N; ++d) {
        const double w = (Interval(per) / pow_n(Interval(g.rho), d)).hi;
        for (int j = 0; j <= d; ++j) p.at(d - j, j) = widened(p.at(d - j, j), w);
    }
    return FuncBall(std::move(p), 0.0, g);
}

// interval Newton enclosure of the scaling lambda from a certified ball
inline Interval certified_lambda(const FuncBall& S, double lambda_float)
{
    const FuncBall S1 = partial(S, 1);
    const Interval one(1.0), zero_pt(0.0);
    auto ell = [&](const Interval& lam) {
        return eval(S, IVec2(lam, one)) + eval(S, IVec2(zero_pt, one));
    };
    auto dell = [&](const Interval& lam) { return eval(S1, IVec2(lam, one)); };
    double rad = 1e-9;
    for (int grow = 0; grow < 30; ++grow) {
        const Interval L = widened(Interval(lambda_float), rad);
        const Interval m(L.mid());
        const Interval d = dell(L);
        if (!d.contains_zero()) {
            const Interval newton = m - ell(m) / d;
            if (newton.strictly_inside(L)) return newton;
        }
        rad *= 4.0;
    }
    throw domain_error("certified_lambda: no contraction");
}

// mu = -lambda s1(lambda,1) / (s2(lambda,1) + s2(0,1)), from the implicit
// derivative of the midpoint equation at (1,0) where z = 1
inline Interval certified_mu(const FuncBall& S, const Interval& lambda)
{
    const FuncBall S1 = partial(S, 1), S2 = partial(S, 2);
    const Interval one(1.0), zero_pt(0.0);
    const Interval num = -(lambda * eval(S1, IVec2(lambda, one)));
    const Interval den = eval(S2, IVec2(lambda, one)) + eval(S2, IVec2(zero_pt, one));
    return num / den;
}

} // namespace pdr

#endif
