#include <catch2/catch_amalgamated.hpp>

#include <pdr/renorm.hpp>

using namespace pdr;

namespace {

// Theorem-level reference enclosures for the fixed-point scalings
const Interval LAMBDA_REF(-0.24887681, -0.24887376);
const Interval MU_REF(0.061107811, 0.061112465);

} // namespace

TEST_CASE("degenerate generating function is rejected")
{
    // s(p,q) = p has s2 == 0: the midpoint equation cannot determine z
    RenormOperator op(6);
    PolyD s = midpoint(from_raw_monomials(6, {{1, 0, 1.0}}).poly());
    CHECK_THROWS_AS(op.solve_midpoint(s, -0.25), domain_error);
}

TEST_CASE("midpoint function of the linear generating function")
{
    // s(p,q) = p + q: s(lx,z) + s(ly,z) = l(x+y) + 2z = 0 -> z = -l(x+y)/2
    RenormOperator op(6);
    PolyD s = midpoint(from_raw_monomials(6, {{1, 0, 1.0}, {0, 1, 1.0}}).poly());
    const double lam = -0.25;
    PolyD z = op.solve_midpoint(s, lam);
    // z in raw coordinates: -l/2 x - l/2 y; centered constant = -l/2 (cx+cy)
    PolyD want = midpoint(
        from_raw_monomials(6, {{1, 0, -lam / 2.0}, {0, 1, -lam / 2.0}}).poly());
    for (std::size_t k = 0; k < z.size(); ++k)
        CHECK(z[k] == Catch::Approx(want[k]).margin(1e-12));
}

TEST_CASE("lambda root needs a bracketed sign change")
{
    RenormOperator op(6);
    PolyD s = midpoint(from_raw_monomials(6, {{1, 0, 1.0}, {0, 1, 1.0}}).poly());
    CHECK_THROWS_AS(op.lambda_root(s), domain_error);  // root at -2, outside
}

TEST_CASE("seed satisfies both normalizations")
{
    PolyD s = henon_like_seed(8);
    BallGeometry g;
    CHECK(rn::eval_raw(s, g, 1.0, 0.0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(rn::eval_raw(s.partial(1), g, 1.0, 0.0) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("renorm step reproduces the normalizations")
{
    RenormOperator op(8);
    RenormStep st = op.step(henon_like_seed(8));
    CHECK(st.norm_s10 < 1e-10);
    CHECK(st.norm_ds10 < 1e-10);
    CHECK(st.midpoint_residual < 1e-11);
    CHECK(st.z_asymmetry < 1e-11);
}

TEST_CASE("newton reaches the fixed point from the seed at N=12")
{
    RenormOperator op(12);
    FixedPointResult r = newton_fixed_point(op, henon_like_seed(12), 1e-11, 30);
    CHECK(r.iterations <= 30);
    CHECK(r.residual < 1e-11);
    CHECK(widened(LAMBDA_REF, 1e-4).contains(r.lambda));
    CHECK(widened(MU_REF, 1e-4).contains(r.mu));

    // residuals decrease monotonically along the Newton path
    for (std::size_t k = 1; k < r.residual_history.size(); ++k)
        CHECK(r.residual_history[k] <= r.residual_history[k - 1] * (1 + 1e-9));

    // fixed-point property: one more renorm step changes nothing
    RenormStep st = op.step(r.s);
    CHECK((st.s_new - r.s).l1_norm(op.geom().rho) < 1e-8);

    // seeding with the converged answer verifies immediately
    FixedPointResult r2 = newton_fixed_point(op, r.s, 1e-10, 30);
    CHECK(r2.iterations <= 1);
}

TEST_CASE("spectrum: two expanding directions, contracting rest")
{
    FixedPointResult r = fixed_point_pipeline(12, 1e-11);
    SpectrumReport sp = linearization_spectrum(RenormOperator(12), r.s);
    CHECK(sp.expanding_count == 2);
    CHECK(sp.delta1 == Catch::Approx(8.721).margin(0.05));
    CHECK(std::fabs(sp.eigenvalues[0].imag()) < 1e-8);
    CHECK(sp.contraction_bound < 0.90);
    // eigenvalues arrive sorted by modulus
    for (std::size_t k = 1; k < sp.eigenvalues.size(); ++k)
        CHECK(std::abs(sp.eigenvalues[k]) <= std::abs(sp.eigenvalues[k - 1]) + 1e-12);
}

TEST_CASE("certified scalings intersect the reference enclosures")
{
    FixedPointResult r = fixed_point_pipeline(12, 1e-11);
    FuncBall S = widened_ball(r.s, std::max(r.residual * 10.0, 1e-12));
    Interval lam = certified_lambda(S, r.lambda);
    Interval mu = certified_mu(S, lam);
    Interval tmp;
    CHECK(try_intersect(lam, widened(LAMBDA_REF, 1e-6), tmp));
    CHECK(try_intersect(mu, widened(MU_REF, 1e-6), tmp));
    CHECK(lam.hi < 0.0);
    CHECK(mu.lo > 0.0);
    // the certified pair is a valid ScalingPair
    ScalingPair sc(lam, mu);
    CHECK(sc.lambda.contains(r.lambda));
}

TEST_CASE("omega bound arithmetic")
{
    // interval min picks the smaller ratio
    Interval w = omega_bound(Interval(0.2, 0.3), Interval(-1.0), Interval(0.1, 0.15),
                             Interval(1.0));
    CHECK(w.lo == Catch::Approx(0.1));
    CHECK(w.hi == Catch::Approx(0.15));

    // b/A with the norm constants: 0.034 / 0.764 ~ 0.0445
    Interval ba = Interval(0.034) / Interval(0.764);
    const long double exact_q = (long double)0.034 / (long double)0.764;
    CHECK((long double)ba.lo <= exact_q);
    CHECK((long double)ba.hi >= exact_q);
    CHECK(std::fabs(ba.mid() - 0.0445) < 1e-4);
    CHECK(ba.width() < 1e-12);

    // mu/|lambda| < 0.246 from the reference scalings
    Interval ml = MU_REF / abs(LAMBDA_REF);
    CHECK(ml.hi < 0.246);
    Interval om = omega_bound(MU_REF, LAMBDA_REF, Interval(0.034), Interval(0.764));
    CHECK(om.hi < 0.246);
}

TEST_CASE("renormalized iterates stay near the fixed point")
{
    // infinitely renormalizable behaviour at the fixed point itself:
    // repeated steps keep lambda, mu pinned
    FixedPointResult r = fixed_point_pipeline(10, 1e-11);
    RenormOperator op(10);
    PolyD s = r.s;
    for (int k = 0; k < 3; ++k) {
        RenormStep st = op.step(s);
        CHECK(widened(LAMBDA_REF, 1e-4).contains(st.lambda));
        CHECK(widened(MU_REF, 1e-4).contains(st.mu));
        s = st.s_new;
    }
}
