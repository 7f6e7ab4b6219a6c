#include <catch2/catch_amalgamated.hpp>
#include <algorithm>

#include <pdr/funcball.hpp>

#include <random>

using namespace pdr;

namespace {

std::mt19937_64 rng(71130251ull);

FuncBall random_ball(int deg, double coeff_span = 0.5, double tail = 0.0)
{
    std::uniform_real_distribution<double> d(-coeff_span, coeff_span);
    PolyI p(deg);
    for (int dd = 0; dd <= deg; ++dd)
        for (int j = 0; j <= dd; ++j) {
            // decay keeps norms finite at rho = 1.6
            const double s = std::pow(0.25, dd);
            p.at(dd - j, j) = Interval(d(rng) * s);
        }
    return FuncBall(std::move(p), tail);
}

IVec2 random_point_in_disk(double r = 1.0)
{
    std::uniform_real_distribution<double> d(-r, r);
    return IVec2(Interval(0.5 + d(rng)), Interval(0.5 + d(rng)));
}

double eval_mid(const FuncBall& f, double x, double y)
{
    PolyD p = midpoint(f.poly());
    return p.eval(x - f.geom().cx, y - f.geom().cy);
}

} // namespace

TEST_CASE("eval of constants and linear functions")
{
    FuncBall one(PolyI::constant(12, Interval(1.0)), 0.0);
    CHECK(eval(one, random_point_in_disk()).contains(1.0));
    CHECK(eval(one, random_point_in_disk()).width() < 1e-15);

    // f = x + y in raw coordinates
    FuncBall f = from_raw_monomials(8, {{1, 0, 1.0}, {0, 1, 1.0}});
    Interval v = eval(f, IVec2(Interval(0.5), Interval(0.5)));
    CHECK(v.contains(1.0));
    CHECK(v.width() < 1e-14);
}

TEST_CASE("eval rejects points outside the working bi-disk")
{
    FuncBall f = random_ball(6);
    CHECK_THROWS_AS(eval(f, IVec2(Interval(2.2), Interval(0.5))), domain_error);
}

TEST_CASE("tail contribution follows the geometric formula")
{
    // N = 2, deviation r = rho_outer / 2: tail term <= t / 8
    BallGeometry g;
    FuncBall f(PolyI::constant(2, Interval(0.0)), 0.4, g);
    const double r = g.rho_outer / 2.0;
    // rho_outer/2 = 0.875 < rho, inside the working disk
    Interval v = eval(f, IVec2(Interval(g.cx + r), Interval(g.cy)));
    CHECK(v.hi <= 0.4 / 8.0 * (1.0 + 1e-12));
    CHECK(v.lo >= -0.4 / 8.0 * (1.0 + 1e-12));
    CHECK(v.hi >= 0.4 / 8.0 * (1.0 - 1e-12));
}

TEST_CASE("additive identity and monomial product")
{
    FuncBall f = random_ball(10);
    FuncBall zero(PolyI(10), 0.0);
    FuncBall s = f + zero;
    for (std::size_t k = 0; k < f.poly().size(); ++k) {
        CHECK(s.poly()[k].contains(f.poly()[k]));
        CHECK(s.poly()[k].width() <= f.poly()[k].width() * (1 + 1e-12) + 1e-300);
    }

    // centered monomials: x * y has the single coefficient c11 = 1
    FuncBall mx(PolyI::monomial(6, 1, 0, Interval(1.0)), 0.0);
    FuncBall my(PolyI::monomial(6, 0, 1, Interval(1.0)), 0.0);
    FuncBall p = mul(mx, my);
    CHECK(p.poly().at(1, 1).contains(1.0));
    CHECK(p.poly().at(1, 1).width() < 1e-15);
    CHECK(p.poly().at(0, 0).mag() == 0.0);
    CHECK(p.tail() == 0.0);
}

TEST_CASE("norm sub-additivity and sub-multiplicativity on random pairs")
{
    for (int it = 0; it < 100; ++it) {
        FuncBall f = random_ball(8), g = random_ball(8);
        const double nf = f.norm_rho(), ng = g.norm_rho();
        CHECK((f + g).norm_rho() <= (nf + ng) * (1 + 1e-10));
        CHECK(mul(f, g).norm_rho() <= nf * ng * (1 + 1e-10));
    }
}

TEST_CASE("partial differentiates the kept part exactly")
{
    // d/dx (x^2 y) = 2 x y in centered coordinates
    FuncBall f(PolyI::monomial(9, 2, 1, Interval(1.0)), 0.0);
    FuncBall d = partial(f, 1);
    CHECK(d.poly().at(1, 1).contains(2.0));
    CHECK(d.poly().at(1, 1).width() < 1e-15);
    CHECK(d.tail() == 0.0);

    FuncBall c(PolyI::constant(5, Interval(3.0)), 0.0);
    FuncBall dc = partial(c, 2);
    CHECK(dc.poly().max_coeff_mag() == 0.0);
    CHECK(dc.tail() == 0.0);
}

TEST_CASE("partial tail obeys the Cauchy bound")
{
    BallGeometry g;  // rho 1.6, rho_outer 1.75
    FuncBall f(PolyI(2), 0.1, g);
    FuncBall d = partial(f, 1);
    CHECK(d.tail() <= 0.1 / (g.rho_outer - g.rho) * (1 + 1e-12));
    CHECK(d.tail() > 0.0);
    CHECK(d.geom().rho_outer == Catch::Approx(std::sqrt(g.rho * g.rho_outer)));
}

TEST_CASE("partial encloses central finite differences with extrapolation")
{
    for (int it = 0; it < 10; ++it) {
        FuncBall f = random_ball(10);
        FuncBall d1 = partial(f, 1);
        const double x = 0.3, y = 0.7;
        auto fd = [&](double h) { return (eval_mid(f, x + h, y) - eval_mid(f, x - h, y)) / (2 * h); };
        const double h1 = 1e-4, h2 = 1e-5;
        const double D1 = fd(h1), D2 = fd(h2);
        const double extrap = (D2 * h1 * h1 - D1 * h2 * h2) / (h1 * h1 - h2 * h2);
        Interval enc = eval(d1, IVec2(Interval(x), Interval(y)));
        CHECK(widened(enc, 1e-9).contains(extrap));
    }
}

TEST_CASE("compose2 projections and monomial composition")
{
    FuncBall fx = from_raw_monomials(8, {{1, 0, 1.0}});   // f(x,y) = x
    FuncBall u = random_ball(8, 0.05);
    FuncBall v = random_ball(8, 0.05);
    // keep ranges inside the analyticity disk
    u.poly().at(0, 0) += Interval(0.5);
    v.poly().at(0, 0) += Interval(0.5);
    FuncBall c = compose2(fx, u, v);
    for (std::size_t k = 0; k < u.poly().size(); ++k)
        CHECK(widened(c.poly()[k], 1e-12).contains(u.poly()[k]));

    FuncBall fxy = from_raw_monomials(8, {{1, 1, 1.0}});  // f = x*y
    FuncBall rawx = from_raw_monomials(8, {{1, 0, 1.0}});
    FuncBall comp = compose2(fxy, rawx, rawx);            // x^2
    FuncBall x2 = from_raw_monomials(8, {{2, 0, 1.0}});
    for (std::size_t k = 0; k < comp.poly().size(); ++k)
        CHECK(widened(comp.poly()[k], 1e-12).contains(x2.poly()[k].mid()));
}

TEST_CASE("compose2 rejects range escapes")
{
    FuncBall f = random_ball(6);
    FuncBall u = from_raw_monomials(6, {{1, 0, 5.0}});  // range way outside
    FuncBall v = from_raw_monomials(6, {{0, 1, 1.0}});
    CHECK_THROWS_AS(compose2(f, u, v), domain_error);
}

TEST_CASE("containment semantics through add, mul, compose")
{
    std::uniform_real_distribution<double> t(-1.0, 1.0);
    for (int it = 0; it < 50; ++it) {
        FuncBall F = random_ball(6, 0.3), G = random_ball(6, 0.3);
        // concrete members: midpoint polynomials
        PolyD pf = midpoint(F.poly()), pg = midpoint(G.poly());
        FuncBall S = F + G, P = mul(F, G);
        for (int pt = 0; pt < 5; ++pt) {
            const double dx = 0.9 * t(rng), dy = 0.9 * t(rng);
            const double vf = pf.eval(dx, dy), vg = pg.eval(dx, dy);
            IVec2 q(Interval(0.5 + dx), Interval(0.5 + dy));
            CHECK(widened(eval(S, q), 1e-11).contains(vf + vg));
            CHECK(widened(eval(P, q), 1e-11).contains(vf * vg));
        }
    }
}

TEST_CASE("reciprocal of a constant and geometric series")
{
    FuncBall two(PolyI::constant(8, Interval(2.0)), 0.0);
    FuncBall half = reciprocal(two);
    CHECK(half.poly().at(0, 0).contains(0.5));
    CHECK(half.poly().at(0, 0).width() < 1e-14);

    // f = 1 + eps*x: reciprocal is the geometric series in -eps*x
    const double eps = 0.01;
    PolyI p = PolyI::constant(8, Interval(1.0)) + PolyI::monomial(8, 1, 0, Interval(eps));
    FuncBall f(std::move(p), 0.0);
    FuncBall r = reciprocal(f);
    CHECK(r.poly().at(0, 0).contains(1.0));
    CHECK(widened(r.poly().at(1, 0), 1e-14).contains(-eps));
    CHECK(widened(r.poly().at(2, 0), 1e-14).contains(eps * eps));
    // truncated geometric remainder: ||eps x||^k sums
    const double q = eps * 1.75;
    CHECK(r.tail() <= std::pow(q, 9) / (1 - q) * 2.0 + 1e-30);
}

TEST_CASE("reciprocal round-trip stays consistent on random balls")
{
    std::uniform_real_distribution<double> t(-1.0, 1.0);
    for (int it = 0; it < 20; ++it) {
        FuncBall f = random_ball(6, 0.1);
        f.poly().at(0, 0) += Interval(2.0);  // keep away from zero
        FuncBall rr = reciprocal(reciprocal(f));
        PolyD pf = midpoint(f.poly());
        for (int pt = 0; pt < 5; ++pt) {
            const double dx = t(rng), dy = t(rng);
            const double vf = pf.eval(dx, dy);
            Interval enc = eval(rr, IVec2(Interval(0.5 + dx), Interval(0.5 + dy)));
            CHECK(widened(enc, 1e-9).contains(vf));
        }
    }
}

TEST_CASE("reciprocal rejects ranges containing zero")
{
    FuncBall f = from_raw_monomials(6, {{1, 0, 1.0}});  // x vanishes inside the disk
    CHECK_THROWS_AS(reciprocal(f), domain_error);
}

TEST_CASE("symmetric projection is idempotent and fixes symmetric input")
{
    // f = x: ds/dx = 1 is symmetric
    FuncBall fx = from_raw_monomials(8, {{1, 0, 1.0}});
    FuncBall p = symmetric_project(fx);
    for (std::size_t k = 0; k < fx.poly().size(); ++k)
        CHECK(widened(p.poly()[k], 1e-14).contains(fx.poly()[k]));
    CHECK(symmetric_within_overlap(p));

    for (int it = 0; it < 10; ++it) {
        FuncBall f = random_ball(9);
        FuncBall p1 = symmetric_project(f);
        FuncBall p2 = symmetric_project(p1);
        for (std::size_t k = 0; k < f.poly().size(); ++k)
            CHECK(std::fabs(p1.poly()[k].mid() - p2.poly()[k].mid()) <=
                  1e-13 * (1.0 + std::fabs(p1.poly()[k].mid())));
        CHECK(symmetric_within_overlap(FuncBall(
            symmetric_projection(exact(midpoint(p1.poly()))), 0.0, f.geom())));
    }
}

TEST_CASE("coefficient csv round trip format")
{
    FuncBall f = from_raw_monomials(3, {{1, 0, 1.0}, {0, 2, -0.25}});
    std::ostringstream os;
    write_coeff_csv(f, os);
    const std::string s = os.str();
    CHECK(s.find("i,j,lo,hi") == 0);
    // constant term in centered coordinates: 0.5 - 0.25 * 0.5^2 = 0.4375
    CHECK(s.find("0.4375") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + tri(3 + 1));
}
