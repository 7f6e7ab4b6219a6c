#include <catch2/catch_amalgamated.hpp>

#include <pdr/genmap.hpp>

#include <random>

using namespace pdr;

namespace {

std::mt19937_64 rng(90533811ull);

// F for s = x + y is the explicit linear map (x,u) -> (-x-u, -u); a wide
// disk keeps multi-step orbits of O(1) points inside the domain
GeneratingMap linear_map(int deg = 8)
{
    BallGeometry g;
    g.rho = 6.0;
    g.rho_outer = 6.5;
    return GeneratingMap(from_raw_monomials(deg, {{1, 0, 1.0}, {0, 1, 1.0}}, g));
}

// random perturbation of the linear generating function, small enough that
// the implicit solve stays well-conditioned on the working disk
GeneratingMap random_cubic_map()
{
    std::uniform_real_distribution<double> d(-0.05, 0.05);
    std::vector<std::tuple<int, int, double>> terms = {{1, 0, 1.0}, {0, 1, 1.0}};
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j) terms.push_back({i, j, d(rng)});
    return GeneratingMap(from_raw_monomials(8, terms));
}

} // namespace

TEST_CASE("linear generating function: implicit solve")
{
    GeneratingMap m = linear_map();
    // -s(y,x) = u with s = x+y: y = -x-u; at (x,u) = (1,-3): y = 2
    Interval y = m.solve_y(Interval(1.0), Interval(-3.0));
    CHECK(y.contains(2.0));
    CHECK(y.width() < 1e-9);
    CHECK(m.solve_y_f(1.0, -3.0) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("linear generating function: apply, inverse, iterate")
{
    GeneratingMap m = linear_map();

    IVec2 f0 = m.apply(IVec2(Interval(0.0), Interval(0.0)));
    CHECK(f0.x.contains(0.0));
    CHECK(f0.u.contains(0.0));
    CHECK(f0.x.width() < 1e-10);

    IVec2 f1 = m.apply(IVec2(Interval(1.0), Interval(-3.0)));
    CHECK(f1.x.contains(2.0));
    CHECK(f1.u.contains(3.0));

    IVec2 b = m.inverse_apply(IVec2(Interval(2.0), Interval(3.0)));
    CHECK(b.x.contains(1.0));
    CHECK(b.u.contains(-3.0));

    // F^2(x,u) = (x+2u, u): at (1,1) -> (3,1)
    IVec2 it2 = m.iterate(2, IVec2(Interval(1.0), Interval(1.0)));
    CHECK(it2.x.contains(3.0));
    CHECK(it2.u.contains(1.0));

    // n = 0 is the identity
    IVec2 it0 = m.iterate(0, IVec2(Interval(0.3), Interval(0.2)));
    CHECK(it0.x.contains(0.3));
    CHECK(it0.u.contains(0.2));
}

TEST_CASE("linear generating function: derivative matrix")
{
    GeneratingMap m = linear_map();
    IMat2 d = m.derivative(IVec2(Interval(0.2), Interval(-0.1)));
    CHECK(d.a.contains(-1.0));
    CHECK(d.b.contains(-1.0));
    CHECK(d.c.contains(0.0));
    CHECK(d.d.contains(-1.0));
    CHECK(d.det().contains(1.0));
    CHECK(d.a.width() < 1e-10);
}

TEST_CASE("linear generating function: fixed point at the origin")
{
    GeneratingMap m = linear_map();
    IVec2 p = m.find_fixed_point(IVec2(Interval(0.1), Interval(0.0)));
    CHECK(p.x.contains(0.0));
    CHECK(p.u.contains(0.0));
    CHECK(p.x.width() < 1e-9);
}

TEST_CASE("random cubic maps: residuals at interval midpoints")
{
    std::uniform_real_distribution<double> dx(0.0, 0.7), du(-0.7, 0.0);
    for (int mm = 0; mm < 5; ++mm) {
        GeneratingMap m = random_cubic_map();
        for (int it = 0; it < 20; ++it) {
            const double x = dx(rng), u = du(rng);
            const double y = m.solve_y_f(x, u);
            CHECK(std::fabs(-m.eval_s_f(y, x) - u) < 1e-12);
        }
    }
}

TEST_CASE("symplectic determinant encloses 1 on random maps and points")
{
    std::uniform_real_distribution<double> dx(0.0, 0.6), du(-0.6, 0.0);
    int checked = 0;
    for (int mm = 0; mm < 10; ++mm) {
        GeneratingMap m = random_cubic_map();
        for (int it = 0; it < 10; ++it) {
            IVec2 p(Interval(dx(rng)), Interval(du(rng)));
            IMat2 d = m.derivative(p);
            CHECK(d.det().contains(1.0));
            ++checked;
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("reversibility: T F T F contains the identity")
{
    std::uniform_real_distribution<double> dx(0.0, 0.6), du(-0.6, 0.0);
    for (int mm = 0; mm < 5; ++mm) {
        GeneratingMap m = random_cubic_map();
        for (int it = 0; it < 10; ++it) {
            IVec2 p(Interval(dx(rng)), Interval(du(rng)));
            IVec2 fp = m.apply(p);
            IVec2 tft = m.apply(IVec2(fp.x, -fp.u));
            // T(F(T(F(p)))) = p
            CHECK(widened(tft.x, 1e-10).contains(p.x.mid()));
            CHECK(widened(-tft.u, 1e-10).contains(p.u.mid()));

            IVec2 round = m.inverse_apply(m.apply(p));
            CHECK(widened(round.x, 1e-10).contains(p.x.mid()));
            CHECK(widened(round.u, 1e-10).contains(p.u.mid()));
        }
    }
}

TEST_CASE("derivative agrees with central finite differences to O(h^2)")
{
    GeneratingMap m = random_cubic_map();
    const Vec2 p(0.3, -0.2);
    const Mat2 d = m.derivative_f(p);
    auto err_at = [&](double h) {
        const Vec2 fxp = m.apply_f({p.x + h, p.u}), fxm = m.apply_f({p.x - h, p.u});
        const Vec2 fup = m.apply_f({p.x, p.u + h}), fum = m.apply_f({p.x, p.u - h});
        const double e1 = std::fabs((fxp.x - fxm.x) / (2 * h) - d.a);
        const double e2 = std::fabs((fup.x - fum.x) / (2 * h) - d.b);
        const double e3 = std::fabs((fxp.u - fxm.u) / (2 * h) - d.c);
        const double e4 = std::fabs((fup.u - fum.u) / (2 * h) - d.d);
        return std::max(std::max(e1, e2), std::max(e3, e4));
    };
    const double e2 = err_at(1e-2), e3 = err_at(1e-3);
    CHECK(e3 < 1e-5);
    CHECK(e3 < e2 / 30.0);  // quadratic order: factor 100 expected, slack for noise
}

TEST_CASE("interval apply contains sampled member orbits")
{
    std::uniform_real_distribution<double> t(0.0, 1.0);
    GeneratingMap m = random_cubic_map();
    IVec2 box(Interval(0.30, 0.32), Interval(-0.21, -0.20));
    IVec2 img = m.apply_mvf(box);
    for (int it = 0; it < 50; ++it) {
        Vec2 p(box.x.lo + t(rng) * box.x.width(), box.u.lo + t(rng) * box.u.width());
        Vec2 fp = m.apply_f(p);
        CHECK(img.x.contains(fp.x));
        CHECK(img.u.contains(fp.u));
    }
    // mean value form beats the direct image on small boxes
    IVec2 direct = m.apply(box);
    CHECK(img.x.width() <= direct.x.width() * (1 + 1e-12));
}

TEST_CASE("orbit escape reports the failing step")
{
    GeneratingMap m = linear_map();
    // u grows linearly under F^-n; eventually y leaves the disk
    bool caught = false;
    try {
        m.iterate(40, IVec2(Interval(0.9), Interval(0.9)));
    } catch (const orbit_escape& e) {
        caught = true;
        CHECK(e.step >= 0);
    }
    CHECK(caught);
}
