#include <catch2/catch_amalgamated.hpp>

#include <pdr/interval.hpp>

#include <cmath>
#include <random>

using namespace pdr;

namespace {

std::mt19937_64 rng(20240901ull);

Interval random_interval(double span = 10.0)
{
    std::uniform_real_distribution<double> d(-span, span);
    double a = d(rng), b = d(rng);
    return Interval::hull(a, b);
}

// widen an interval outward by a random amount
Interval random_superset(const Interval& x)
{
    std::uniform_real_distribution<double> d(0.0, 2.0);
    return Interval(x.lo - d(rng), x.hi + d(rng));
}

double ulps_width(const Interval& x)
{
    double w = 0.0;
    double t = x.lo;
    while (t < x.hi && w < 64.0) {
        t = detail::next_up(t);
        w += 1.0;
    }
    return t >= x.hi ? w : 1e9;
}

} // namespace

TEST_CASE("interval construction and invariants")
{
    CHECK_THROWS_AS(Interval(2.0, 1.0), domain_error);
    Interval a(1.0, 2.0);
    CHECK(a.lo == 1.0);
    CHECK(a.hi == 2.0);
    CHECK(a.contains(1.5));
    CHECK(!a.contains_zero());
}

TEST_CASE("exact rational endpoint arithmetic")
{
    Interval a(1.0, 2.0), b(3.0, 4.0);
    Interval s = a + b;
    CHECK(s.lo == 4.0);
    CHECK(s.hi == 6.0);

    Interval m = Interval(-1.0, 1.0) * Interval(-1.0, 1.0);
    CHECK(m.lo == -1.0);
    CHECK(m.hi == 1.0);

    Interval sq = sqrt(Interval(4.0, 4.0));
    CHECK(sq.lo == 2.0);
    CHECK(sq.hi == 2.0);
}

TEST_CASE("division encloses 1/3 within 2 ulp")
{
    Interval q = Interval(1.0) / Interval(3.0);
    long double third = 1.0L / 3.0L;
    CHECK((long double)q.lo <= third);
    CHECK((long double)q.hi >= third);
    CHECK(ulps_width(q) <= 2.0);
}

TEST_CASE("division by zero-containing interval throws")
{
    CHECK_THROWS_AS(Interval(1.0) / Interval(-1.0, 1.0), domain_error);
    CHECK_THROWS_AS(Interval(1.0) / Interval(0.0, 2.0), domain_error);
}

TEST_CASE("point-interval ops stay within 4 ulp of float arithmetic")
{
    std::uniform_real_distribution<double> d(-100.0, 100.0);
    for (int it = 0; it < 500; ++it) {
        double x = d(rng), y = d(rng);
        Interval r = Interval(x) + Interval(y);
        CHECK(r.contains(x + y));
        CHECK(ulps_width(r) <= 4.0);
        r = Interval(x) * Interval(y);
        CHECK(r.contains(x * y));
        CHECK(ulps_width(r) <= 4.0);
        if (std::fabs(y) > 1e-6) {
            r = Interval(x) / Interval(y);
            CHECK(r.contains(x / y));
            CHECK(ulps_width(r) <= 4.0);
        }
    }
}

TEST_CASE("containment monotonicity across all ops, 1000 random cases")
{
    for (int it = 0; it < 1000; ++it) {
        Interval x = random_interval(), y = random_interval();
        Interval X = random_superset(x), Y = random_superset(y);
        CHECK(X.contains(x));
        CHECK(Y.contains(y));
        CHECK((X + Y).contains(x + y));
        CHECK((X - Y).contains(x - y));
        CHECK((X * Y).contains(x * y));
        if (!Y.contains_zero()) {
            CHECK((X / Y).contains(x / y));
        }
        CHECK(sqr(X).contains(sqr(x)));
        if (x.lo >= 0.0 && X.lo >= 0.0) CHECK(sqrt(X).contains(sqrt(x)));
    }
}

TEST_CASE("sampled membership is preserved by arithmetic")
{
    std::uniform_real_distribution<double> t(0.0, 1.0);
    for (int it = 0; it < 400; ++it) {
        Interval X = random_interval(), Y = random_interval();
        double x = X.lo + t(rng) * X.width();
        double y = Y.lo + t(rng) * Y.width();
        CHECK((X + Y).contains(x + y));
        CHECK((X * Y).contains(x * y));
        CHECK((X - Y).contains(x - y));
        if (!Y.contains_zero()) CHECK((X / Y).contains(x / y));
    }
}

TEST_CASE("determinism: identical inputs give bit-identical outputs")
{
    Interval a(-1.2345, 6.789), b(0.1, 2.5);
    Interval r1 = (a * b + a / b) - sqrt(sqr(a) + sqr(b));
    Interval r2 = (a * b + a / b) - sqrt(sqr(a) + sqr(b));
    CHECK(r1.lo == r2.lo);
    CHECK(r1.hi == r2.hi);
}

TEST_CASE("integer powers through sqr stay tight around zero")
{
    Interval a(-1.0, 1.0);
    Interval p2 = pow_n(a, 2);
    CHECK(p2.lo == 0.0);
    CHECK(p2.hi == 1.0);
    Interval p5 = pow_n(Interval(2.0), 5);
    CHECK(p5.contains(32.0));
    CHECK(ulps_width(p5) <= 4.0);
}

TEST_CASE("log and exp enclosures")
{
    Interval x(0.272);
    Interval l = log(x);
    CHECK(l.contains(std::log(0.272)));
    Interval e = exp(l);
    CHECK(e.lo <= 0.272);
    CHECK(e.hi >= 0.272);
    CHECK(e.width() < 1e-12);
}

TEST_CASE("vector norm encloses the 3-4-5 triangle")
{
    IVec2 v(Interval(3.0), Interval(4.0));
    Interval n = norm2_bound(v);
    CHECK(n.contains(5.0));
    CHECK(n.width() < 1e-13);
}

TEST_CASE("operator norm of identity and diagonal matrices")
{
    Interval smax, smin;
    singular_values(IMat2::identity(), smax, smin);
    CHECK(smax.contains(1.0));
    CHECK(smin.contains(1.0));
    CHECK(smax.width() < 1e-13);

    IMat2 d = IMat2::diagonal(Interval(2.0), Interval(0.5));
    singular_values(d, smax, smin);
    CHECK(smax.contains(2.0));
    CHECK(smin.contains(0.5));
    CHECK(smax.width() < 1e-12);
    CHECK(smin.width() < 1e-12);
}

TEST_CASE("matrix-vector product encloses pointwise products")
{
    std::uniform_real_distribution<double> t(0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        IMat2 M(random_interval(2.0), random_interval(2.0), random_interval(2.0),
                random_interval(2.0));
        IVec2 v(random_interval(2.0), random_interval(2.0));
        double a = M.a.lo + t(rng) * M.a.width();
        double b = M.b.lo + t(rng) * M.b.width();
        double c = M.c.lo + t(rng) * M.c.width();
        double d = M.d.lo + t(rng) * M.d.width();
        double x = v.x.lo + t(rng) * v.x.width();
        double u = v.u.lo + t(rng) * v.u.width();
        IVec2 r = M * v;
        CHECK(r.x.contains(a * x + b * u));
        CHECK(r.u.contains(c * x + d * u));
        // singular value enclosures contain the member's singular values
        Interval smax, smin;
        singular_values(M, smax, smin);
        double e = a * a + b * b + c * c + d * d;
        double f = a * a + b * b - c * c - d * d;
        double g = 2.0 * (a * c + b * d);
        double h = std::sqrt(f * f + g * g);
        CHECK(smax.hi >= std::sqrt(0.5 * (e + h)) * (1.0 - 1e-14));
        CHECK(smin.lo <= std::sqrt(std::max(0.0, 0.5 * (e - h))) * (1.0 + 1e-14) + 1e-300);
    }
}

TEST_CASE("shortest round-trip formatting")
{
    double x = 0.1;
    std::string s = format_shortest(x);
    CHECK(std::stod(s) == x);
    CHECK(s == "0.1");
}
