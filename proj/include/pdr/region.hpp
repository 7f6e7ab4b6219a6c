#ifndef PDR_REGION_HPP
#define PDR_REGION_HPP

#include <pdr/certificate.hpp>
#include <pdr/genmap.hpp>

#include <functional>
#include <variant>
#include <vector>

// Planar region machinery: ellipses, parallelograms and box unions with
// certified images, inclusion tests and derivative-norm bounds over regions.
// Images are computed by covering a region with grid cells and pushing each
// cell through an interval map enclosure; all verdicts are sound for every
// member of the interval objects involved.

namespace pdr {

struct Ellipse {
    double cx = 0.0, cu = 0.0;
    double ax = 1.0, au = 1.0;  // semi-axes, positive

    Interval quad_form(const IVec2& p) const
    {
        const Interval qx = (p.x - Interval(cx)) / Interval(ax);
        const Interval qu = (p.u - Interval(cu)) / Interval(au);
        return sqr(qx) + sqr(qu);
    }
};

struct Parallelogram {
    double cx = 0.0, cu = 0.0;
    Vec2 span1, span2;       // spanning unit vectors
    double s1 = 1.0, s2 = 1.0;  // scales: the region is c + a*span1 + b*span2, |a|<=s1, |b|<=s2

    // coordinates (a,b) of p - c in the span basis, interval Cramer solve
    std::pair<Interval, Interval> coords(const IVec2& p) const
    {
        const Interval dx = p.x - Interval(cx), du = p.u - Interval(cu);
        const Interval det = Interval(span1.x) * Interval(span2.u) -
                             Interval(span2.x) * Interval(span1.u);
        const Interval a = (dx * Interval(span2.u) - Interval(span2.x) * du) / det;
        const Interval b = (Interval(span1.x) * du - dx * Interval(span1.u)) / det;
        return {a, b};
    }
};

struct BoxUnion {
    std::vector<IVec2> boxes;

    IVec2 bounding_box() const
    {
        if (boxes.empty()) throw domain_error("BoxUnion: empty");
        IVec2 b = boxes.front();
        for (const IVec2& x : boxes) b = hull(b, x);
        return b;
    }
};

using Region = std::variant<Ellipse, Parallelogram, BoxUnion>;

enum class Membership { inside, outside, boundary };

inline Membership membership(const Ellipse& e, const IVec2& box)
{
    const Interval q = e.quad_form(box);
    if (q.hi < 1.0) return Membership::inside;
    if (q.lo > 1.0) return Membership::outside;
    return Membership::boundary;
}

inline Membership membership(const Parallelogram& pg, const IVec2& box)
{
    const auto [a, b] = pg.coords(box);
    if (a.mag() < pg.s1 && b.mag() < pg.s2) return Membership::inside;
    if (a.lo > pg.s1 || a.hi < -pg.s1 || b.lo > pg.s2 || b.hi < -pg.s2)
        return Membership::outside;
    return Membership::boundary;
}

inline IVec2 region_bounding_box(const Region& r)
{
    if (const Ellipse* e = std::get_if<Ellipse>(&r))
        return IVec2(Interval(e->cx - e->ax, e->cx + e->ax),
                     Interval(e->cu - e->au, e->cu + e->au));
    if (const Parallelogram* p = std::get_if<Parallelogram>(&r)) {
        const double rx = p->s1 * std::fabs(p->span1.x) + p->s2 * std::fabs(p->span2.x);
        const double ru = p->s1 * std::fabs(p->span1.u) + p->s2 * std::fabs(p->span2.u);
        return IVec2(Interval(p->cx - rx, p->cx + rx), Interval(p->cu - ru, p->cu + ru));
    }
    return std::get<BoxUnion>(r).bounding_box();
}

inline Membership membership(const Region& r, const IVec2& box)
{
    if (const Ellipse* e = std::get_if<Ellipse>(&r)) return membership(*e, box);
    if (const Parallelogram* p = std::get_if<Parallelogram>(&r)) return membership(*p, box);
    // box union: inside if contained in a single box, outside if disjoint
    // from all of them (finer answers come from the coverage test below)
    const BoxUnion& bu = std::get<BoxUnion>(r);
    bool disjoint_all = true;
    for (const IVec2& b : bu.boxes) {
        if (b.contains(box)) return Membership::inside;
        if (!b.disjoint(box)) disjoint_all = false;
    }
    return disjoint_all ? Membership::outside : Membership::boundary;
}

// Grid cells (2^depth per axis over the bounding box) that are not certified
// outside the region.
inline std::vector<IVec2> cover_cells(const Region& r, int depth)
{
    const IVec2 bb = region_bounding_box(r);
    const int n = 1 << depth;
    std::vector<IVec2> out;
    const double x0 = bb.x.lo, wx = bb.x.width() / n;
    const double u0 = bb.u.lo, wu = bb.u.width() / n;
    for (int i = 0; i < n; ++i) {
        const Interval X(x0 + i * wx, x0 + (i + 1) * wx);
        for (int j = 0; j < n; ++j) {
            const Interval U(u0 + j * wu, u0 + (j + 1) * wu);
            if (membership(r, IVec2(X, U)) != Membership::outside)
                out.push_back(IVec2(X, U));
        }
    }
    return out;
}

// Fresh uniform cells of size at most h covering a box union.
inline std::vector<IVec2> recover_cells(const BoxUnion& bu, double hx, double hu)
{
    const IVec2 bb = bu.bounding_box();
    const int nx = std::max(1, int(std::ceil(bb.x.width() / hx)));
    const int nu = std::max(1, int(std::ceil(bb.u.width() / hu)));
    // bucket index over the fine grid
    std::vector<char> hit(std::size_t(nx) * nu, 0);
    const double x0 = bb.x.lo, u0 = bb.u.lo;
    const double wx = bb.x.width() / nx, wu = bb.u.width() / nu;
    for (const IVec2& b : bu.boxes) {
        int i0 = std::clamp(int((b.x.lo - x0) / wx), 0, nx - 1);
        int i1 = std::clamp(int((b.x.hi - x0) / wx), 0, nx - 1);
        int j0 = std::clamp(int((b.u.lo - u0) / wu), 0, nu - 1);
        int j1 = std::clamp(int((b.u.hi - u0) / wu), 0, nu - 1);
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j) hit[std::size_t(i) * nu + j] = 1;
    }
    std::vector<IVec2> out;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nu; ++j)
            if (hit[std::size_t(i) * nu + j])
                out.push_back(IVec2(Interval(x0 + i * wx, x0 + (i + 1) * wx),
                                    Interval(u0 + j * wu, u0 + (j + 1) * wu)));
    return out;
}

// A certified planar map: box image enclosure plus derivative enclosure.
struct PlanarMap {
    std::string name;
    std::function<IVec2(const IVec2&)> image;
    std::function<IMat2(const IVec2&)> diff;
};

inline PlanarMap scaling_map(const ScalingPair& sc)
{
    const IMat2 L = IMat2::diagonal(sc.lambda, sc.mu);
    return {"Lambda",
            [L](const IVec2& p) { return L * p; },
            [L](const IVec2&) { return L; }};
}

inline PlanarMap reflection_map()
{
    return {"T", [](const IVec2& p) { return IVec2(p.x, -p.u); },
            [](const IVec2&) {
                return IMat2(Interval(1.0), Interval(0.0), Interval(0.0), Interval(-1.0));
            }};
}

inline PlanarMap iterate_map(const GeneratingMap& m, int n)
{
    std::string nm = n == 3 ? "G" : ("F^" + std::to_string(n));
    return {std::move(nm),
            [&m, n](const IVec2& p) { return m.iterate(n, p); },
            [&m, n](const IVec2& p) {
                IMat2 d;
                m.iterate(n, p, &d);
                return d;
            }};
}

inline PlanarMap compose(const PlanarMap& outer, const PlanarMap& inner)
{
    return {outer.name + "*" + inner.name,
            [&outer, &inner](const IVec2& p) { return outer.image(inner.image(p)); },
            [&outer, &inner](const IVec2& p) {
                const IMat2 di = inner.diff(p);
                return outer.diff(inner.image(p)) * di;
            }};
}

// Push every cover cell through the map.
inline BoxUnion image_under(const PlanarMap& map, const std::vector<IVec2>& cells)
{
    BoxUnion out;
    out.boxes.reserve(cells.size());
    for (const IVec2& c : cells) out.boxes.push_back(map.image(c));
    return out;
}

inline BoxUnion image_under(const PlanarMap& map, const Region& r, int depth)
{
    return image_under(map, cover_cells(r, depth));
}

// ---- inclusion checking -----------------------------------------------

struct InclusionResult {
    std::string verdict;  // verified | failed | indeterminate
    double margin = 0.0;  // positive distance to the boundary (quad-form units)
    std::size_t checked = 0;
};

// every box inside an analytic region, with positive margin when strict
inline InclusionResult check_inclusion(const BoxUnion& inner, const Region& outer, bool strict,
                                       int refine_depth = 6)
{
    InclusionResult res;
    res.verdict = "verified";
    double margin = 1e300;
    // recursive test with subdivision for boundary-uncertain boxes
    std::function<bool(const IVec2&, int)> ok = [&](const IVec2& b, int depth) {
        const Membership m = membership(outer, b);
        if (m == Membership::inside) {
            if (const Ellipse* e = std::get_if<Ellipse>(&outer)) {
                margin = std::min(margin, 1.0 - e->quad_form(b).hi);
            } else {
                margin = std::min(margin, 0.0);
            }
            return true;
        }
        if (m == Membership::outside || depth == 0) return false;
        const double mx = b.x.mid(), mu = b.u.mid();
        const Interval xs[2] = {Interval(b.x.lo, mx), Interval(mx, b.x.hi)};
        const Interval us[2] = {Interval(b.u.lo, mu), Interval(mu, b.u.hi)};
        for (const Interval& X : xs)
            for (const Interval& U : us)
                if (!ok(IVec2(X, U), depth - 1)) return false;
        return true;
    };
    for (const IVec2& b : inner.boxes) {
        ++res.checked;
        if (!ok(b, refine_depth)) {
            res.verdict = "indeterminate";
            res.margin = 0.0;
            return res;
        }
    }
    res.margin = margin;
    if (strict && !(margin > 0.0)) res.verdict = "indeterminate";
    return res;
}

// ---- box union coverage (inner box contained in a union of boxes) ------

class BoxGridIndex {
public:
    explicit BoxGridIndex(BoxUnion bu, int buckets = 256) : bu_(std::move(bu)), n_(buckets)
    {
        bb_ = bu_.bounding_box();
        cells_.assign(std::size_t(n_) * n_, {});
        for (std::size_t k = 0; k < bu_.boxes.size(); ++k) {
            const auto [i0, i1, j0, j1] = range(bu_.boxes[k]);
            for (int i = i0; i <= i1; ++i)
                for (int j = j0; j <= j1; ++j)
                    cells_[std::size_t(i) * n_ + j].push_back(int(k));
        }
    }

    // is the query box covered by the union? subdivision-based, sound
    bool covered(const IVec2& q, int depth = 12) const
    {
        if (q.x.hi < bb_.x.lo || q.x.lo > bb_.x.hi || q.u.hi < bb_.u.lo || q.u.lo > bb_.u.hi)
            return false;
        const auto [i0, i1, j0, j1] = range(q);
        std::vector<int> cand;
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                for (int k : cells_[std::size_t(i) * n_ + j]) cand.push_back(k);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        return covered_rec(q, cand, depth);
    }

    // does the query box meet any box of the union?
    bool meets(const IVec2& q) const
    {
        if (q.x.hi < bb_.x.lo || q.x.lo > bb_.x.hi || q.u.hi < bb_.u.lo || q.u.lo > bb_.u.hi)
            return false;
        const auto [i0, i1, j0, j1] = range(q);
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                for (int k : cells_[std::size_t(i) * n_ + j])
                    if (!bu_.boxes[k].disjoint(q)) return true;
        return false;
    }

private:
    std::array<int, 4> range(const IVec2& b) const
    {
        const double wx = bb_.x.width() / n_, wu = bb_.u.width() / n_;
        int i0 = std::clamp(int((b.x.lo - bb_.x.lo) / wx), 0, n_ - 1);
        int i1 = std::clamp(int((b.x.hi - bb_.x.lo) / wx), 0, n_ - 1);
        int j0 = std::clamp(int((b.u.lo - bb_.u.lo) / wu), 0, n_ - 1);
        int j1 = std::clamp(int((b.u.hi - bb_.u.lo) / wu), 0, n_ - 1);
        return {i0, i1, j0, j1};
    }

    bool covered_rec(const IVec2& q, const std::vector<int>& cand, int depth) const
    {
        std::vector<int> live;
        for (int k : cand) {
            const IVec2& b = bu_.boxes[k];
            if (b.contains(q)) return true;
            if (!b.disjoint(q)) live.push_back(k);
        }
        if (live.empty() || depth == 0) return false;
        const double mx = q.x.mid(), mu = q.u.mid();
        const Interval xs[2] = {Interval(q.x.lo, mx), Interval(mx, q.x.hi)};
        const Interval us[2] = {Interval(q.u.lo, mu), Interval(mu, q.u.hi)};
        for (const Interval& X : xs)
            for (const Interval& U : us)
                if (!covered_rec(IVec2(X, U), live, depth - 1)) return false;
        return true;
    }

    BoxUnion bu_;
    int n_;
    IVec2 bb_;
    std::vector<std::vector<int>> cells_;
};

inline InclusionResult check_inclusion(const BoxUnion& inner, const BoxGridIndex& outer,
                                       int split_depth = 12)
{
    InclusionResult res;
    res.verdict = "verified";
    for (const IVec2& b : inner.boxes) {
        ++res.checked;
        if (!outer.covered(b, split_depth)) {
            res.verdict = "indeterminate";
            return res;
        }
    }
    return res;
}

// ---- norm bounds over regions -------------------------------------------

struct NormBoundReport {
    std::string region_id;
    std::string map_id;
    std::string bound_kind;  // sup_opnorm | inf_vecnorm
    Interval value{0.0};
    int subdivision_depth = 0;
    std::size_t boxes_processed = 0;
};

// Certified sup of the spectral norm of a derivative field over cover
// boxes. Boxes whose bound exceeds `accept_hi` are split (quadtree) until
// max_depth extra levels; the returned hi never grows under refinement.
template <class DiffFn>
NormBoundReport sup_opnorm(DiffFn&& diff, const std::vector<IVec2>& seed_boxes,
                           double accept_hi, int max_depth)
{
    NormBoundReport rep;
    rep.bound_kind = "sup_opnorm";
    struct Item {
        IVec2 box;
        int depth;
        double parent_hi;
    };
    std::vector<Item> work;
    for (const IVec2& b : seed_boxes) work.push_back({b, 0, 1e300});
    double sup_hi = 0.0, sup_lo = 0.0;
    while (!work.empty()) {
        Item it = work.back();
        work.pop_back();
        ++rep.boxes_processed;
        Interval bound;
        try {
            bound = opnorm_bound(diff(it.box));
        } catch (const domain_error&) {
            if (it.depth >= max_depth) throw;
            bound = Interval(0.0, 1e300);
        }
        const double hi = std::min(bound.hi, it.parent_hi);
        // midpoint sample gives a lower bound for the achieved sup
        sup_lo = std::max(sup_lo, bound.lo);
        if (hi <= accept_hi || it.depth >= max_depth) {
            sup_hi = std::max(sup_hi, hi);
            rep.subdivision_depth = std::max(rep.subdivision_depth, it.depth);
            continue;
        }
        const double mx = it.box.x.mid(), mu = it.box.u.mid();
        const Interval xs[2] = {Interval(it.box.x.lo, mx), Interval(mx, it.box.x.hi)};
        const Interval us[2] = {Interval(it.box.u.lo, mu), Interval(mu, it.box.u.hi)};
        for (const Interval& X : xs)
            for (const Interval& U : us) work.push_back({IVec2(X, U), it.depth + 1, hi});
    }
    rep.value = Interval(std::min(sup_lo, sup_hi), sup_hi);
    return rep;
}

// Certified inf of the smallest singular value of a derivative field.
template <class DiffFn>
NormBoundReport inf_vecnorm(DiffFn&& diff, const std::vector<IVec2>& seed_boxes,
                            double accept_lo, int max_depth)
{
    NormBoundReport rep;
    rep.bound_kind = "inf_vecnorm";
    struct Item {
        IVec2 box;
        int depth;
        double parent_lo;
    };
    std::vector<Item> work;
    for (const IVec2& b : seed_boxes) work.push_back({b, 0, 0.0});
    double inf_lo = 1e300, inf_hi = 1e300;
    while (!work.empty()) {
        Item it = work.back();
        work.pop_back();
        ++rep.boxes_processed;
        Interval bound;
        try {
            bound = min_singular_bound(diff(it.box));
        } catch (const domain_error&) {
            if (it.depth >= max_depth) throw;
            bound = Interval(0.0, 1e300);
        }
        const double lo = std::max(bound.lo, it.parent_lo);
        inf_hi = std::min(inf_hi, bound.hi);
        if (lo >= accept_lo || it.depth >= max_depth) {
            inf_lo = std::min(inf_lo, lo);
            rep.subdivision_depth = std::max(rep.subdivision_depth, it.depth);
            continue;
        }
        const double mx = it.box.x.mid(), mu = it.box.u.mid();
        const Interval xs[2] = {Interval(it.box.x.lo, mx), Interval(mx, it.box.x.hi)};
        const Interval us[2] = {Interval(it.box.u.lo, mu), Interval(mu, it.box.u.hi)};
        for (const Interval& X : xs)
            for (const Interval& U : us) work.push_back({IVec2(X, U), it.depth + 1, lo});
    }
    rep.value = Interval(inf_lo, std::max(inf_lo, inf_hi));
    return rep;
}

// sqrt(|lambda_-| A1), the Hausdorff-convergence rate of the hyperbolic
// approximations
inline Interval theta_rate(const Interval& lambda_minus, const Interval& A1)
{
    if (!(lambda_minus.mig() > 0.0) || !(A1.lo > 0.0))
        throw domain_error("theta_rate: inputs must be positive");
    return sqrt(abs(lambda_minus) * A1);
}

// ---- the bounded trapping system ------------------------------------------

// e1 is the seed ellipse; e2 = G(e1), e4 = T(e2), e3 = Lambda(e2 u e4) are
// box-union enclosures built at the given cover depth.
struct TrappingSets {
    Ellipse e1;
    BoxUnion e2, e3, e4;
    int depth = 0;
};

inline Ellipse primary_ellipse()
{
    return Ellipse{-0.0328, 0.0, 0.169, 0.010683153};
}

inline TrappingSets build_trapping_sets(const GeneratingMap& F, const ScalingPair& sc,
                                        int depth)
{
    TrappingSets ts;
    ts.e1 = primary_ellipse();
    ts.depth = depth;
    const PlanarMap G = iterate_map(F, 3);
    const PlanarMap L = scaling_map(sc);
    const PlanarMap T = reflection_map();
    ts.e2 = image_under(G, Region(ts.e1), depth);
    for (const IVec2& b : ts.e2.boxes) ts.e4.boxes.push_back(T.image(b));
    for (const IVec2& b : ts.e2.boxes) ts.e3.boxes.push_back(L.image(b));
    for (const IVec2& b : ts.e4.boxes) ts.e3.boxes.push_back(L.image(b));
    return ts;
}

// separation of the x-projection of e2 u e4 from 0 and from its own
// lambda-rescaling: |lambda_-| sup |P_x| < inf |P_x|
struct SeparationResult {
    Interval sup_abs_x{0.0};
    Interval inf_abs_x{0.0};
    Interval margin{0.0};
    bool verified = false;
};

inline SeparationResult check_separation(const TrappingSets& ts, const Interval& lambda)
{
    SeparationResult r;
    double sup_hi = 0.0, sup_lo = 0.0, inf_lo = 1e300, inf_hi = 1e300;
    auto feed = [&](const IVec2& b) {
        sup_hi = std::max(sup_hi, b.x.mag());
        sup_lo = std::max(sup_lo, b.x.mig());
        inf_lo = std::min(inf_lo, b.x.mig());
        inf_hi = std::min(inf_hi, b.x.mag());
    };
    for (const IVec2& b : ts.e2.boxes) feed(b);
    for (const IVec2& b : ts.e4.boxes) feed(b);
    r.sup_abs_x = Interval(sup_lo, sup_hi);
    r.inf_abs_x = Interval(inf_lo, inf_hi);
    r.margin = Interval(inf_lo) - abs(lambda) * Interval(sup_hi);
    r.verified = (inf_lo > 0.0) && (r.margin.lo > 0.0);
    return r;
}

} // namespace pdr

#endif
