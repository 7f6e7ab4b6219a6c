#ifndef PDR_STABLESET_HPP
#define PDR_STABLESET_HPP

#include <pdr/region.hpp>

#include <cstdint>
#include <map>
#include <random>

// The stable Cantor set, two ways: presentation-function pieces
// (psi0 = Lambda, psi1 = F o Lambda, words in {0,1}^n) and the
// hyperbolic-approximation hierarchy U_G^k over the Markov rectangles.
// Dimension bounds, odometer dynamics, orbit closure and finite-time
// Lyapunov exponents are checked on these objects.

namespace pdr {

// ---- binary words and the adding machine ----------------------------------

struct Word {
    std::vector<uint8_t> bits;  // w1..wn, w1 least significant

    explicit Word(int n, uint64_t value = 0) : bits(n)
    {
        if (n < 1) throw domain_error("Word: length must be >= 1");
        for (int k = 0; k < n; ++k) bits[k] = (value >> k) & 1;
    }

    int length() const { return int(bits.size()); }
    uint64_t value() const
    {
        uint64_t v = 0;
        for (int k = 0; k < length(); ++k) v |= uint64_t(bits[k]) << k;
        return v;
    }

    Word successor() const  // +1 in the dyadic group of length n
    {
        return Word(length(), (value() + 1) & ((uint64_t(1) << length()) - 1));
    }

    std::string str() const
    {
        std::string s;
        for (uint8_t b : bits) s += char('0' + b);
        return s;
    }
};

// ---- presentation functions ------------------------------------------------

// psi0 = Lambda_F, psi1 = F o psi0; `which` selects the branch
inline PlanarMap presentation(const GeneratingMap& m, const ScalingPair& sc, int which)
{
    const PlanarMap L = scaling_map(sc);
    if (which == 0) return L;
    if (which != 1) throw domain_error("presentation: branch must be 0 or 1");
    const PlanarMap F = iterate_map(m, 1);
    PlanarMap p = compose(F, L);
    p.name = "psi1";
    return p;
}

// ---- base set of the piece construction (Lemma 7.1 geometry) --------------

inline Ellipse outer_base_ellipse()  // B~
{
    return Ellipse{0.47, -0.04, 0.82, 0.301398806};
}

inline Ellipse inner_base_ellipse()  // B^
{
    return Ellipse{0.47, 0.0, 0.53, 0.002370226};
}

struct BaseSet {
    Ellipse btilde, bhat;
    BoxUnion image0, image1;     // psi0(B~), psi1(B~) enclosures
    std::vector<IVec2> cover;    // working cover of image0 u image1 u bhat
    bool images_inside = false;  // psi_i(B~) subset B~, certified
    bool images_disjoint = false;
    bool intersection_witness = false;  // F(psi1(B~)) and psi0(B~) share a point
    bool bhat_inside = false;           // B^ subset B~
};

// Builds the enclosures and certifies the Lemma 7.1 checks. The base set
// B_F is taken as psi0(B~) u psi1(B~) u B^: B^ c B~ is the connecting
// handle, psi_i(anything inside B~) lands back in the images by
// construction, so the union is forward-invariant under both branches.
inline BaseSet build_base_set(const GeneratingMap& m, const ScalingPair& sc, int depth = 6)
{
    BaseSet bs;
    bs.btilde = outer_base_ellipse();
    bs.bhat = inner_base_ellipse();
    const PlanarMap psi0 = presentation(m, sc, 0);
    const PlanarMap psi1 = presentation(m, sc, 1);

    const std::vector<IVec2> cells = cover_cells(Region(bs.btilde), depth);
    bs.image0 = image_under(psi0, cells);
    bs.image1 = image_under(psi1, cells);

    const InclusionResult in0 = check_inclusion(bs.image0, Region(bs.btilde), true);
    const InclusionResult in1 = check_inclusion(bs.image1, Region(bs.btilde), true);
    bs.images_inside = in0.verdict == "verified" && in1.verdict == "verified";

    // disjointness of the two images: every cross pair of boxes disjoint
    bs.images_disjoint = true;
    const IVec2 bb0 = bs.image0.bounding_box(), bb1 = bs.image1.bounding_box();
    if (!bb0.disjoint(bb1)) {
        for (const IVec2& a : bs.image0.boxes) {
            if (a.disjoint(bb1)) continue;
            for (const IVec2& b : bs.image1.boxes)
                if (!a.disjoint(b)) {
                    bs.images_disjoint = false;
                    break;
                }
            if (!bs.images_disjoint) break;
        }
    }

    // intersection witness: q = Lambda^-1(F^-2(0)) inside B~ certifies that
    // (0,0) = F(psi1(q)) lies in both F(psi1(B~)) and psi0(B~)
    try {
        const IVec2 zero(Interval(0.0), Interval(0.0));
        const IVec2 pre2 = m.iterate(-2, zero);
        const IVec2 q(pre2.x / sc.lambda, pre2.u / sc.mu);
        bs.intersection_witness = membership(bs.btilde, q) == Membership::inside;
    } catch (const domain_error&) {
        bs.intersection_witness = false;
    }

    bs.bhat_inside =
        check_inclusion(BoxUnion{cover_cells(Region(bs.bhat), 6)}, Region(bs.btilde), false)
            .verdict == "verified";

    // working cover: images keep their own boxes, the handle gets grid cells
    bs.cover = bs.image0.boxes;
    for (const IVec2& b : bs.image1.boxes) bs.cover.push_back(b);
    for (const IVec2& c : cover_cells(Region(bs.bhat), 5)) bs.cover.push_back(c);
    return bs;
}

// certified sup of ||D psi0|| and ||D psi1|| over the base set
struct ContractionReport {
    Interval psi0_bound{0.0};
    Interval psi1_bound{0.0};
    double bound() const { return std::max(psi0_bound.hi, psi1_bound.hi); }
    int depth = 0;
};

inline ContractionReport contraction_bound(const GeneratingMap& m, const ScalingPair& sc,
                                           const BaseSet& bs, double accept = 0.272,
                                           int max_depth = 6)
{
    ContractionReport rep;
    const PlanarMap psi0 = presentation(m, sc, 0);
    const PlanarMap psi1 = presentation(m, sc, 1);
    NormBoundReport r0 =
        sup_opnorm([&](const IVec2& b) { return psi0.diff(b); }, bs.cover, accept, max_depth);
    NormBoundReport r1 =
        sup_opnorm([&](const IVec2& b) { return psi1.diff(b); }, bs.cover, accept, max_depth);
    rep.psi0_bound = r0.value;
    rep.psi1_bound = r1.value;
    rep.depth = std::max(r0.subdivision_depth, r1.subdivision_depth);
    return rep;
}

// ---- pieces of the Cantor set ----------------------------------------------

struct Piece {
    Word word;
    std::vector<IVec2> boxes;

    Piece(Word w, std::vector<IVec2> b) : word(std::move(w)), boxes(std::move(b)) {}

    IVec2 bounding_box() const
    {
        IVec2 bb = boxes.front();
        for (const IVec2& b : boxes) bb = hull(bb, b);
        return bb;
    }

    // upper bound for the diameter from the bounding box
    double diameter_ub() const
    {
        const IVec2 bb = bounding_box();
        return norm2_bound(IVec2(Interval(bb.x.width()), Interval(bb.u.width()))).hi;
    }
};

struct PieceFailure : domain_error {
    std::string word;
    PieceFailure(const std::string& what, std::string w)
        : domain_error(what + " at word " + w), word(std::move(w))
    {
    }
};

// B^n_w = psi_{w1} o ... o psi_{wn} (B_F), built level by level:
// piece(n, v) = psi_{v&1}( piece(n-1, v>>1) ).
class PieceTree {
public:
    PieceTree(const GeneratingMap& m, const ScalingPair& sc, BaseSet base, double cover_h = 0.03)
        : m_(m), psi0_(presentation(m, sc, 0)), psi1_(presentation(m, sc, 1)),
          base_(std::move(base))
    {
        BoxUnion bu{base_.cover};
        levels_.push_back({Piece(Word(1, 0), recover_cells(bu, cover_h, cover_h))});
        // level 0 holds the base set itself under a dummy word
    }

    // pieces of depth n (1-indexed levels; level 0 is the base set)
    const std::vector<Piece>& level(int n)
    {
        while (int(levels_.size()) <= n) grow();
        return levels_[n];
    }

    const GeneratingMap& map() const { return m_; }

    // Lemma 7.2(2): pairwise disjoint enclosures
    void check_disjoint(int n)
    {
        const auto& ps = level(n);
        std::vector<IVec2> bbs;
        for (const Piece& p : ps) bbs.push_back(p.bounding_box());
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                if (bbs[i].disjoint(bbs[j])) continue;
                for (const IVec2& a : ps[i].boxes)
                    for (const IVec2& b : ps[j].boxes)
                        if (!a.disjoint(b))
                            throw PieceFailure("pieces overlap", ps[i].word.str() + "/" +
                                                                     ps[j].word.str());
            }
    }

    // Lemma 7.2(1): nesting of enclosures, child covered by parent
    void check_nesting(int n)
    {
        if (n < 2) return;
        const auto& child = level(n);
        const auto& parent = level(n - 1);
        for (const Piece& c : child) {
            const uint64_t pv = c.word.value() & ((uint64_t(1) << (n - 1)) - 1);
            BoxUnion pu{parent[pv].boxes};
            BoxGridIndex idx(pu, 64);
            for (const IVec2& b : c.boxes)
                if (!idx.covered(b)) throw PieceFailure("nesting fails", c.word.str());
        }
    }

    std::vector<double> diameters(int n)
    {
        std::vector<double> out;
        for (const Piece& p : level(n)) out.push_back(p.diameter_ub());
        return out;
    }

private:
    void grow()
    {
        const int n = int(levels_.size());
        const std::vector<Piece>& prev = levels_.back();
        std::vector<Piece> next;
        next.reserve(std::size_t(2) << n);
        const uint64_t count = uint64_t(1) << n;
        for (uint64_t v = 0; v < count; ++v) {
            const Piece& src = prev[n == 1 ? 0 : (v >> 1)];
            const PlanarMap& psi = (v & 1) ? psi1_ : psi0_;
            std::vector<IVec2> boxes;
            boxes.reserve(src.boxes.size());
            for (const IVec2& b : src.boxes) boxes.push_back(psi.image(b));
            next.emplace_back(Word(n, v), std::move(boxes));
        }
        levels_.push_back(std::move(next));
    }

    const GeneratingMap& m_;
    PlanarMap psi0_, psi1_;
    BaseSet base_;
    std::vector<std::vector<Piece>> levels_;
};

// ---- odometer dynamics -----------------------------------------------------

struct OdometerReport {
    int depth = 0;
    bool permutation_verified = false;  // images meet no piece other than p(w)
    bool images_covered = false;        // F(piece) covered by piece(p(w)) enclosures
    bool wraparound_hit = false;        // F(piece(2^n-1)) meets piece(0)
    std::vector<uint64_t> permutation;
};

inline OdometerReport odometer_check(PieceTree& tree, int n)
{
    OdometerReport rep;
    rep.depth = n;
    const auto& ps = tree.level(n);
    const uint64_t count = uint64_t(1) << n;
    const GeneratingMap& m = tree.map();

    std::vector<IVec2> bbs;
    for (const Piece& p : ps) bbs.push_back(p.bounding_box());

    rep.permutation_verified = true;
    rep.images_covered = true;
    for (uint64_t v = 0; v < count; ++v) {
        const uint64_t target = (v + 1) & (count - 1);
        rep.permutation.push_back(target);
        BoxUnion img;
        for (const IVec2& b : ps[v].boxes) img.boxes.push_back(m.apply_mvf(b));
        const IVec2 ibb = img.bounding_box();
        // image must be disjoint from every piece except the successor
        for (uint64_t w = 0; w < count; ++w) {
            if (w == target) continue;
            if (ibb.disjoint(bbs[w])) continue;
            for (const IVec2& a : img.boxes)
                for (const IVec2& b : ps[w].boxes)
                    if (!a.disjoint(b)) rep.permutation_verified = false;
        }
        if (target == 0) {
            // wrap-around: the image need only intersect piece(0)
            bool hits = false;
            for (const IVec2& a : img.boxes)
                for (const IVec2& b : ps[0].boxes)
                    if (!a.disjoint(b)) hits = true;
            rep.wraparound_hit = hits;
        } else {
            BoxGridIndex idx(BoxUnion{ps[target].boxes}, 64);
            for (const IVec2& a : img.boxes)
                if (!idx.covered(a)) rep.images_covered = false;
        }
    }
    return rep;
}

struct OrbitReport {
    int depth = 0;
    int iterates = 0;
    bool all_contained = false;
    bool odometer_order = false;
};

// iterates of the origin land in the pieces in adding-machine order
inline OrbitReport orbit_closure_check(PieceTree& tree, int n)
{
    OrbitReport rep;
    rep.depth = n;
    const auto& ps = tree.level(n);
    const uint64_t count = uint64_t(1) << n;
    const GeneratingMap& m = tree.map();

    std::vector<BoxGridIndex> idx;
    idx.reserve(count);
    std::vector<BoxUnion> keep(count);
    for (uint64_t v = 0; v < count; ++v) {
        keep[v] = BoxUnion{ps[v].boxes};
    }
    for (uint64_t v = 0; v < count; ++v) idx.emplace_back(keep[v], 64);

    rep.all_contained = true;
    rep.odometer_order = true;
    IVec2 p(Interval(0.0), Interval(0.0));
    for (uint64_t i = 0; i < count; ++i) {
        const uint64_t want = i & (count - 1);
        bool in_want = idx[want].covered(p);
        if (!in_want) {
            rep.odometer_order = false;
            bool anywhere = false;
            for (uint64_t v = 0; v < count && !anywhere; ++v) anywhere = idx[v].covered(p);
            if (!anywhere) rep.all_contained = false;
        }
        ++rep.iterates;
        p = m.apply_mvf(p);
    }
    return rep;
}

// ---- dimension bounds ------------------------------------------------------

inline Interval dimension_upper_bound(const Interval& vartheta)
{
    if (!(vartheta.lo > 0.0) || !(vartheta.hi < 1.0))
        throw domain_error("dimension_upper_bound: need 0 < vartheta < 1");
    return log(Interval(2.0)) / -log(vartheta);
}

inline Interval hausdorff_content(const std::vector<double>& diameters, double d)
{
    Interval acc(0.0);
    for (double diam : diameters) {
        if (diam <= 0.0) throw domain_error("hausdorff_content: degenerate piece");
        acc += exp(Interval(d) * log(Interval(diam)));
    }
    return acc;
}

// ---- hyperbolic hierarchy U_G^k over the Markov rectangles -----------------

inline Parallelogram markov_rect_0()
{
    return Parallelogram{0.670198, 0.0, Vec2(0.788578889012330, -0.614933602760558),
                         Vec2(0.788578889012330, 0.614933602760558), 0.083, 0.083};
}

inline Parallelogram markov_rect_1()
{
    return Parallelogram{-0.441811, 0.0, Vec2(0.750925931392967773, 0.660386436536671957),
                         Vec2(0.750925931392967773, -0.660386436536671957), 0.0655, 0.0655};
}

struct HierarchyLevel {
    int k = 0;
    double cellx = 0.0, cellu = 0.0;
    std::vector<IVec2> cells;
    int components = 0;
    double max_diameter = 0.0;
    double min_inradius = 0.0;  // largest inscribed cell-multiple, per component
};

// Outer cell approximation of U_G^k by pullback: a cell survives iff G(cell)
// meets the previous set and G^-1(cell) does too. Component counting joins
// cells sharing an edge or corner.
class Hierarchy {
public:
    Hierarchy(const GeneratingMap& m, int base_depth = 7, int cap_per_axis = 1 << 12)
        : m_(m), cap_(cap_per_axis)
    {
        d0_ = markov_rect_0();
        d1_ = markov_rect_1();
        Region r0(d0_), r1(d1_);
        const IVec2 b0 = region_bounding_box(r0), b1 = region_bounding_box(r1);
        bb_ = hull(b0, b1);
        // seed cells covering Delta
        const int n = 1 << base_depth;
        const double wx = bb_.x.width() / n, wu = bb_.u.width() / n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const IVec2 c(Interval(bb_.x.lo + i * wx, bb_.x.lo + (i + 1) * wx),
                              Interval(bb_.u.lo + j * wu, bb_.u.lo + (j + 1) * wu));
                if (membership(r0, c) != Membership::outside ||
                    membership(r1, c) != Membership::outside)
                    delta_.push_back(c);
            }
        cellx_ = wx;
        cellu_ = wu;
    }

    // intersects-Delta test for an image box
    bool meets_delta(const IVec2& img) const
    {
        return membership(Region(d0_), img) != Membership::outside ||
               membership(Region(d1_), img) != Membership::outside;
    }

    HierarchyLevel compute(int k, int refine_per_level = 2)
    {
        std::vector<IVec2> prev = delta_;
        double cellx = cellx_, cellu = cellu_;
        HierarchyLevel out;
        for (int level = 1; level <= k; ++level) {
            // refine candidate cells, then keep those whose forward and
            // backward images meet the previous set
            std::vector<IVec2> cand = prev;
            for (int r = 0; r < refine_per_level && cellx > bb_.x.width() / cap_; ++r) {
                std::vector<IVec2> fine;
                fine.reserve(cand.size() * 4);
                for (const IVec2& c : cand) {
                    const double mx = c.x.mid(), mu = c.u.mid();
                    fine.push_back(IVec2(Interval(c.x.lo, mx), Interval(c.u.lo, mu)));
                    fine.push_back(IVec2(Interval(mx, c.x.hi), Interval(c.u.lo, mu)));
                    fine.push_back(IVec2(Interval(c.x.lo, mx), Interval(mu, c.u.hi)));
                    fine.push_back(IVec2(Interval(mx, c.x.hi), Interval(mu, c.u.hi)));
                }
                cand.swap(fine);
                cellx *= 0.5;
                cellu *= 0.5;
            }
            BoxGridIndex idx(BoxUnion{prev}, 512);
            std::vector<IVec2> next;
            for (const IVec2& c : cand) {
                try {
                    const IVec2 fwd = m_.iterate(3, c);
                    if (!idx.meets(fwd)) continue;
                    const IVec2 bwd = m_.iterate(-3, c);
                    if (!idx.meets(bwd)) continue;
                    next.push_back(c);
                } catch (const domain_error&) {
                    // cell leaves the certified domain: cannot stay in U^k
                    continue;
                }
            }
            prev.swap(next);
        }
        out.k = k;
        out.cellx = cellx;
        out.cellu = cellu;
        out.cells = prev;
        label_components(out);
        return out;
    }

private:
    // union-find over the integer grid coordinates of the (uniform) cells;
    // 8-neighbour adjacency
    void label_components(HierarchyLevel& lv) const
    {
        const std::size_t n = lv.cells.size();
        std::vector<int> parent(n);
        for (std::size_t i = 0; i < n; ++i) parent[i] = int(i);
        std::function<int(int)> find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        std::map<std::pair<long, long>, int> at;
        std::vector<std::pair<long, long>> key(n);
        for (std::size_t i = 0; i < n; ++i) {
            const long gi = std::lround((lv.cells[i].x.lo - bb_.x.lo) / lv.cellx);
            const long gj = std::lround((lv.cells[i].u.lo - bb_.u.lo) / lv.cellu);
            key[i] = {gi, gj};
            at[key[i]] = int(i);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (long di = -1; di <= 1; ++di)
                for (long dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    auto it = at.find({key[i].first + di, key[i].second + dj});
                    if (it == at.end()) continue;
                    const int ra = find(int(i)), rb = find(it->second);
                    if (ra != rb) parent[ra] = rb;
                }
        }
        std::map<int, std::vector<std::size_t>> comps;
        for (std::size_t i = 0; i < n; ++i) comps[find(int(i))].push_back(i);
        lv.components = int(comps.size());
        lv.max_diameter = 0.0;
        lv.min_inradius = 1e300;
        for (const auto& [root, members] : comps) {
            IVec2 bb = lv.cells[members.front()];
            for (std::size_t i : members) bb = hull(bb, lv.cells[i]);
            lv.max_diameter =
                std::max(lv.max_diameter, std::hypot(bb.x.width(), bb.u.width()));
            lv.min_inradius =
                std::min(lv.min_inradius, 0.5 * std::min(bb.x.width(), bb.u.width()));
        }
        if (comps.empty()) lv.min_inradius = 0.0;
    }

    const GeneratingMap& m_;
    int cap_;
    Parallelogram d0_, d1_;
    IVec2 bb_;
    std::vector<IVec2> delta_;
    double cellx_ = 0.0, cellu_ = 0.0;
};

// ---- finite-time Lyapunov exponents ----------------------------------------

struct LyapunovReport {
    int depth = 0;
    int g_steps = 0;
    double exponent_per_f_step = 0.0;
};

// maximal finite-time exponent at p over n iterates of G = F^3, reported
// per application of F; the tangent vector is renormalized every step
inline LyapunovReport lyapunov_exponent(const GeneratingMap& m, Vec2 p, int g_steps,
                                        int depth_tag = 0)
{
    LyapunovReport rep;
    rep.depth = depth_tag;
    rep.g_steps = g_steps;
    Vec2 v(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    double acc = 0.0;
    for (int i = 0; i < g_steps; ++i) {
        Mat2 d;
        Vec2 q = m.iterate_f(3, p, &d);
        v = d * v;
        const double nv = v.norm();
        if (nv == 0.0) throw domain_error("lyapunov: tangent vector collapsed");
        acc += std::log(nv);
        v = v * (1.0 / nv);
        p = q;
    }
    rep.exponent_per_f_step = acc / double(3 * g_steps);
    return rep;
}

// decay profile along the orbit of the origin: horizon 2^k G-steps at depth k
inline std::vector<LyapunovReport> lyapunov_decay(const GeneratingMap& m, int kmax,
                                                  int steps_override = 0)
{
    std::vector<LyapunovReport> out;
    for (int k = 1; k <= kmax; ++k) {
        const int steps = steps_override > 0 ? steps_override : (1 << k);
        out.push_back(lyapunov_exponent(m, Vec2(0.0, 0.0), steps, k));
    }
    return out;
}

} // namespace pdr

#endif
