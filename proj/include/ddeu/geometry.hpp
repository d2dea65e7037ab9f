#pragma once

// Finite-dimensional projections of segments, planar curve topology, and
// the probes built on them (injectivity, graph tables).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "ddeu/errors.hpp"
#include "ddeu/poincare.hpp"
#include "ddeu/segment.hpp"

namespace ddeu {

/// (phi(0), phi(-1)).
struct Point2 {
    double x0 = 0.0;
    double xm1 = 0.0;

    double operator[](std::size_t i) const { return i == 0 ? x0 : xm1; }
    static constexpr std::size_t dim = 2;
};

/// (phi(0), phi(-1), integral of phi over [-1, 0]).
struct Point3 {
    double x0 = 0.0;
    double xm1 = 0.0;
    double integral = 0.0;

    double operator[](std::size_t i) const { return i == 0 ? x0 : (i == 1 ? xm1 : integral); }
    static constexpr std::size_t dim = 3;
};

inline Point2 pi2(const Segment& phi) { return {phi.back(), phi.front()}; }

inline Point3 pi3(const Segment& phi) { return {phi.back(), phi.front(), trapezoid_integral(phi)}; }

template <class P>
double plane_distance(const P& a, const P& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < P::dim; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

inline double distance_to_chord(const Point2& p, const Point2& a, const Point2& b) {
    const double dx = b.x0 - a.x0, dy = b.xm1 - a.xm1;
    const double len2 = dx * dx + dy * dy;
    double th = len2 > 0.0 ? ((p.x0 - a.x0) * dx + (p.xm1 - a.xm1) * dy) / len2 : 0.0;
    th = std::clamp(th, 0.0, 1.0);
    const double ex = a.x0 + th * dx - p.x0, ey = a.xm1 + th * dy - p.xm1;
    return std::sqrt(ex * ex + ey * ey);
}

/// Closed polyline; the last point repeats the first.
struct PlanarCurve {
    std::vector<Point2> points;
    std::string orbit_label;
    // scale below which points cannot be separated from the orbit: chord
    // sagitta and the spread of the orbit's own lattice points
    double resolution = 0.0;

    /// pi2 image of one period of the orbit, at `per_unit` samples per unit time.
    static PlanarCurve from_orbit(const PeriodicOrbit& orb, int per_unit = 0) {
        const int n = orb.n();
        const int per = per_unit > 0 ? per_unit : n;
        const auto count = static_cast<int>(std::ceil(orb.omega * per));
        const Trajectory tr = orb.trajectory(2.0, 0.0);
        PlanarCurve c;
        c.orbit_label = to_string(orb.label);
        c.points.reserve(static_cast<std::size_t>(count) + 1);
        auto at = [&](double k) {
            const double t = orb.omega + orb.omega * k / count;
            return Point2{tr.value_at(t), tr.value_at(t - 1.0)};
        };
        for (int k = 0; k < count; ++k) c.points.push_back(at(k));
        c.points.push_back(c.points.front());
        for (int k = 0; k < count; ++k) {
            const double d = distance_to_chord(at(k + 0.5), c.points[static_cast<std::size_t>(k)],
                                               c.points[static_cast<std::size_t>(k) + 1]);
            c.resolution = std::max(c.resolution, d);
        }
        // lattice points of the orbit itself over a few periods must count as on it
        const Trajectory run = orb.trajectory(4.0, 0.0);
        for (std::size_t i = run.index_of(std::ceil(orb.omega * n) / n); i < run.size(); ++i) {
            c.resolution = std::max(c.resolution, c.distance({run.x(i), run.x(i - static_cast<std::size_t>(n))}));
        }
        return c;
    }

    double distance(const Point2& p) const {
        double best = 1e300;
        for (std::size_t i = 0; i + 1 < points.size(); ++i) best = std::min(best, distance_to_chord(p, points[i], points[i + 1]));
        return best;
    }

    bool closed() const {
        return points.size() >= 2 && plane_distance(points.front(), points.back()) <= 1e-9;
    }
};

inline double distance_to_curve(const Point2& p, const PlanarCurve& c) {
    return c.distance(p);
}

/// Sum of signed angle increments over 2 pi.
inline double winding_number(const Point2& p, const PlanarCurve& c) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
        const double a = std::atan2(c.points[i].xm1 - p.xm1, c.points[i].x0 - p.x0);
        const double b = std::atan2(c.points[i + 1].xm1 - p.xm1, c.points[i + 1].x0 - p.x0);
        double d = b - a;
        if (d > M_PI) d -= 2.0 * M_PI;
        if (d < -M_PI) d += 2.0 * M_PI;
        total += d;
    }
    return total / (2.0 * M_PI);
}

enum class Region { Interior, Exterior, On };

inline std::string to_string(Region r) {
    switch (r) {
        case Region::Interior: return "INTERIOR";
        case Region::Exterior: return "EXTERIOR";
        case Region::On: return "ON";
    }
    return "?";
}

inline void require_curve(const PlanarCurve& c) {
    if (c.points.size() < 4 || !c.closed()) {
        throw Error(ErrorCode::DegenerateCurve, "curve '" + c.orbit_label + "' is not a closed polyline");
    }
    double perim = 0.0;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) perim += plane_distance(c.points[i], c.points[i + 1]);
    if (!(perim > 1e-12)) throw Error(ErrorCode::DegenerateCurve, "curve '" + c.orbit_label + "' has zero length");
}

inline Region winding_region(const Point2& p, const PlanarCurve& c, double tol_on = 1e-6) {
    require_curve(c);
    if (distance_to_curve(p, c) <= tol_on) return Region::On;
    return std::abs(winding_number(p, c)) >= 0.5 ? Region::Interior : Region::Exterior;
}

enum class AnnulusRegion { INSIDE_OK, A_K_P, A_Q_P, OUTSIDE_OQ, ON_CURVE };

inline std::string to_string(AnnulusRegion r) {
    switch (r) {
        case AnnulusRegion::INSIDE_OK: return "INSIDE_OK";
        case AnnulusRegion::A_K_P: return "A_K_P";
        case AnnulusRegion::A_Q_P: return "A_Q_P";
        case AnnulusRegion::OUTSIDE_OQ: return "OUTSIDE_OQ";
        case AnnulusRegion::ON_CURVE: return "ON_CURVE";
    }
    return "?";
}

/// Every vertex of `inner` is INTERIOR to `outer`.
inline bool curve_inside(const PlanarCurve& inner, const PlanarCurve& outer, double tol_on = 1e-6) {
    for (const auto& v : inner.points) {
        if (winding_region(v, outer, tol_on) != Region::Interior) return false;
    }
    return true;
}

/// The curves pi2 O_k subset int(pi2 O_p), pi2 O_p subset int(pi2 O_q),
/// with the nesting checked once on construction. A point counts as ON a
/// curve within tol_on or within the polyline's own resolution, whichever
/// is larger.
class NestedCurves {
public:
    NestedCurves(PlanarCurve ok, PlanarCurve op, PlanarCurve oq, double tol_on = 1e-6)
        : ok_(std::move(ok)), op_(std::move(op)), oq_(std::move(oq)), tol_on_(tol_on) {
        require_curve(ok_);
        require_curve(op_);
        require_curve(oq_);
        if (!curve_inside(ok_, op_, tol_on_)) throw Error(ErrorCode::NotNested, "O_k is not inside O_p");
        if (!curve_inside(op_, oq_, tol_on_)) throw Error(ErrorCode::NotNested, "O_p is not inside O_q");
    }

    AnnulusRegion classify(const Point2& p) const {
        const Region rk = winding_region(p, ok_, std::max(tol_on_, ok_.resolution));
        const Region rp = winding_region(p, op_, std::max(tol_on_, op_.resolution));
        const Region rq = winding_region(p, oq_, std::max(tol_on_, oq_.resolution));
        if (rk == Region::On || rp == Region::On || rq == Region::On) return AnnulusRegion::ON_CURVE;
        if (rk == Region::Interior) return AnnulusRegion::INSIDE_OK;
        if (rp == Region::Interior) return AnnulusRegion::A_K_P;
        if (rq == Region::Interior) return AnnulusRegion::A_Q_P;
        return AnnulusRegion::OUTSIDE_OQ;
    }

    const PlanarCurve& ok() const { return ok_; }
    const PlanarCurve& op() const { return op_; }
    const PlanarCurve& oq() const { return oq_; }

private:
    PlanarCurve ok_, op_, oq_;
    double tol_on_;
};

inline AnnulusRegion annulus_classify(const Point2& p, const PlanarCurve& ok, const PlanarCurve& op,
                                      const PlanarCurve& oq, double tol_on = 1e-6) {
    return NestedCurves(ok, op, oq, tol_on).classify(p);
}

struct InjectivityReport {
    double min_ratio = 0.0;          // smallest |phi - psi| / |key diff|
    double fitted_lipschitz = 0.0;   // largest ratio
    std::size_t pairs = 0;           // pairs with a usable ratio
    std::size_t skipped = 0;         // coincident pairs (0/0)
    std::size_t violations = 0;      // key collision with distinct segments
    std::pair<std::size_t, std::size_t> worst_pair{0, 0};
};

/// All-pairs probe of the inverse of a projection on a sample set.
template <class P>
InjectivityReport injectivity_probe(const std::vector<std::pair<Segment, P>>& points, double key_tol = 1e-12,
                                    double seg_tol = 1e-6) {
    InjectivityReport rep;
    rep.min_ratio = 1e300;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double dk = plane_distance(points[i].second, points[j].second);
            const double ds = sup_distance(points[i].first, points[j].first);
            if (dk <= key_tol) {
                if (ds > seg_tol) ++rep.violations;
                else ++rep.skipped;
                continue;
            }
            const double r = ds / dk;
            ++rep.pairs;
            rep.min_ratio = std::min(rep.min_ratio, r);
            if (r > rep.fitted_lipschitz) {
                rep.fitted_lipschitz = r;
                rep.worst_pair = {i, j};
            }
        }
    }
    if (rep.pairs == 0) rep.min_ratio = 0.0;
    return rep;
}

/// Tabulated w_k: keys pi2(phi), values phi, with an R-tree for
/// nearest-key lookup.
class GraphTable {
public:
    using BPoint = boost::geometry::model::point<double, 2, boost::geometry::cs::cartesian>;
    using Value = std::pair<BPoint, std::size_t>;

    struct Params {
        double tol_key = 1e-2;   // neighbourhood for the single-valuedness check
        double k_lip = 1e3;      // Lipschitz bound allowed inside that neighbourhood
        double tol_val = 1e-6;
    };

    GraphTable() = default;

    const std::vector<Point2>& keys() const { return keys_; }
    const std::vector<Segment>& values() const { return values_; }
    std::size_t size() const { return keys_.size(); }
    const Params& params() const { return params_; }

    /// Segment stored at the key nearest to `key`.
    const Segment& nearest(const Point2& key) const {
        if (keys_.empty()) throw Error(ErrorCode::OutOfRange, "empty graph table");
        std::vector<Value> hit;
        tree_.query(boost::geometry::index::nearest(BPoint(key.x0, key.xm1), 1), std::back_inserter(hit));
        return values_[hit.front().second];
    }

    /// Local linear interpolation over the three nearest keys, falling back
    /// to the nearest value if they are collinear.
    Segment interpolate(const Point2& key) const {
        std::vector<Value> hit;
        tree_.query(boost::geometry::index::nearest(BPoint(key.x0, key.xm1), 3), std::back_inserter(hit));
        if (hit.size() < 3) return nearest(key);
        std::sort(hit.begin(), hit.end(), [](const Value& a, const Value& b) { return a.second < b.second; });
        const Point2& a = keys_[hit[0].second];
        const Point2& b = keys_[hit[1].second];
        const Point2& c = keys_[hit[2].second];
        const double det = (b.x0 - a.x0) * (c.xm1 - a.xm1) - (c.x0 - a.x0) * (b.xm1 - a.xm1);
        if (std::abs(det) < 1e-18) return nearest(key);
        const double l1 = ((key.x0 - a.x0) * (c.xm1 - a.xm1) - (c.x0 - a.x0) * (key.xm1 - a.xm1)) / det;
        const double l2 = ((b.x0 - a.x0) * (key.xm1 - a.xm1) - (key.x0 - a.x0) * (b.xm1 - a.xm1)) / det;
        if (l1 < -0.5 || l2 < -0.5 || l1 + l2 > 1.5) return nearest(key);
        Segment out = lincomb(1.0 - l1 - l2, values_[hit[0].second], l1, values_[hit[1].second]);
        return lincomb(1.0, out, l2, values_[hit[2].second]);
    }

    friend GraphTable build_graph_table(const std::vector<Segment>& points, const Params& params);

private:
    Params params_{};
    std::vector<Point2> keys_;
    std::vector<Segment> values_;
    boost::geometry::index::rtree<Value, boost::geometry::index::rstar<16>> tree_;
};

/// Builds the table and checks it is a numerical graph: entries whose keys
/// are within tol_key must have values within k_lip |dkey| + tol_val.
inline GraphTable build_graph_table(const std::vector<Segment>& points, const GraphTable::Params& params = {}) {
    GraphTable g;
    g.params_ = params;
    g.keys_.reserve(points.size());
    std::vector<GraphTable::Value> vals;
    vals.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        g.keys_.push_back(pi2(points[i]));
        g.values_.push_back(points[i]);
        vals.emplace_back(GraphTable::BPoint(g.keys_[i].x0, g.keys_[i].xm1), i);
    }
    g.tree_ = decltype(g.tree_)(vals.begin(), vals.end());
    namespace bgi = boost::geometry::index;
    for (std::size_t i = 0; i < g.keys_.size(); ++i) {
        const auto& k = g.keys_[i];
        const boost::geometry::model::box<GraphTable::BPoint> box(
            GraphTable::BPoint(k.x0 - params.tol_key, k.xm1 - params.tol_key),
            GraphTable::BPoint(k.x0 + params.tol_key, k.xm1 + params.tol_key));
        std::vector<GraphTable::Value> hit;
        g.tree_.query(bgi::intersects(box), std::back_inserter(hit));
        for (const auto& h : hit) {
            const std::size_t j = h.second;
            if (j <= i) continue;
            const double dk = plane_distance(k, g.keys_[j]);
            if (dk > params.tol_key) continue;
            const double dv = sup_distance(g.values_[i], g.values_[j]);
            if (dv > params.k_lip * dk + params.tol_val) {
                throw Error(ErrorCode::MultiValued, "entries " + std::to_string(i) + " and " + std::to_string(j) +
                                                        ": key distance " + std::to_string(dk) +
                                                        ", value distance " + std::to_string(dv));
            }
        }
    }
    return g;
}

}  // namespace ddeu
