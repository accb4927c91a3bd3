#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ballquad/detail/predicates.hpp"
#include "ballquad/errors.hpp"
#include "ballquad/tessellate.hpp"

namespace ballquad {
namespace {

using detail::in_sphere;
using detail::orient3d;

constexpr int kInfinite = -1;
constexpr int kNone = -1;

// Cells are tetrahedra of the triangulation of the points plus one vertex "at
// infinity"; the infinite cells are glued to the convex hull facets. Every cell
// is right-handed when the infinite vertex is replaced by a point beyond its
// hull facet. n[i] is the neighbour across the face opposite v[i].
struct Cell {
    std::array<int, 4> v{};
    std::array<int, 4> n{kNone, kNone, kNone, kNone};
    bool alive = true;

    bool is_infinite() const { return v[0] < 0 || v[1] < 0 || v[2] < 0 || v[3] < 0; }
    int infinite_slot() const
    {
        for (int i = 0; i < 4; ++i) {
            if (v[static_cast<std::size_t>(i)] < 0) {
                return i;
            }
        }
        return -1;
    }
    int slot_of(int vertex) const
    {
        for (int i = 0; i < 4; ++i) {
            if (v[static_cast<std::size_t>(i)] == vertex) {
                return i;
            }
        }
        return -1;
    }
    int slot_of_neighbor(int cell) const
    {
        for (int i = 0; i < 4; ++i) {
            if (n[static_cast<std::size_t>(i)] == cell) {
                return i;
            }
        }
        return -1;
    }
};

std::uint64_t spread_bits(std::uint64_t v)
{
    v &= 0x1fffff;
    v = (v | v << 32) & 0x1f00000000ffffULL;
    v = (v | v << 16) & 0x1f0000ff0000ffULL;
    v = (v | v << 8) & 0x100f00f00f00f00fULL;
    v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
    v = (v | v << 2) & 0x1249249249249249ULL;
    return v;
}

// Z-order of the points on a 2^21 grid over their bounding box.
std::vector<std::size_t> spatial_order(std::span<const Point3> pts)
{
    Point3 lo = pts[0];
    Point3 hi = pts[0];
    for (const Point3& p : pts) {
        for (int d = 0; d < 3; ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    }
    double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    if (!(extent > 0.0)) {
        extent = 1.0;
    }
    const double cells = static_cast<double>((1u << 21) - 1);
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::uint64_t key = 0;
        for (int d = 0; d < 3; ++d) {
            const auto g = static_cast<std::uint64_t>((pts[i][d] - lo[d]) / extent * cells);
            key |= spread_bits(g) << d;
        }
        keyed[i] = {key, i};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        order[i] = keyed[i].second;
    }
    return order;
}

class DelaunayBuilder {
public:
    explicit DelaunayBuilder(std::span<const Point3> pts) : pts_(pts) {}

    Tessellation run()
    {
        if (pts_.size() < 4) {
            throw TessellationError("delaunay3: need at least 4 points, got " + std::to_string(pts_.size()));
        }
        std::vector<std::size_t> order = spatial_order(pts_);
        const std::array<std::size_t, 4> seed = initial_simplex(order);
        create_initial_cells(seed);

        for (std::size_t idx : order) {
            if (std::find(seed.begin(), seed.end(), idx) != seed.end()) {
                continue;
            }
            insert(static_cast<int>(idx));
        }
        return extract();
    }

private:
    const Point3& pt(int v) const { return pts_[static_cast<std::size_t>(v)]; }

    std::array<std::size_t, 4> initial_simplex(const std::vector<std::size_t>& order)
    {
        const std::size_t i0 = order[0];
        const Point3& p0 = pts_[i0];
        std::size_t i1 = i0;
        double best = 0.0;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            const double d = norm2(pts_[i] - p0);
            if (d > best) {
                best = d;
                i1 = i;
            }
        }
        if (i1 == i0) {
            throw TessellationError("delaunay3: all points coincide");
        }
        std::size_t i2 = i0;
        best = 0.0;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            const double a = norm2(cross(pts_[i1] - p0, pts_[i] - p0));
            if (a > best) {
                best = a;
                i2 = i;
            }
        }
        if (i2 == i0) {
            throw TessellationError("delaunay3: all points are collinear");
        }
        std::size_t i3 = i0;
        best = 0.0;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            const double v = std::abs(signed_six_volume(p0, pts_[i1], pts_[i2], pts_[i]));
            if (v > best) {
                best = v;
                i3 = i;
            }
        }
        if (i3 == i0 || orient3d(p0, pts_[i1], pts_[i2], pts_[i3]) == 0) {
            throw TessellationError("delaunay3: all points are coplanar");
        }
        return {i0, i1, i2, i3};
    }

    int new_cell(const std::array<int, 4>& v)
    {
        if (!free_.empty()) {
            const int id = free_.back();
            free_.pop_back();
            cells_[static_cast<std::size_t>(id)] = Cell{v};
            return id;
        }
        cells_.push_back(Cell{v});
        mark_.push_back(0);
        return static_cast<int>(cells_.size() - 1);
    }

    Cell& cell(int id) { return cells_[static_cast<std::size_t>(id)]; }
    const Cell& cell(int id) const { return cells_[static_cast<std::size_t>(id)]; }

    void create_initial_cells(const std::array<std::size_t, 4>& s)
    {
        std::array<int, 4> v{static_cast<int>(s[0]), static_cast<int>(s[1]), static_cast<int>(s[2]),
                             static_cast<int>(s[3])};
        if (orient3d(pt(v[0]), pt(v[1]), pt(v[2]), pt(v[3])) < 0) {
            std::swap(v[2], v[3]);
        }
        std::vector<int> ids;
        ids.push_back(new_cell(v));
        for (int i = 0; i < 4; ++i) {
            std::array<int, 4> w = v;
            w[static_cast<std::size_t>(i)] = kInfinite;
            // Moving vertex i across its face flips orientation; swap two others back.
            const int a = (i + 1) % 4;
            const int b = (i + 2) % 4;
            std::swap(w[static_cast<std::size_t>(a)], w[static_cast<std::size_t>(b)]);
            ids.push_back(new_cell(w));
        }
        // Glue by matching sorted face keys.
        struct Key {
            std::array<int, 3> f;
            int cell;
            int slot;
        };
        std::vector<Key> keys;
        for (int id : ids) {
            for (int s = 0; s < 4; ++s) {
                std::array<int, 3> f{};
                int k = 0;
                for (int t = 0; t < 4; ++t) {
                    if (t != s) {
                        f[static_cast<std::size_t>(k++)] = cell(id).v[static_cast<std::size_t>(t)];
                    }
                }
                std::sort(f.begin(), f.end());
                keys.push_back({f, id, s});
            }
        }
        std::sort(keys.begin(), keys.end(), [](const Key& x, const Key& y) { return x.f < y.f; });
        for (std::size_t i = 0; i + 1 < keys.size(); i += 2) {
            if (keys[i].f != keys[i + 1].f) {
                throw TessellationError("delaunay3: internal error while gluing initial cells");
            }
            cell(keys[i].cell).n[static_cast<std::size_t>(keys[i].slot)] = keys[i + 1].cell;
            cell(keys[i + 1].cell).n[static_cast<std::size_t>(keys[i + 1].slot)] = keys[i].cell;
        }
        hint_ = ids[0];
    }

    // Orientation of cell c with vertex slot i replaced by point p.
    int orient_with(const Cell& c, int slot, const Point3& p) const
    {
        std::array<const Point3*, 4> q{};
        for (int t = 0; t < 4; ++t) {
            q[static_cast<std::size_t>(t)] = t == slot ? &p : &pt(c.v[static_cast<std::size_t>(t)]);
        }
        return orient3d(*q[0], *q[1], *q[2], *q[3]);
    }

    bool finite_conflict(const Cell& c, const Point3& p) const
    {
        return in_sphere(pt(c.v[0]), pt(c.v[1]), pt(c.v[2]), pt(c.v[3]), p) > 0;
    }

    bool in_conflict(int id, const Point3& p) const
    {
        const Cell& c = cell(id);
        const int inf = c.infinite_slot();
        if (inf < 0) {
            return finite_conflict(c, p);
        }
        const int o = orient_with(c, inf, p);
        if (o != 0) {
            return o > 0;
        }
        // On the hull facet plane: conflict iff inside the facet's circumcircle,
        // i.e. inside the circumsphere of the finite cell across the facet.
        return finite_conflict(cell(c.n[static_cast<std::size_t>(inf)]), p);
    }

    int locate(const Point3& p, int vertex)
    {
        int c = hint_;
        if (!cell(c).alive) {
            c = first_alive();
        }
        if (cell(c).is_infinite()) {
            if (in_conflict(c, p)) {
                return c;
            }
            c = cell(c).n[static_cast<std::size_t>(cell(c).infinite_slot())];
        }
        const std::size_t limit = 4 * cells_.size() + 64;
        for (std::size_t step = 0; step < limit; ++step) {
            const Cell& cc = cell(c);
            bool moved = false;
            const int r = static_cast<int>(rng_next() & 3u);
            for (int j = 0; j < 4; ++j) {
                const int i = (r + j) & 3;
                if (orient_with(cc, i, p) < 0) {
                    c = cc.n[static_cast<std::size_t>(i)];
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                for (int t = 0; t < 4; ++t) {
                    if (pt(cc.v[static_cast<std::size_t>(t)]) == p) {
                        throw TessellationError("delaunay3: duplicate point (index " + std::to_string(vertex) +
                                                " coincides with index " +
                                                std::to_string(cc.v[static_cast<std::size_t>(t)]) + ")");
                    }
                }
                return c;
            }
            if (cell(c).is_infinite()) {
                return c;
            }
        }
        // The visibility walk failed to terminate; fall back to a scan.
        for (std::size_t id = 0; id < cells_.size(); ++id) {
            if (cells_[id].alive && in_conflict(static_cast<int>(id), p)) {
                return static_cast<int>(id);
            }
        }
        throw TessellationError("delaunay3: could not locate point " + std::to_string(vertex));
    }

    int first_alive() const
    {
        for (std::size_t id = 0; id < cells_.size(); ++id) {
            if (cells_[id].alive) {
                return static_cast<int>(id);
            }
        }
        return 0;
    }

    std::uint32_t rng_next()
    {
        rng_state_ ^= rng_state_ << 13;
        rng_state_ ^= rng_state_ >> 7;
        rng_state_ ^= rng_state_ << 17;
        return static_cast<std::uint32_t>(rng_state_);
    }

    void insert(int vertex)
    {
        const Point3& p = pt(vertex);
        const int start = locate(p, vertex);
        if (!in_conflict(start, p)) {
            throw TessellationError("delaunay3: located cell is not in conflict with point " +
                                    std::to_string(vertex) + " (duplicate or invalid input?)");
        }

        ++stamp_;
        const std::uint32_t conflict_mark = 2 * stamp_;
        const std::uint32_t clear_mark = 2 * stamp_ + 1;
        cavity_.clear();
        boundary_.clear();
        stack_.clear();
        stack_.push_back(start);
        mark_[static_cast<std::size_t>(start)] = conflict_mark;
        while (!stack_.empty()) {
            const int c = stack_.back();
            stack_.pop_back();
            cavity_.push_back(c);
            for (int i = 0; i < 4; ++i) {
                const int nb = cell(c).n[static_cast<std::size_t>(i)];
                std::uint32_t& m = mark_[static_cast<std::size_t>(nb)];
                if (m == conflict_mark) {
                    continue;
                }
                if (m != clear_mark) {
                    if (in_conflict(nb, p)) {
                        m = conflict_mark;
                        stack_.push_back(nb);
                        continue;
                    }
                    m = clear_mark;
                }
                boundary_.push_back({c, i});
            }
        }

        // New cells: each boundary facet joined to the new vertex. Replacing the
        // vertex opposite the facet keeps the orientation.
        pending_.clear();
        for (const auto& [c, i] : boundary_) {
            const int outside = cell(c).n[static_cast<std::size_t>(i)];
            PendingCell pd{cell(c).v, outside, i, cell(outside).slot_of_neighbor(c)};
            pd.v[static_cast<std::size_t>(i)] = vertex;
            pending_.push_back(pd);
        }
        for (int c : cavity_) {
            cell(c).alive = false;
            free_.push_back(c);
        }

        created_.clear();
        for (const PendingCell& pd : pending_) {
            const int id = new_cell(pd.v);
            created_.push_back(id);
            cell(id).n[static_cast<std::size_t>(pd.slot)] = pd.outside;
            cell(pd.outside).n[static_cast<std::size_t>(pd.outside_slot)] = id;
        }

        // Glue new cells to each other across faces through the new vertex.
        edges_.clear();
        for (int id : created_) {
            const Cell& nc = cell(id);
            const int pslot = nc.slot_of(vertex);
            for (int s = 0; s < 4; ++s) {
                if (s == pslot) {
                    continue;
                }
                int a = -2;
                int b = -2;
                for (int t = 0; t < 4; ++t) {
                    if (t == s || t == pslot) {
                        continue;
                    }
                    (a == -2 ? a : b) = nc.v[static_cast<std::size_t>(t)];
                }
                if (a > b) {
                    std::swap(a, b);
                }
                edges_.push_back({a, b, id, s});
            }
        }
        std::sort(edges_.begin(), edges_.end(), [](const EdgeKey& x, const EdgeKey& y) {
            return x.a != y.a ? x.a < y.a : x.b < y.b;
        });
        for (std::size_t i = 0; i + 1 < edges_.size(); i += 2) {
            const EdgeKey& x = edges_[i];
            const EdgeKey& y = edges_[i + 1];
            if (x.a != y.a || x.b != y.b) {
                throw TessellationError("delaunay3: cavity is not star-shaped at point " + std::to_string(vertex));
            }
            cell(x.cell).n[static_cast<std::size_t>(x.slot)] = y.cell;
            cell(y.cell).n[static_cast<std::size_t>(y.slot)] = x.cell;
        }
        if (edges_.size() % 2 != 0) {
            throw TessellationError("delaunay3: unmatched cavity edge at point " + std::to_string(vertex));
        }
        hint_ = created_.back();
    }

    Tessellation extract() const
    {
        Tessellation tess;
        std::vector<int> finite_id(cells_.size(), -1);
        for (std::size_t id = 0; id < cells_.size(); ++id) {
            const Cell& c = cells_[id];
            if (!c.alive || c.is_infinite()) {
                continue;
            }
            finite_id[id] = static_cast<int>(tess.tets.size());
            tess.tets.push_back({static_cast<std::uint32_t>(c.v[0]), static_cast<std::uint32_t>(c.v[1]),
                                 static_cast<std::uint32_t>(c.v[2]), static_cast<std::uint32_t>(c.v[3])});
        }
        for (std::size_t id = 0; id < cells_.size(); ++id) {
            const Cell& c = cells_[id];
            if (finite_id[id] < 0) {
                continue;
            }
            for (int f = 0; f < 4; ++f) {
                const int opp = kOppositeVertex[static_cast<std::size_t>(f)];
                if (cell(c.n[static_cast<std::size_t>(opp)]).is_infinite()) {
                    BoundaryFace bf;
                    bf.tet = static_cast<std::uint32_t>(finite_id[id]);
                    for (int j = 0; j < 3; ++j) {
                        const int slot = kTetFaces[static_cast<std::size_t>(f)][static_cast<std::size_t>(j)];
                        bf.face[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(c.v[static_cast<std::size_t>(slot)]);
                    }
                    tess.boundary_faces.push_back(bf);
                }
            }
        }
        std::stable_sort(tess.boundary_faces.begin(), tess.boundary_faces.end(),
                         [](const BoundaryFace& x, const BoundaryFace& y) { return x.tet < y.tet; });
        return tess;
    }

    struct EdgeKey {
        int a;
        int b;
        int cell;
        int slot;
    };

    std::span<const Point3> pts_;
    std::vector<Cell> cells_;
    std::vector<std::uint32_t> mark_;
    std::vector<int> free_;
    std::uint32_t stamp_ = 0;
    int hint_ = 0;
    std::uint64_t rng_state_ = 0x9e3779b97f4a7c15ULL;

    std::vector<int> cavity_;
    std::vector<std::pair<int, int>> boundary_;
    std::vector<int> stack_;
    std::vector<int> created_;
    std::vector<EdgeKey> edges_;
    struct PendingCell {
        std::array<int, 4> v;
        int outside;
        int slot;
        int outside_slot;
    };
    std::vector<PendingCell> pending_;
};

} // namespace

Tessellation delaunay3(std::span<const Point3> points)
{
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!is_finite(points[i])) {
            throw TessellationError("delaunay3: non-finite coordinates at index " + std::to_string(i));
        }
    }
    return DelaunayBuilder(points).run();
}

Tessellation delaunay3(const NodeSet& nodes)
{
    return delaunay3(std::span<const Point3>(nodes.points));
}

} // namespace ballquad
