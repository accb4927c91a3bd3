#include "ballquad/kdtree.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

#include "ballquad/errors.hpp"

namespace ballquad {
namespace {

constexpr std::size_t kLeafSize = 12;
constexpr std::size_t kBruteForceBelow = 64;

using Candidate = std::pair<double, std::size_t>;  // (squared distance, index)

} // namespace

KdTree::KdTree(std::span<const Point3> points) : points_(points.begin(), points.end())
{
    index_.resize(points_.size());
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    if (points_.size() >= kBruteForceBelow) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        root_ = build(0, points_.size());
    }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end)
{
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) {
        return id;
    }
    Point3 lo = points_[index_[begin]];
    Point3 hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
        const Point3& p = points_[index_[i]];
        for (int d = 0; d < 3; ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    }
    int axis = 0;
    for (int d = 1; d < 3; ++d) {
        if (hi[d] - lo[d] > hi[axis] - lo[axis]) {
            axis = d;
        }
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                     index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[index_[mid]][axis];
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    Node& n = nodes_[id];
    n.axis = axis;
    n.split = split;
    n.left = left;
    n.right = right;
    return id;
}

std::vector<std::size_t> KdTree::knn(const Point3& query, std::size_t k) const
{
    if (k > points_.size()) {
        throw ValidationError("knn: requested " + std::to_string(k) + " neighbours from " +
                              std::to_string(points_.size()) + " points");
    }
    std::vector<std::size_t> result;
    if (k == 0) {
        return result;
    }

    if (nodes_.empty()) {
        std::vector<Candidate> all(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) {
            all[i] = {norm2(points_[i] - query), i};
        }
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
        result.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            result.push_back(all[i].second);
        }
        return result;
    }

    // Max-heap on (distance, index) keeps the lexicographically worst on top,
    // which gives the smaller-index tie-break for free.
    std::priority_queue<Candidate> heap;
    auto visit = [&](auto&& self, std::size_t node_id) -> void {
        const Node& n = nodes_[node_id];
        if (n.axis < 0) {
            for (std::size_t i = n.begin; i < n.end; ++i) {
                const std::size_t idx = index_[i];
                const Candidate c{norm2(points_[idx] - query), idx};
                if (heap.size() < k) {
                    heap.push(c);
                } else if (c < heap.top()) {
                    heap.pop();
                    heap.push(c);
                }
            }
            return;
        }
        const double delta = query[n.axis] - n.split;
        const std::size_t near = delta < 0.0 ? n.left : n.right;
        const std::size_t far = delta < 0.0 ? n.right : n.left;
        self(self, near);
        if (heap.size() < k || delta * delta <= heap.top().first) {
            self(self, far);
        }
    };
    visit(visit, root_);

    result.resize(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
        result[i] = heap.top().second;
        heap.pop();
    }
    return result;
}

void KdTree::radius_search(const Point3& query, double radius, std::vector<std::size_t>& out) const
{
    out.clear();
    const double r2 = radius * radius;
    if (nodes_.empty()) {
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (norm2(points_[i] - query) <= r2) {
                out.push_back(i);
            }
        }
        return;
    }
    auto visit = [&](auto&& self, std::size_t node_id) -> void {
        const Node& n = nodes_[node_id];
        if (n.axis < 0) {
            for (std::size_t i = n.begin; i < n.end; ++i) {
                const std::size_t idx = index_[i];
                if (norm2(points_[idx] - query) <= r2) {
                    out.push_back(idx);
                }
            }
            return;
        }
        const double delta = query[n.axis] - n.split;
        if (delta <= radius) {
            self(self, n.left);
        }
        if (delta >= -radius) {
            self(self, n.right);
        }
    };
    visit(visit, root_);
}

} // namespace ballquad
