#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ballquad/geometry.hpp"

namespace ballquad {

/// Static 3-d tree over a point cloud. Queries are const and may run concurrently.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::span<const Point3> points);

    std::size_t size() const { return points_.size(); }

    /// Indices of the k points closest to `query`, nearest first; equal
    /// distances are ordered by smaller index. Throws ValidationError if k > size().
    std::vector<std::size_t> knn(const Point3& query, std::size_t k) const;

    /// All indices within `radius` of `query` (inclusive), unordered.
    void radius_search(const Point3& query, double radius, std::vector<std::size_t>& out) const;

private:
    struct Node {
        std::size_t begin = 0;
        std::size_t end = 0;
        int axis = -1;  // -1 marks a leaf
        double split = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end);

    std::vector<Point3> points_;
    std::vector<std::size_t> index_;
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

} // namespace ballquad
