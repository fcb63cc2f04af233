// Copyright 2026 The scenedit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace scenedit {

/// Static k-d tree over a point set of fixed dimension. Indices returned by
/// queries refer to positions in the constructor's input.
template <int Dim>
class KdTree {
public:
    using Point = Eigen::Matrix<double, Dim, 1>;

    KdTree() = default;
    explicit KdTree(std::vector<Point> points) : points_(std::move(points)) {
        index_.resize(points_.size());
        for (std::size_t i = 0; i < index_.size(); ++i) index_[i] = static_cast<std::uint32_t>(i);
        if (!points_.empty()) root_ = build(0, static_cast<std::uint32_t>(index_.size()), 0);
    }

    std::size_t size() const { return points_.size(); }
    const Point& point(std::size_t i) const { return points_[i]; }

    /// Indices within `radius` (inclusive), ascending.
    std::vector<std::uint32_t> radius_search(const Point& q, double radius) const {
        std::vector<std::uint32_t> out;
        if (!points_.empty()) radius_rec(root_, q, radius * radius, out);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// The k nearest points, closest first; equal distances break by index.
    std::vector<std::uint32_t> knn(const Point& q, std::size_t k) const {
        Heap heap;
        if (!points_.empty() && k > 0) knn_rec(root_, q, k, heap);
        std::vector<std::uint32_t> out(heap.size());
        for (std::size_t i = heap.size(); i-- > 0;) {
            out[i] = heap.top().second;
            heap.pop();
        }
        return out;
    }

private:
    struct Node {
        std::uint32_t begin, end;  // range in index_
        std::uint32_t left = kNone, right = kNone;
        int axis = 0;
        double split = 0.0;
    };
    static constexpr std::uint32_t kNone = 0xFFFFFFFFu;
    static constexpr std::uint32_t kLeaf = 8;
    using Entry = std::pair<double, std::uint32_t>;
    using Heap = std::priority_queue<Entry>;

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, int depth) {
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(Node{begin, end});
        if (end - begin <= kLeaf) return id;
        Point lo = points_[index_[begin]], hi = lo;
        for (std::uint32_t i = begin; i < end; ++i) {
            lo = lo.cwiseMin(points_[index_[i]]);
            hi = hi.cwiseMax(points_[index_[i]]);
        }
        int axis = 0;
        (hi - lo).maxCoeff(&axis);
        const std::uint32_t mid = begin + (end - begin) / 2;
        std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
        const double split = points_[index_[mid]][axis];
        const std::uint32_t l = build(begin, mid, depth + 1);
        const std::uint32_t r = build(mid, end, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        nodes_[id].axis = axis;
        nodes_[id].split = split;
        return id;
    }

    void radius_rec(std::uint32_t id, const Point& q, double r2, std::vector<std::uint32_t>& out) const {
        const Node& n = nodes_[id];
        if (n.left == kNone) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                if ((points_[index_[i]] - q).squaredNorm() <= r2) out.push_back(index_[i]);
            }
            return;
        }
        const double d = q[n.axis] - n.split;
        if (d <= 0 || d * d <= r2) radius_rec(n.left, q, r2, out);
        if (d >= 0 || d * d <= r2) radius_rec(n.right, q, r2, out);
    }

    void knn_rec(std::uint32_t id, const Point& q, std::size_t k, Heap& heap) const {
        const Node& n = nodes_[id];
        if (n.left == kNone) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const Entry e{(points_[index_[i]] - q).squaredNorm(), index_[i]};
                if (heap.size() < k) {
                    heap.push(e);
                } else if (e < heap.top()) {
                    heap.pop();
                    heap.push(e);
                }
            }
            return;
        }
        const double d = q[n.axis] - n.split;
        const std::uint32_t near = d <= 0 ? n.left : n.right;
        const std::uint32_t far = d <= 0 ? n.right : n.left;
        knn_rec(near, q, k, heap);
        if (heap.size() < k || d * d <= heap.top().first) knn_rec(far, q, k, heap);
    }

    std::vector<Point> points_;
    std::vector<std::uint32_t> index_;
    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;
};

}  // namespace scenedit
