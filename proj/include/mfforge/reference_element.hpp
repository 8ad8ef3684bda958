#pragma once

#include "mfforge/lattice.hpp"

namespace mfforge {

/// Equispaced Lagrange element on the reference line [0,1], triangle
/// {r,s >= 0, r+s <= 1} or square [0,1]^2. Node order follows lattice.hpp.
class ReferenceElement {
public:
    ReferenceElement(Shape shape, int order);

    Shape shape() const { return shape_; }
    int order() const { return p_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int dim() const { return shape_ == Shape::line ? 1 : 2; }
    const std::vector<Vec2>& nodes() const { return nodes_; }

    void eval(const Vec2& r, std::span<double> N) const;
    /// dN[i] holds (dN_i/dr, dN_i/ds); the s component is zero on lines.
    void eval_grad(const Vec2& r, std::span<double> N, std::span<Vec2> dN) const;

private:
    Shape shape_;
    int p_;
    std::vector<Vec2> nodes_;
    std::vector<std::array<int, 3>> index_; // barycentric exponents (tri) or (i, j)
};

/// Shared immutable instance per (shape, order).
const ReferenceElement& reference_element(Shape shape, int order);

/// x(r) = sum_i N_i(r) x_i and its Jacobian columns.
struct MapPoint {
    Vec3 x = Vec3::Zero();
    Vec3 dr = Vec3::Zero();
    Vec3 ds = Vec3::Zero();
};
MapPoint evaluate_map(const ReferenceElement& ref, std::span<const Vec3> nodes, const Vec2& r);

} // namespace mfforge
