#pragma once

#include "mfforge/surface_mesh.hpp"

#include <cmath>

namespace mfforge::testing {

/// n x n unit square split into 2 n^2 order-p triangles, optionally lifted
/// by z = lift(x, y) and rotated. Box boundary edges carry marker 0.
inline SurfaceMesh flat_square(int n, int p, const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity())
{
    std::vector<SurfaceElement> elems;
    auto add = [&](int a, int b, bool upper) {
        SurfaceElement e;
        e.shape = Shape::tri;
        e.order = p;
        e.key = {a, b, upper};
        for (int k = 0; k < lattice_size(Shape::tri, p); ++k) {
            auto [i, j] = lattice_coords(Shape::tri, p, k);
            const int gx = upper ? (a + 1) * p - i : a * p + i;
            const int gy = upper ? (b + 1) * p - j : b * p + j;
            e.nodes.push_back(rotation * Vec3(double(gx) / (n * p), double(gy) / (n * p), 0.0));
            e.node_keys.push_back({gx, gy});
        }
        if (upper)
            e.edge_markers = {b == n - 1 ? kBoxMarker : kNoMarker, kNoMarker, a == n - 1 ? kBoxMarker : kNoMarker};
        else
            e.edge_markers = {b == 0 ? kBoxMarker : kNoMarker, kNoMarker, a == 0 ? kBoxMarker : kNoMarker};
        elems.push_back(std::move(e));
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            add(a, b, false);
            add(a, b, true);
        }
    return unify_nodes(elems, 3, p, true);
}

inline Eigen::Matrix3d tilt()
{
    return (Eigen::AngleAxisd(0.3, Vec3::UnitX()) * Eigen::AngleAxisd(-0.7, Vec3(1, 1, 1).normalized()))
        .toRotationMatrix();
}

} // namespace mfforge::testing
