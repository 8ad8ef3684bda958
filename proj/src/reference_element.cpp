#include "mfforge/reference_element.hpp"

#include <array>
#include <memory>
#include <mutex>

namespace mfforge {

namespace {

// l^a(x) = prod_{s<a} (p x - s) / (s + 1) and derivative, for a = 0..p
void simplex_factors(int p, double x, std::array<double, 8>& L, std::array<double, 8>& dL)
{
    L[0] = 1.0;
    dL[0] = 0.0;
    for (int a = 1; a <= p; ++a) {
        const double f = (p * x - (a - 1)) / a;
        const double df = static_cast<double>(p) / a;
        L[a] = L[a - 1] * f;
        dL[a] = dL[a - 1] * f + L[a - 1] * df;
    }
}

} // namespace

ReferenceElement::ReferenceElement(Shape shape, int order) : shape_(shape), p_(order)
{
    if (order < 1 || order > 6)
        throw ArgumentError("element order must lie in [1,6]");
    const int n = lattice_size(shape, order);
    nodes_.reserve(n);
    index_.reserve(n);
    for (int idx = 0; idx < n; ++idx) {
        nodes_.push_back(lattice_point(shape, order, idx));
        auto [i, j] = lattice_coords(shape, order, idx);
        index_.push_back({order - i - j, i, j});
        if (shape != Shape::tri)
            index_.back() = {i, j, 0};
    }
}

void ReferenceElement::eval(const Vec2& r, std::span<double> N) const
{
    std::array<Vec2, 64> scratch;
    eval_grad(r, N, std::span<Vec2>(scratch.data(), nodes_.size()));
}

void ReferenceElement::eval_grad(const Vec2& r, std::span<double> N, std::span<Vec2> dN) const
{
    const int p = p_;
    const int n = size();
    if (shape_ == Shape::tri) {
        std::array<double, 8> L0, dL0, L1, dL1, L2, dL2;
        simplex_factors(p, 1.0 - r.x() - r.y(), L0, dL0);
        simplex_factors(p, r.x(), L1, dL1);
        simplex_factors(p, r.y(), L2, dL2);
        for (int k = 0; k < n; ++k) {
            const auto& a = index_[k];
            const double a0 = L0[a[0]], a1 = L1[a[1]], a2 = L2[a[2]];
            N[k] = a0 * a1 * a2;
            const double d0 = -dL0[a[0]] * a1 * a2;
            dN[k] = Vec2(d0 + a0 * dL1[a[1]] * a2, d0 + a0 * a1 * dL2[a[2]]);
        }
        return;
    }
    std::array<double, 8> Lr, dLr, Ls, dLs;
    lagrange_1d_all(p, r.x(), std::span<double>(Lr.data(), p + 1), std::span<double>(dLr.data(), p + 1));
    if (shape_ == Shape::line) {
        for (int k = 0; k < n; ++k) {
            N[k] = Lr[k];
            dN[k] = Vec2(dLr[k], 0.0);
        }
        return;
    }
    lagrange_1d_all(p, r.y(), std::span<double>(Ls.data(), p + 1), std::span<double>(dLs.data(), p + 1));
    for (int k = 0; k < n; ++k) {
        const int i = index_[k][0], j = index_[k][1];
        N[k] = Lr[i] * Ls[j];
        dN[k] = Vec2(dLr[i] * Ls[j], Lr[i] * dLs[j]);
    }
}

const ReferenceElement& reference_element(Shape shape, int order)
{
    static std::array<std::array<std::unique_ptr<ReferenceElement>, 7>, 3> cache;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int s = 0; s < 3; ++s)
            for (int p = 1; p <= 6; ++p)
                cache[s][p] = std::make_unique<ReferenceElement>(static_cast<Shape>(s), p);
    });
    if (order < 1 || order > 6)
        throw ArgumentError("element order must lie in [1,6]");
    return *cache[static_cast<int>(shape)][order];
}

MapPoint evaluate_map(const ReferenceElement& ref, std::span<const Vec3> nodes, const Vec2& r)
{
    std::array<double, 64> N;
    std::array<Vec2, 64> dN;
    const int n = ref.size();
    ref.eval_grad(r, std::span<double>(N.data(), n), std::span<Vec2>(dN.data(), n));
    MapPoint m;
    for (int i = 0; i < n; ++i) {
        m.x += N[i] * nodes[i];
        m.dr += dN[i].x() * nodes[i];
        m.ds += dN[i].y() * nodes[i];
    }
    return m;
}

} // namespace mfforge
