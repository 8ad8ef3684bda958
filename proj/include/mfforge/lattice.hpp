#pragma once

#include "mfforge/common.hpp"

#include <array>
#include <span>

namespace mfforge {

using Vec2 = Eigen::Vector2d;

enum class Shape : std::uint8_t { line, tri, quad };

const char* shape_name(Shape s);
Shape shape_from_name(const std::string& name);

// Node lattices of order p.
//   line: k = 0..p at t = k/p
//   tri:  (i, j) with i + j <= p, j-major; corners (0,0), (p,0), (0,p)
//   quad: index j (p+1) + i; corners (0,0), (p,0), (p,p), (0,p)
// Edge e runs from corner e to corner e+1 (cyclic). The two "edges" of a
// line are its end points.
int lattice_size(Shape s, int p);
int lattice_index(Shape s, int p, int i, int j);
std::array<int, 2> lattice_coords(Shape s, int p, int idx);
Vec2 lattice_point(Shape s, int p, int idx);
int num_corners(Shape s);
int num_edges(Shape s);
std::array<int, 2> edge_corners(Shape s, int edge);
std::vector<int> corner_indices(Shape s, int p);
/// Lattice indices along edge e from its start corner to its end corner.
std::vector<int> edge_indices(Shape s, int p, int edge);
/// Reference point at parameter t along edge e.
Vec2 edge_point(Shape s, int edge, double t);
bool is_boundary_index(Shape s, int p, int idx);

/// Equispaced 1D Lagrange basis of degree p on [0,1].
double lagrange_1d(int p, int k, double t);
void lagrange_1d_all(int p, double t, std::span<double> N, std::span<double> dN = {});

/// Degree-(n-1) curve through equispaced nodes, evaluated at t.
template <class P>
P eval_curve(std::span<const P> nodes, double t)
{
    const int p = static_cast<int>(nodes.size()) - 1;
    if (p == 0)
        return nodes[0];
    std::array<double, 8> N{};
    lagrange_1d_all(p, t, std::span<double>(N.data(), p + 1));
    P out = N[0] * nodes[0];
    for (int k = 1; k <= p; ++k)
        out += N[k] * nodes[k];
    return out;
}

/// Fills a tri or quad lattice from its p+1 nodes per edge (edge e from
/// corner e to corner e+1). Interior nodes: Nielson side-vertex blend on
/// triangles, Coons patch on quads. Boundary nodes are copied verbatim.
template <class P>
std::vector<P> transfinite_lattice(Shape s, int p, std::span<const std::vector<P>> edge_nodes)
{
    std::vector<P> out(lattice_size(s, p));
    const int ne = num_edges(s);
    for (int e = 0; e < ne; ++e) {
        auto idx = edge_indices(s, p, e);
        for (int k = 0; k <= p; ++k)
            out[idx[k]] = edge_nodes[e][k];
    }
    auto curve = [&](int e, double t) { return eval_curve(std::span<const P>(edge_nodes[e]), t); };
    for (int idx = 0; idx < lattice_size(s, p); ++idx) {
        if (is_boundary_index(s, p, idx))
            continue;
        auto [i, j] = lattice_coords(s, p, idx);
        if (s == Shape::tri) {
            const double b1 = static_cast<double>(i) / p, b2 = static_cast<double>(j) / p;
            const double b0 = static_cast<double>(p - i - j) / p;
            const P& v0 = edge_nodes[0][0];
            const P& v1 = edge_nodes[1][0];
            const P& v2 = edge_nodes[2][0];
            P p0 = b0 * v0 + (1.0 - b0) * curve(1, b2 / (b1 + b2));
            P p1 = b1 * v1 + (1.0 - b1) * curve(2, b0 / (b0 + b2));
            P p2 = b2 * v2 + (1.0 - b2) * curve(0, b1 / (b0 + b1));
            const double w0 = b1 * b2, w1 = b0 * b2, w2 = b0 * b1;
            out[idx] = (w0 * p0 + w1 * p1 + w2 * p2) / (w0 + w1 + w2);
        }
        else {
            const double u = static_cast<double>(i) / p, v = static_cast<double>(j) / p;
            const P& c0 = edge_nodes[0][0];
            const P& c1 = edge_nodes[1][0];
            const P& c2 = edge_nodes[2][0];
            const P& c3 = edge_nodes[3][0];
            P bottom = edge_nodes[0][i];
            P right = edge_nodes[1][j];
            P top = edge_nodes[2][p - i];
            P left = edge_nodes[3][p - j];
            out[idx] = (1.0 - v) * bottom + v * top + (1.0 - u) * left + u * right -
                       ((1.0 - u) * (1.0 - v) * c0 + u * (1.0 - v) * c1 + u * v * c2 + (1.0 - u) * v * c3);
        }
    }
    return out;
}

} // namespace mfforge
