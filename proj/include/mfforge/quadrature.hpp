#pragma once

#include "mfforge/lattice.hpp"

namespace mfforge {

struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int degree = 0;

    int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Legendre rule on [0,1] (points in x, weights sum to 1).
QuadratureRule gauss_legendre(int n);

/// Rule exact for polynomials of the given total degree on the reference
/// shape: tensor Gauss on line/quad, collapsed (Duffy) tensor Gauss on the
/// triangle.
QuadratureRule make_rule(Shape shape, int degree);

/// Cached rule of degree 2p + 2, the degree used for all surface integrals.
const QuadratureRule& element_rule(Shape shape, int order);

} // namespace mfforge
