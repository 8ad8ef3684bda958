#include "mfforge/quadrature.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace mfforge {

QuadratureRule gauss_legendre(int n)
{
    if (n < 1)
        throw ArgumentError("Gauss rule needs at least one point");
    QuadratureRule rule;
    rule.degree = 2 * n - 1;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = Vec2(0.5 * (1.0 - x), 0.0);
        rule.points[n - 1 - i] = Vec2(0.5 * (1.0 + x), 0.0);
        rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
    }
    if (n % 2 == 1) {
        // the middle node is 1/2 exactly
        rule.points[n / 2].x() = 0.5;
    }
    return rule;
}

QuadratureRule make_rule(Shape shape, int degree)
{
    if (degree < 0)
        throw ArgumentError("quadrature degree must be non-negative");
    const int n = degree / 2 + 1;
    QuadratureRule g = gauss_legendre(n);
    if (shape == Shape::line) {
        g.degree = degree;
        return g;
    }
    QuadratureRule rule;
    rule.degree = degree;
    if (shape == Shape::quad) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                rule.points.emplace_back(g.points[i].x(), g.points[j].x());
                rule.weights.push_back(g.weights[i] * g.weights[j]);
            }
        return rule;
    }
    // (u, v) -> (u, v (1 - u)), Jacobian 1 - u adds one degree in u
    QuadratureRule gu = gauss_legendre((degree + 1) / 2 + 1);
    for (int i = 0; i < gu.size(); ++i)
        for (int j = 0; j < n; ++j) {
            const double u = gu.points[i].x(), v = g.points[j].x();
            rule.points.emplace_back(u, v * (1.0 - u));
            rule.weights.push_back(gu.weights[i] * g.weights[j] * (1.0 - u));
        }
    return rule;
}

const QuadratureRule& element_rule(Shape shape, int order)
{
    static std::array<std::array<std::unique_ptr<QuadratureRule>, 7>, 3> cache;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int s = 0; s < 3; ++s)
            for (int p = 1; p <= 6; ++p)
                cache[s][p] = std::make_unique<QuadratureRule>(make_rule(static_cast<Shape>(s), 2 * p + 2));
    });
    if (order < 1 || order > 6)
        throw ArgumentError("element order must lie in [1,6]");
    return *cache[static_cast<int>(shape)][order];
}

} // namespace mfforge
