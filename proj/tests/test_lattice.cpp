#include "mfforge/lattice.hpp"
#include "mfforge/quadrature.hpp"
#include "mfforge/reference_element.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace mfforge;

namespace {

// int_T r^a s^b = a! b! / (a + b + 2)!
double tri_monomial(int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); }

} // namespace

TEST(Lattice, Sizes)
{
    for (int p = 1; p <= 6; ++p) {
        EXPECT_EQ(lattice_size(Shape::line, p), p + 1);
        EXPECT_EQ(lattice_size(Shape::tri, p), (p + 1) * (p + 2) / 2);
        EXPECT_EQ(lattice_size(Shape::quad, p), (p + 1) * (p + 1));
    }
}

TEST(Lattice, IndexCoordsRoundTrip)
{
    for (Shape s : {Shape::tri, Shape::quad})
        for (int p = 1; p <= 6; ++p)
            for (int k = 0; k < lattice_size(s, p); ++k) {
                const auto [i, j] = lattice_coords(s, p, k);
                EXPECT_EQ(lattice_index(s, p, i, j), k);
                EXPECT_TRUE(lattice_point(s, p, k).isApprox(Vec2(double(i) / p, double(j) / p)));
            }
}

TEST(Lattice, EdgesAndCorners)
{
    for (Shape s : {Shape::tri, Shape::quad})
        for (int p = 1; p <= 5; ++p) {
            const auto corners = corner_indices(s, p);
            std::set<int> boundary;
            for (int e = 0; e < num_edges(s); ++e) {
                const auto idx = edge_indices(s, p, e);
                ASSERT_EQ(static_cast<int>(idx.size()), p + 1);
                const auto [c0, c1] = edge_corners(s, e);
                EXPECT_EQ(idx.front(), corners[c0]);
                EXPECT_EQ(idx.back(), corners[c1]);
                for (int k = 0; k <= p; ++k) {
                    EXPECT_TRUE(lattice_point(s, p, idx[k]).isApprox(edge_point(s, e, double(k) / p), 1e-14));
                    boundary.insert(idx[k]);
                }
            }
            for (int k = 0; k < lattice_size(s, p); ++k)
                EXPECT_EQ(is_boundary_index(s, p, k), boundary.count(k) == 1);
            EXPECT_EQ(static_cast<int>(boundary.size()), num_edges(s) * p);
        }
    EXPECT_EQ(shape_from_name(shape_name(Shape::quad)), Shape::quad);
}

TEST(Lattice, Lagrange1dKronecker)
{
    for (int p = 1; p <= 6; ++p)
        for (int k = 0; k <= p; ++k)
            for (int m = 0; m <= p; ++m)
                EXPECT_NEAR(lagrange_1d(p, k, double(m) / p), k == m ? 1.0 : 0.0, 1e-13);
}

TEST(Lattice, CurveReproducesPolynomial)
{
    for (int p = 1; p <= 6; ++p) {
        std::vector<double> nodes(p + 1);
        auto f = [p](double t) { return std::pow(t, p) - 0.5 * t + 2.0; };
        for (int k = 0; k <= p; ++k)
            nodes[k] = f(double(k) / p);
        for (double t : {0.0, 0.13, 0.5, 0.91})
            EXPECT_NEAR(eval_curve(std::span<const double>(nodes), t), f(t), 1e-12);
    }
}

TEST(Lattice, TransfiniteReproducesAffineMap)
{
    const Vec3 a(0, 0, 0), b(2, 0.5, 0), c(0.3, 1.5, 1.0), d(-0.2, 1.1, 0.4);
    for (int p = 1; p <= 5; ++p) {
        auto seg = [p](const Vec3& x, const Vec3& y) {
            std::vector<Vec3> out;
            for (int k = 0; k <= p; ++k)
                out.push_back(x + (y - x) * (double(k) / p));
            return out;
        };
        const std::vector<std::vector<Vec3>> tri{seg(a, b), seg(b, c), seg(c, a)};
        const auto t = transfinite_lattice<Vec3>(Shape::tri, p, tri);
        for (int k = 0; k < lattice_size(Shape::tri, p); ++k) {
            const Vec2 r = lattice_point(Shape::tri, p, k);
            EXPECT_TRUE(t[k].isApprox(a + r[0] * (b - a) + r[1] * (c - a), 1e-13));
        }
        const std::vector<std::vector<Vec3>> quad{seg(a, b), seg(b, c), seg(c, d), seg(d, a)};
        const auto q = transfinite_lattice<Vec3>(Shape::quad, p, quad);
        for (int k = 0; k < lattice_size(Shape::quad, p); ++k) {
            const Vec2 r = lattice_point(Shape::quad, p, k);
            const Vec3 x = (1 - r[0]) * (1 - r[1]) * a + r[0] * (1 - r[1]) * b + r[0] * r[1] * c + (1 - r[0]) * r[1] * d;
            EXPECT_LT((q[k] - x).norm(), 1e-13);
        }
    }
}

TEST(Quadrature, GaussLegendreExactness)
{
    for (int n = 1; n <= 10; ++n) {
        const auto g = gauss_legendre(n);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (int q = 0; q < g.size(); ++q)
                s += g.weights[q] * std::pow(g.points[q][0], k);
            EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14) << n << " " << k;
        }
    }
}

TEST(Quadrature, ShapeRulesExactToDegree)
{
    for (int deg = 0; deg <= 14; ++deg) {
        const auto tri = make_rule(Shape::tri, deg);
        const auto quad = make_rule(Shape::quad, deg);
        EXPECT_GE(tri.degree, deg);
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b) {
                double st = 0.0, sq = 0.0;
                for (int q = 0; q < tri.size(); ++q)
                    st += tri.weights[q] * std::pow(tri.points[q][0], a) * std::pow(tri.points[q][1], b);
                for (int q = 0; q < quad.size(); ++q)
                    sq += quad.weights[q] * std::pow(quad.points[q][0], a) * std::pow(quad.points[q][1], b);
                EXPECT_NEAR(st, tri_monomial(a, b), 1e-14);
                EXPECT_NEAR(sq, 1.0 / ((a + 1) * (b + 1)), 1e-14);
            }
    }
    EXPECT_GE(element_rule(Shape::tri, 3).degree, 8);
}

TEST(ReferenceElement, KroneckerAndPartitionOfUnity)
{
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Shape s : {Shape::line, Shape::tri, Shape::quad})
        for (int p = 1; p <= 6; ++p) {
            const auto& ref = reference_element(s, p);
            std::vector<double> N(ref.size());
            std::vector<Vec2> dN(ref.size());
            for (int i = 0; i < ref.size(); ++i) {
                ref.eval(ref.nodes()[i], N);
                for (int j = 0; j < ref.size(); ++j)
                    EXPECT_NEAR(N[j], i == j ? 1.0 : 0.0, 1e-12);
            }
            for (int k = 0; k < 10; ++k) {
                Vec2 r(u(rng), s == Shape::line ? 0.0 : u(rng));
                if (s == Shape::tri && r.sum() > 1.0)
                    r = Vec2(1.0 - r[0], 1.0 - r[1]);
                ref.eval_grad(r, N, dN);
                double sum = 0.0;
                Vec2 dsum = Vec2::Zero();
                for (int i = 0; i < ref.size(); ++i) {
                    sum += N[i];
                    dsum += dN[i];
                }
                EXPECT_NEAR(sum, 1.0, 1e-12);
                EXPECT_LT(dsum.norm(), 1e-10);
            }
        }
}

TEST(ReferenceElement, GradientMatchesDifferences)
{
    const double eps = 1e-6;
    for (Shape s : {Shape::tri, Shape::quad})
        for (int p = 1; p <= 4; ++p) {
            const auto& ref = reference_element(s, p);
            const Vec2 r(0.21, 0.33);
            std::vector<double> N(ref.size()), Np(ref.size()), Nm(ref.size());
            std::vector<Vec2> dN(ref.size());
            ref.eval_grad(r, N, dN);
            for (int a = 0; a < 2; ++a) {
                Vec2 d = Vec2::Zero();
                d[a] = eps;
                ref.eval(r + d, Np);
                ref.eval(r - d, Nm);
                for (int i = 0; i < ref.size(); ++i)
                    EXPECT_NEAR(dN[i][a], (Np[i] - Nm[i]) / (2 * eps), 1e-6);
            }
        }
}

TEST(ReferenceElement, MapOfAffineNodes)
{
    const auto& ref = reference_element(Shape::tri, 3);
    std::vector<Vec3> nodes;
    for (const Vec2& r : ref.nodes())
        nodes.emplace_back(1.0 + 2.0 * r[0], -r[1], r[0] + r[1]);
    const auto m = evaluate_map(ref, nodes, Vec2(0.25, 0.5));
    EXPECT_TRUE(m.x.isApprox(Vec3(1.5, -0.5, 0.75)));
    EXPECT_TRUE(m.dr.isApprox(Vec3(2, 0, 1)));
    EXPECT_TRUE(m.ds.isApprox(Vec3(0, -1, 1)));
}
