#include "mfforge/background.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace mfforge;

TEST(Background, CellCounts)
{
    const auto m3 = build_box_mesh(Vec3::Zero(), Vec3(1, 2, 3), {2, 3, 4}, 3, 1);
    EXPECT_EQ(m3.num_cells(), 6 * 2 * 3 * 4);
    EXPECT_EQ(m3.num_vertices(), 3 * 4 * 5);
    const auto m2 = build_box_mesh(Vec3::Zero(), Vec3(1, 2, 0), {5, 3, 1}, 2, 1);
    EXPECT_EQ(m2.num_cells(), 2 * 5 * 3);
    EXPECT_EQ(m2.num_vertices(), 6 * 4);
}

TEST(Background, VolumesPositiveAndSumToBox)
{
    for (int dim : {2, 3}) {
        const Vec3 lo(-0.5, -1.0, dim == 3 ? 0.25 : 0.0), hi(1.0, 0.5, dim == 3 ? 1.0 : 0.0);
        const auto m = build_box_mesh(lo, hi, {3, 4, 2}, dim, 1);
        double total = 0.0;
        for (int c = 0; c < m.num_cells(); ++c) {
            EXPECT_GT(m.cell_volume(c), 0.0);
            total += m.cell_volume(c);
        }
        const double box = dim == 3 ? 1.5 * 1.5 * 0.75 : 1.5 * 1.5;
        EXPECT_NEAR(total, box, 1e-13);
    }
}

TEST(Background, ReferenceMapRoundTrip)
{
    const auto m = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {2, 2, 2}, 3, 1);
    for (int c = 0; c < m.num_cells(); c += 5) {
        const auto& cell = m.cells[c];
        const Vec3 xi(0.2, 0.3, 0.1);
        const Vec3& X0 = m.vertices[cell[0]];
        Vec3 x = X0;
        for (int a = 0; a < 3; ++a)
            x += xi[a] * (m.vertices[cell[a + 1]] - X0);
        EXPECT_TRUE(m.to_reference(c, x).isApprox(xi, 1e-13));
    }
}

TEST(Background, DivisionsForSpacing)
{
    const auto d = divisions_for(Vec3::Zero(), Vec3(1.0, 2.0, 0.5), 0.25, 3);
    EXPECT_EQ(d, (std::array<int, 3>{4, 8, 2}));
    const auto d2 = divisions_for(Vec3::Zero(), Vec3(1.0, 2.0, 0.0), 0.25, 2);
    EXPECT_EQ(d2[0], 4);
    EXPECT_EQ(d2[1], 8);
}

TEST(Background, LagrangeNodeCountMatchesStructuredLattice)
{
    for (int p = 1; p <= 4; ++p) {
        auto m = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {2, 3, 2}, 3, p);
        const auto ln = lagrange_nodes(m);
        EXPECT_EQ(static_cast<int>(ln.nodes.size()), (2 * p + 1) * (3 * p + 1) * (2 * p + 1));
        for (const auto& c : ln.cells)
            EXPECT_EQ(static_cast<int>(c.size()), (p + 1) * (p + 2) * (p + 3) / 6);
        auto m2 = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {3, 2, 1}, 2, p);
        EXPECT_EQ(static_cast<int>(lagrange_nodes(m2).nodes.size()), (3 * p + 1) * (2 * p + 1));
    }
}

TEST(Background, FacetNeighborsAreSymmetric)
{
    for (int dim : {2, 3}) {
        const auto m = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {3, 2, 2}, dim, 1);
        const auto table = facet_neighbors(m);
        int boundary = 0;
        for (int c = 0; c < m.num_cells(); ++c) {
            for (int f = 0; f <= dim; ++f) {
                const auto& nb = table[c][f];
                if (nb.is_boundary()) {
                    ++boundary;
                    continue;
                }
                const auto& back = table[nb.cell][nb.facet];
                EXPECT_EQ(back.cell, c);
                EXPECT_EQ(back.facet, f);
                const auto mine = facet_local_vertices(dim, f);
                const auto theirs = facet_local_vertices(dim, nb.facet);
                for (int i = 0; i < dim; ++i)
                    EXPECT_EQ(m.cells[c][mine[i]], m.cells[nb.cell][theirs[nb.permutation[i]]]);
            }
        }
        const int expected = dim == 3 ? 4 * (3 * 2 + 2 * 2 + 2 * 3) : 2 * (3 + 2);
        EXPECT_EQ(boundary, expected);
    }
}

TEST(Background, BoxBoundaryFlags)
{
    const auto m = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {2, 2, 2}, 3, 1);
    std::vector<int> face, mixed;
    for (int v = 0; v < m.num_vertices(); ++v) {
        const Vec3& x = m.vertices[v];
        if (x.z() == 0.0)
            face.push_back(v);
        if (x.x() == 0.0 && x.y() == 1.0)
            mixed.push_back(v);
    }
    EXPECT_TRUE(on_box_boundary(m, face));
    EXPECT_TRUE(on_box_boundary(m, mixed));
    const std::array<int, 2> across{face.front(), 13}; // 13: box center
    EXPECT_TRUE(m.vertices[13].isApprox(Vec3::Constant(0.5)));
    EXPECT_FALSE(on_box_boundary(m, across));
}
