#include "mfforge/mesh_io.hpp"
#include "mfforge/pipeline.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mfforge;

namespace {

// two p=2 triangles sharing the edge (1,0,0)-(0,1,0), built by hand
std::vector<SurfaceElement> two_triangles()
{
    auto make = [](std::array<Vec3, 3> c, std::array<std::int64_t, 3> ids, int cell) {
        SurfaceElement e;
        e.shape = Shape::tri;
        e.order = 2;
        e.parent_cell = cell;
        e.key = {cell};
        for (int k = 0; k < lattice_size(Shape::tri, 2); ++k) {
            const Vec2 r = lattice_point(Shape::tri, 2, k);
            e.nodes.push_back(c[0] + r[0] * (c[1] - c[0]) + r[1] * (c[2] - c[0]));
            // key: sorted corner ids weighted by lattice position
            const auto [i, j] = lattice_coords(Shape::tri, 2, k);
            std::map<std::int64_t, int> w{{ids[0], 2 - i - j}, {ids[1], i}, {ids[2], j}};
            NodeKey key;
            for (auto [id, m] : w)
                if (m > 0) {
                    key.push_back(id);
                    key.push_back(m);
                }
            e.node_keys.push_back(key);
        }
        e.edge_markers = {kBoxMarker, kNoMarker, kBoxMarker};
        return e;
    };
    return {make({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {0, 1, 2}, 0),
            make({Vec3(1, 1, 0), Vec3(0, 1, 0), Vec3(1, 0, 0)}, {3, 2, 1}, 1)};
}

SurfaceMesh sphere_mesh(int p, double h = 0.5)
{
    return generate_mesh(get_case("sphere"), h, p).surface.mesh;
}

} // namespace

TEST(SurfaceMesh, UnifySharesEdgeNodes)
{
    const auto elems = two_triangles();
    const auto mesh = unify_nodes(elems, 3, 2, true);
    EXPECT_EQ(mesh.num_nodes(), 9);
    EXPECT_EQ(mesh.num_cells(), 2);
    const auto census = edge_census(mesh);
    EXPECT_EQ(census.interior, 1);
    EXPECT_EQ(census.open, 4);
    EXPECT_EQ(census.mismatched, 0);
    EXPECT_EQ(mesh.boundary.size(), 4u);
    EXPECT_NEAR(total_measure(mesh), 1.0, 1e-14);
    EXPECT_EQ(mesh.boundary_nodes().size(), 8u);
}

TEST(SurfaceMesh, UnifyIsOrderIndependent)
{
    auto elems = two_triangles();
    const auto a = unify_nodes(elems, 3, 2);
    std::swap(elems[0], elems[1]);
    const auto b = unify_nodes(elems, 3, 2);
    EXPECT_EQ(a.nodes, b.nodes);
    for (int c = 0; c < 2; ++c)
        EXPECT_EQ(a.cells[c].nodes, b.cells[c].nodes);
}

TEST(SurfaceMesh, VerifyCatchesKeyCollision)
{
    auto elems = two_triangles();
    elems[1].nodes[lattice_index(Shape::tri, 2, 1, 1)] += Vec3(0, 0, 1e-6);
    EXPECT_THROW(unify_nodes(elems, 3, 2, true), MeshError);
    EXPECT_NO_THROW(unify_nodes(elems, 3, 2, false));
    elems[0].order = 3;
    EXPECT_THROW(unify_nodes(elems, 3, 2), MeshError);
}

TEST(SurfaceMesh, QualityOfFlatCells)
{
    const auto mesh = unify_nodes(two_triangles(), 3, 2);
    const auto q = quality_report(mesh);
    EXPECT_EQ(q.tris, 2);
    EXPECT_NEAR(q.max_angle_tri, 90.0, 1e-12);
    EXPECT_NEAR(q.ratio, 1.0, 1e-14);
}

TEST(SurfaceMesh, ClosedSphereIsWatertight)
{
    for (int p : {1, 3}) {
        const auto mesh = sphere_mesh(p);
        const auto census = edge_census(mesh);
        EXPECT_EQ(census.open, 0);
        EXPECT_EQ(census.non_manifold, 0);
        EXPECT_EQ(census.mismatched, 0);
        EXPECT_TRUE(mesh.boundary.empty());
    }
}

TEST(MeshIo, NativeRoundTripIsBitExact)
{
    const auto mesh = generate_mesh(get_case("sline"), 1.0 / 16, 3).surface.mesh;
    std::stringstream ss;
    write_native(ss, mesh);
    const auto back = read_native(ss);
    EXPECT_EQ(back.dim, mesh.dim);
    EXPECT_EQ(back.order, mesh.order);
    EXPECT_EQ(back.nodes, mesh.nodes);
    ASSERT_EQ(back.num_cells(), mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        EXPECT_EQ(back.cells[c].shape, mesh.cells[c].shape);
        EXPECT_EQ(back.cells[c].nodes, mesh.cells[c].nodes);
    }
    ASSERT_EQ(back.boundary.size(), mesh.boundary.size());
    for (std::size_t b = 0; b < mesh.boundary.size(); ++b)
        EXPECT_EQ(back.boundary[b].marker, mesh.boundary[b].marker);
}

TEST(MeshIo, ParseErrorsCarryLine)
{
    std::istringstream bad("MFMESH v1\n3 2\nnodes 1\n0x1p+0 zz 0\n");
    try {
        read_native(bad);
        FAIL();
    }
    catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4);
    }
    std::istringstream truncated("MFMESH v1\n3 2\nnodes 2\n0 0 0\n");
    EXPECT_THROW(read_native(truncated), ParseError);
    std::istringstream header("MESH\n");
    EXPECT_THROW(read_native(header), ParseError);
}

TEST(MeshIo, VisualizationCounts)
{
    const auto mesh = sphere_mesh(2);
    std::vector<double> ones(mesh.num_nodes(), 1.0);
    const std::array<NamedField, 1> f{NamedField{"u", ones}};
    std::ostringstream out;
    write_visualization(out, mesh, f);
    std::size_t sub = 0;
    for (const auto& c : mesh.cells)
        sub += lattice_subcells(c.shape, mesh.order).size();
    const std::string s = out.str();
    EXPECT_NE(s.find("CELLS " + std::to_string(sub) + " "), std::string::npos);
    EXPECT_NE(s.find("POINT_DATA " + std::to_string(mesh.num_nodes())), std::string::npos);
    const std::array<NamedField, 1> wrong{NamedField{"u", {1.0}}};
    std::ostringstream o2;
    EXPECT_THROW(write_visualization(o2, mesh, wrong), ArgumentError);
}

TEST(MeshIo, SubcellCounts)
{
    for (int p = 1; p <= 6; ++p) {
        EXPECT_EQ(static_cast<int>(lattice_subcells(Shape::tri, p).size()), p * p);
        EXPECT_EQ(static_cast<int>(lattice_subcells(Shape::quad, p).size()), p * p);
        EXPECT_EQ(static_cast<int>(lattice_subcells(Shape::line, p).size()), p);
    }
}
