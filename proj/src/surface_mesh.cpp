#include "mfforge/surface_mesh.hpp"

#include "mfforge/quadrature.hpp"
#include "mfforge/reference_element.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace mfforge {

std::vector<int> SurfaceMesh::boundary_edge_nodes(const BoundaryEdge& b) const
{
    const auto& cell = cells[b.cell];
    std::vector<int> out;
    for (int idx : edge_indices(cell.shape, order, b.local_edge))
        out.push_back(cell.nodes[idx]);
    return out;
}

std::vector<int> SurfaceMesh::boundary_nodes(std::span<const int> markers) const
{
    std::vector<int> out;
    for (const auto& b : boundary) {
        if (!markers.empty() && std::find(markers.begin(), markers.end(), b.marker) == markers.end())
            continue;
        auto ids = boundary_edge_nodes(b);
        out.insert(out.end(), ids.begin(), ids.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::vector<int>> SurfaceMesh::node_tags() const
{
    std::vector<std::vector<int>> tags(nodes.size());
    for (const auto& b : boundary)
        for (int n : boundary_edge_nodes(b))
            tags[n].push_back(b.marker);
    for (auto& t : tags) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    return tags;
}

SurfaceMesh unify_nodes(std::span<const SurfaceElement> elements, int dim, int order, bool verify)
{
    std::map<NodeKey, int> ids;
    for (const auto& e : elements)
        for (const auto& k : e.node_keys)
            ids.emplace(k, 0);
    SurfaceMesh mesh;
    mesh.dim = dim;
    mesh.order = order;
    mesh.nodes.resize(ids.size());
    std::vector<char> seen(ids.size(), 0);
    int next = 0;
    for (auto& [k, id] : ids)
        id = next++;

    // cells ordered by element key so the result is independent of input order
    std::vector<int> order_idx(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i)
        order_idx[i] = static_cast<int>(i);
    std::sort(order_idx.begin(), order_idx.end(),
              [&](int a, int b) { return elements[a].key < elements[b].key; });

    for (int i : order_idx) {
        const auto& e = elements[i];
        if (e.order != order)
            throw MeshError("surface element order differs from the mesh order");
        SurfaceCell cell;
        cell.shape = e.shape;
        cell.parent = e.parent_cell;
        for (std::size_t k = 0; k < e.node_keys.size(); ++k) {
            const int id = ids.at(e.node_keys[k]);
            if (!seen[id]) {
                mesh.nodes[id] = e.nodes[k];
                seen[id] = 1;
            }
            else if (verify && (mesh.nodes[id] - e.nodes[k]).norm() > 1e-12) {
                throw MeshError("provenance key collision with mismatched coordinates");
            }
            cell.nodes.push_back(id);
        }
        const int c = mesh.num_cells();
        for (std::size_t ed = 0; ed < e.edge_markers.size(); ++ed)
            if (e.edge_markers[ed] != kNoMarker)
                mesh.boundary.push_back({c, static_cast<int>(ed), e.edge_markers[ed]});
        mesh.cells.push_back(std::move(cell));
    }
    return mesh;
}

double cell_measure(const SurfaceMesh& mesh, int c)
{
    const auto& cell = mesh.cells[c];
    const auto& ref = reference_element(cell.shape, mesh.order);
    const auto& rule = element_rule(cell.shape, mesh.order);
    std::array<Vec3, 64> x;
    for (int i = 0; i < ref.size(); ++i)
        x[i] = mesh.nodes[cell.nodes[i]];
    std::span<const Vec3> xs(x.data(), ref.size());
    double sum = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        auto m = evaluate_map(ref, xs, rule.points[q]);
        sum += rule.weights[q] * (cell.shape == Shape::line ? m.dr.norm() : m.dr.cross(m.ds).norm());
    }
    return sum;
}

double total_measure(const SurfaceMesh& mesh)
{
    double sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c)
        sum += cell_measure(mesh, c);
    return sum;
}

QualityReport quality_report(const SurfaceMesh& mesh)
{
    QualityReport q;
    if (mesh.cells.empty())
        return q;
    q.size_min = std::numeric_limits<double>::infinity();
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& cell = mesh.cells[c];
        const double a = cell_measure(mesh, c);
        q.size_max = std::max(q.size_max, a);
        q.size_min = std::min(q.size_min, a);
        if (cell.shape == Shape::line) {
            ++q.lines;
            continue;
        }
        (cell.shape == Shape::tri ? q.tris : q.quads)++;

        // angle between the physical edge tangents leaving each corner
        const auto& ref = reference_element(cell.shape, mesh.order);
        std::array<Vec3, 64> x;
        for (int i = 0; i < ref.size(); ++i)
            x[i] = mesh.nodes[cell.nodes[i]];
        std::span<const Vec3> xs(x.data(), ref.size());
        const int nc = num_corners(cell.shape);
        double worst = 0.0;
        for (int k = 0; k < nc; ++k) {
            const int prev = (k + nc - 1) % nc;
            const Vec2 r = edge_point(cell.shape, k, 0.0);
            const Vec2 out_dir = edge_point(cell.shape, k, 1.0) - r;
            const Vec2 in_dir = edge_point(cell.shape, prev, 0.0) - r;
            auto m = evaluate_map(ref, xs, r);
            const Vec3 t1 = out_dir.x() * m.dr + out_dir.y() * m.ds;
            const Vec3 t2 = in_dir.x() * m.dr + in_dir.y() * m.ds;
            const double cosang = std::clamp(t1.dot(t2) / (t1.norm() * t2.norm()), -1.0, 1.0);
            worst = std::max(worst, std::acos(cosang) * 180.0 / std::numbers::pi);
        }
        double& slot = cell.shape == Shape::tri ? q.max_angle_tri : q.max_angle_quad;
        slot = std::max(slot, worst);
    }
    q.ratio = q.size_max / q.size_min;
    return q;
}

EdgeCensus edge_census(const SurfaceMesh& mesh)
{
    std::map<std::pair<int, int>, std::vector<std::vector<int>>> edges;
    for (const auto& cell : mesh.cells) {
        if (cell.shape == Shape::line) {
            for (int e = 0; e < 2; ++e) {
                int n = cell.nodes[e == 0 ? 0 : mesh.order];
                edges[{n, n}].push_back({n});
            }
            continue;
        }
        for (int e = 0; e < num_edges(cell.shape); ++e) {
            std::vector<int> seq;
            for (int idx : edge_indices(cell.shape, mesh.order, e))
                seq.push_back(cell.nodes[idx]);
            if (seq.front() > seq.back())
                std::reverse(seq.begin(), seq.end());
            edges[{seq.front(), seq.back()}].push_back(seq);
        }
    }
    EdgeCensus census;
    for (const auto& [k, list] : edges) {
        if (list.size() == 1)
            ++census.open;
        else if (list.size() == 2)
            ++census.interior;
        else
            ++census.non_manifold;
        for (std::size_t i = 1; i < list.size(); ++i)
            if (list[i] != list[0])
                ++census.mismatched;
    }
    return census;
}

} // namespace mfforge
