#include "mfforge/background.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace mfforge {

namespace {

// Kuhn split of the unit hex, corners indexed by bits (x = bit 0, y = bit 1,
// z = bit 2). One tet per axis permutation, walking 000 -> 111.
std::vector<std::array<int, 4>> kuhn_tets()
{
    std::vector<std::array<int, 4>> tets;
    std::array<int, 3> perm{0, 1, 2};
    do {
        int a = 0;
        int b = a | (1 << perm[0]);
        int c = b | (1 << perm[1]);
        tets.push_back({a, b, c, 7});
    } while (std::next_permutation(perm.begin(), perm.end()));
    return tets;
}

std::uint64_t pack_key(int a, int b, int c)
{
    return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) |
           static_cast<std::uint64_t>(c);
}

} // namespace

double BackgroundMesh::cell_volume(int c) const
{
    const auto& cell = cells[c];
    if (dim == 2) {
        Vec3 e1 = vertices[cell[1]] - vertices[cell[0]];
        Vec3 e2 = vertices[cell[2]] - vertices[cell[0]];
        return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    }
    Vec3 e1 = vertices[cell[1]] - vertices[cell[0]];
    Vec3 e2 = vertices[cell[2]] - vertices[cell[0]];
    Vec3 e3 = vertices[cell[3]] - vertices[cell[0]];
    return e1.dot(e2.cross(e3)) / 6.0;
}

Vec3 BackgroundMesh::to_reference(int c, const Vec3& x) const
{
    const auto& cell = cells[c];
    const Vec3& x0 = vertices[cell[0]];
    if (dim == 2) {
        Eigen::Matrix2d J;
        J.col(0) = (vertices[cell[1]] - x0).head<2>();
        J.col(1) = (vertices[cell[2]] - x0).head<2>();
        Eigen::Vector2d xi = J.inverse() * (x - x0).head<2>();
        return {xi.x(), xi.y(), 0.0};
    }
    Eigen::Matrix3d J;
    for (int a = 0; a < 3; ++a)
        J.col(a) = vertices[cell[a + 1]] - x0;
    return J.inverse() * (x - x0);
}

std::array<int, 3> divisions_for(const Vec3& lo, const Vec3& hi, double h, int dim)
{
    if (!(h > 0.0))
        throw ArgumentError("background spacing must be positive");
    std::array<int, 3> n{1, 1, 1};
    for (int a = 0; a < dim; ++a)
        n[a] = std::max(1, static_cast<int>(std::lround((hi[a] - lo[a]) / h)));
    return n;
}

BackgroundMesh build_box_mesh(const Vec3& lo, const Vec3& hi, std::array<int, 3> divisions, int dim, int order)
{
    if (dim != 2 && dim != 3)
        throw ArgumentError("ambient dimension must be 2 or 3");
    if (order < 1 || order > 6)
        throw ArgumentError("order must lie in [1,6], got " + std::to_string(order));
    for (int a = 0; a < dim; ++a) {
        if (!(lo[a] < hi[a]))
            throw ArgumentError("box corners must satisfy lo < hi");
        if (divisions[a] < 1)
            throw ArgumentError("divisions must be >= 1");
    }

    BackgroundMesh mesh;
    mesh.dim = dim;
    mesh.order = order;
    mesh.lo = lo;
    mesh.hi = hi;
    mesh.divisions = {1, 1, 1};
    for (int a = 0; a < dim; ++a)
        mesh.divisions[a] = divisions[a];
    if (dim == 2) {
        mesh.lo.z() = 0.0;
        mesh.hi.z() = 0.0;
    }

    const int nx = mesh.divisions[0], ny = mesh.divisions[1], nz = mesh.divisions[2];
    Vec3 step = Vec3::Zero();
    for (int a = 0; a < dim; ++a) {
        step[a] = (mesh.hi[a] - mesh.lo[a]) / mesh.divisions[a];
        mesh.h = std::max(mesh.h, step[a]);
    }

    const int vx = nx + 1, vy = ny + 1, vz = dim == 3 ? nz + 1 : 1;
    auto vid = [&](int i, int j, int k) { return i + vx * (j + vy * k); };
    mesh.vertices.reserve(static_cast<std::size_t>(vx) * vy * vz);
    mesh.boundary_bits.reserve(mesh.vertices.capacity());
    for (int k = 0; k < vz; ++k)
        for (int j = 0; j < vy; ++j)
            for (int i = 0; i < vx; ++i) {
                // end points are copied so the box faces are hit exactly
                std::array<int, 3> idx{i, j, k};
                Vec3 x = Vec3::Zero();
                std::uint8_t bits = 0;
                for (int a = 0; a < dim; ++a) {
                    if (idx[a] == 0) {
                        x[a] = mesh.lo[a];
                        bits |= 1u << (2 * a);
                    }
                    else if (idx[a] == mesh.divisions[a]) {
                        x[a] = mesh.hi[a];
                        bits |= 1u << (2 * a + 1);
                    }
                    else {
                        x[a] = mesh.lo[a] + idx[a] * step[a];
                    }
                }
                mesh.vertices.push_back(x);
                mesh.boundary_bits.push_back(bits);
            }

    if (dim == 2) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int v00 = vid(i, j, 0), v10 = vid(i + 1, j, 0);
                int v01 = vid(i, j + 1, 0), v11 = vid(i + 1, j + 1, 0);
                mesh.cells.push_back({v00, v10, v11, -1});
                mesh.cells.push_back({v00, v11, v01, -1});
            }
        return mesh;
    }

    static const auto tets = kuhn_tets();
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::array<int, 8> corner;
                for (int c = 0; c < 8; ++c)
                    corner[c] = vid(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
                for (const auto& t : tets) {
                    std::array<int, 4> cell{corner[t[0]], corner[t[1]], corner[t[2]], corner[t[3]]};
                    mesh.cells.push_back(cell);
                    if (mesh.cell_volume(mesh.num_cells() - 1) < 0.0)
                        std::swap(mesh.cells.back()[1], mesh.cells.back()[2]);
                }
            }
    return mesh;
}

double characteristic_h(const BackgroundMesh& mesh) { return mesh.h; }

LagrangeNodes lagrange_nodes(const BackgroundMesh& mesh)
{
    const int p = mesh.order;
    const int nc = mesh.corners_per_cell();

    // lattice multi-indices a_0..a_d with sum p
    std::vector<std::array<int, 4>> lattice;
    if (mesh.dim == 2) {
        for (int j = 0; j <= p; ++j)
            for (int i = 0; i + j <= p; ++i)
                lattice.push_back({p - i - j, i, j, 0});
    }
    else {
        for (int k = 0; k <= p; ++k)
            for (int j = 0; j + k <= p; ++j)
                for (int i = 0; i + j + k <= p; ++i)
                    lattice.push_back({p - i - j - k, i, j, k});
    }

    // A lattice node is identified by its (vertex, multiplicity) pairs.
    std::map<std::vector<std::pair<int, int>>, int> ids;
    LagrangeNodes out;
    out.cells.reserve(mesh.cells.size());
    for (const auto& cell : mesh.cells) {
        std::vector<int> tuple;
        tuple.reserve(lattice.size());
        for (const auto& a : lattice) {
            std::vector<std::pair<int, int>> key;
            Vec3 x = Vec3::Zero();
            for (int c = 0; c < nc; ++c) {
                if (a[c] == 0)
                    continue;
                key.emplace_back(cell[c], a[c]);
                x += (static_cast<double>(a[c]) / p) * mesh.vertices[cell[c]];
            }
            std::sort(key.begin(), key.end());
            auto [it, inserted] = ids.emplace(std::move(key), static_cast<int>(out.nodes.size()));
            if (inserted)
                out.nodes.push_back(x);
            tuple.push_back(it->second);
        }
        out.cells.push_back(std::move(tuple));
    }
    return out;
}

std::vector<int> facet_local_vertices(int dim, int facet)
{
    std::vector<int> out;
    for (int v = 0; v <= dim; ++v)
        if (v != facet)
            out.push_back(v);
    return out;
}

NeighborTable facet_neighbors(const BackgroundMesh& mesh)
{
    const int nf = mesh.dim + 1;
    NeighborTable table(mesh.cells.size());
    std::unordered_map<std::uint64_t, std::vector<std::pair<int, int>>> incident;
    incident.reserve(mesh.cells.size() * nf);

    auto sorted_facet = [&](int c, int f) {
        std::array<int, 3> v{0, 0, 0};
        auto local = facet_local_vertices(mesh.dim, f);
        for (std::size_t i = 0; i < local.size(); ++i)
            v[i] = mesh.cells[c][local[i]];
        std::sort(v.begin(), v.begin() + local.size());
        return v;
    };

    for (int c = 0; c < mesh.num_cells(); ++c)
        for (int f = 0; f < nf; ++f) {
            auto v = sorted_facet(c, f);
            incident[pack_key(v[0], v[1], mesh.dim == 3 ? v[2] : 0)].emplace_back(c, f);
        }

    for (const auto& [key, list] : incident) {
        if (list.size() > 2)
            throw MeshError("non-manifold facet shared by " + std::to_string(list.size()) + " cells");
        if (list.size() < 2)
            continue;
        for (int side = 0; side < 2; ++side) {
            auto [c, f] = list[side];
            auto [cn, fn] = list[1 - side];
            auto mine = facet_local_vertices(mesh.dim, f);
            auto theirs = facet_local_vertices(mesh.dim, fn);
            FacetNeighbor nb;
            nb.cell = cn;
            nb.facet = fn;
            for (std::size_t i = 0; i < mine.size(); ++i)
                for (std::size_t j = 0; j < theirs.size(); ++j)
                    if (mesh.cells[c][mine[i]] == mesh.cells[cn][theirs[j]])
                        nb.permutation[i] = static_cast<int>(j);
            table[c][f] = nb;
        }
    }
    return table;
}

bool on_box_boundary(const BackgroundMesh& mesh, std::span<const int> vertex_ids)
{
    std::uint8_t common = 0xff;
    for (int v : vertex_ids)
        common &= mesh.boundary_bits[v];
    return common != 0;
}

} // namespace mfforge
