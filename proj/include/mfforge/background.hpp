#pragma once

#include "mfforge/common.hpp"
#include "mfforge/levelset.hpp"

#include <array>

namespace mfforge {

/// Straight-edged simplicial background mesh over a box. Only the corner
/// vertices are stored; the Lagrange nodes of order `order` sit on the
/// barycentric lattice of each cell and are generated on demand.
struct BackgroundMesh {
    int dim = 3;
    int order = 1;
    double h = 0.0;
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();
    std::array<int, 3> divisions{1, 1, 1};
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> cells; // 2D cells use the first three entries
    /// Per vertex: bit 2a set when the vertex lies on the low face of axis a,
    /// bit 2a+1 for the high face. Topological, so it survives relocation.
    std::vector<std::uint8_t> boundary_bits;

    int corners_per_cell() const { return dim + 1; }
    int num_cells() const { return static_cast<int>(cells.size()); }
    int num_vertices() const { return static_cast<int>(vertices.size()); }

    /// Signed d-volume of the straight cell.
    double cell_volume(int c) const;
    /// Reference coordinates (x = X0 + sum_a xi_a (X_a - X0)) of a physical point.
    Vec3 to_reference(int c, const Vec3& x) const;
};

BackgroundMesh build_box_mesh(const Vec3& lo, const Vec3& hi, std::array<int, 3> divisions, int dim, int order);

/// Divisions per axis so that the spacing is as close to h as possible.
std::array<int, 3> divisions_for(const Vec3& lo, const Vec3& hi, double h, int dim);

double characteristic_h(const BackgroundMesh& mesh);

/// Full Lagrange node set of the background mesh (unique nodes, per-cell
/// tuples of (p+1)(p+2)/2 or (p+1)(p+2)(p+3)/6 node ids).
struct LagrangeNodes {
    std::vector<Vec3> nodes;
    std::vector<std::vector<int>> cells;
};
LagrangeNodes lagrange_nodes(const BackgroundMesh& mesh);

/// Local facet f of a cell is the facet opposite local vertex f; its corners
/// are the remaining local vertices in increasing local order.
std::vector<int> facet_local_vertices(int dim, int facet);

struct FacetNeighbor {
    int cell = -1; ///< -1 marks a boundary facet
    int facet = -1;
    /// permutation[i] = position in the neighbor's facet corner list of this
    /// facet's corner i.
    std::array<int, 3> permutation{0, 1, 2};

    bool is_boundary() const { return cell < 0; }
};
using NeighborTable = std::vector<std::array<FacetNeighbor, 4>>;

NeighborTable facet_neighbors(const BackgroundMesh& mesh);

/// True when all listed vertices share a box face.
bool on_box_boundary(const BackgroundMesh& mesh, std::span<const int> vertex_ids);

} // namespace mfforge
