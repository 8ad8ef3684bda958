#pragma once

#include "mfforge/reconstruct.hpp"

namespace mfforge {

struct SurfaceCell {
    Shape shape = Shape::tri;
    std::vector<int> nodes; ///< lattice order
    int parent = -1;        ///< background cell
};

struct BoundaryEdge {
    int cell = -1;
    int local_edge = -1;
    int marker = kBoxMarker; ///< 0 box boundary, otherwise slave id
};

/// Conforming mixed surface mesh of order p.
struct SurfaceMesh {
    int dim = 3; ///< ambient dimension
    int order = 1;
    std::vector<Vec3> nodes;
    std::vector<SurfaceCell> cells;
    std::vector<BoundaryEdge> boundary;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
    /// Lattice node ids of a boundary edge (a single node in 2D).
    std::vector<int> boundary_edge_nodes(const BoundaryEdge& b) const;
    /// Sorted unique nodes on boundary edges; all markers when empty.
    std::vector<int> boundary_nodes(std::span<const int> markers = {}) const;
    /// Sorted boundary markers per node.
    std::vector<std::vector<int>> node_tags() const;
};

/// Global numbering by sorted provenance key. With verify set, nodes that
/// share a key must agree to 1e-12 or a MeshError is raised.
SurfaceMesh unify_nodes(std::span<const SurfaceElement> elements, int dim, int order, bool verify = false);

struct QualityReport {
    double size_max = 0.0; ///< area (3D) or length (2D)
    double size_min = 0.0;
    double ratio = 0.0;
    double max_angle_tri = 0.0; ///< degrees
    double max_angle_quad = 0.0;
    int tris = 0;
    int quads = 0;
    int lines = 0;
};

QualityReport quality_report(const SurfaceMesh& mesh);

/// Measure (area or length) of one cell by quadrature.
double cell_measure(const SurfaceMesh& mesh, int cell);
double total_measure(const SurfaceMesh& mesh);

/// Edges shared by an unequal number of cells, keyed by sorted end nodes.
struct EdgeCensus {
    int interior = 0; ///< shared by exactly two cells
    int open = 0;     ///< one cell
    int non_manifold = 0;
    int mismatched = 0; ///< shared edges whose node sequences differ
};
EdgeCensus edge_census(const SurfaceMesh& mesh);

} // namespace mfforge
