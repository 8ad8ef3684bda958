#pragma once

#include "mfforge/background.hpp"
#include "mfforge/lattice.hpp"

#include <functional>
#include <optional>

namespace mfforge {

/// Pipeline tolerances, proportional to the background spacing.
struct Tolerances {
    double root = 0.0;    ///< 1e-12 h, Newton stopping tolerance
    double surface = 0.0; ///< 1e-10 h, on-surface acceptance and zero-sign band

    static Tolerances for_h(double h) { return {1e-12 * h, 1e-10 * h}; }
};

// Local edges of the background cells.
//   triangle: (0,1) (1,2) (2,0)
//   tet:      (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
std::span<const std::array<int, 2>> cell_edges(int dim);

enum class CutKind { none, line, triangular, quadrilateral };

struct CutTopology {
    CutKind kind = CutKind::none;
    std::vector<int> cut_edges;
    std::vector<int> corner_signs; ///< -1 or +1
};

/// Sign pattern of a background cell. Values within tol_surface of zero
/// count as positive.
CutTopology classify_cut(std::span<const double> corner_values, double tol_surface);

/// Scalar function of one parameter returning (value, derivative).
using ScalarCurve = std::function<std::pair<double, double>(double)>;

/// Root of f on [0,1] by a 20-point sign scan followed by safeguarded
/// Newton-bisection. End points within tol_zero are returned directly; more
/// than one sign change raises InvalidDataError.
double root_on_segment(const ScalarCurve& f, double tol_root, double tol_zero);

/// Root of g near 0 by Newton with step limit max_step, falling back to an
/// outward bracket search. Throws ReconstructionError on failure.
double solve_on_line(const ScalarCurve& g, double tol, double max_step);

/// Root parameter t in [0,1] of phi along the segment a -> b. End points
/// within tol_zero of the isosurface are returned directly.
double edge_root(const LevelSetField& field, const Vec3& a, const Vec3& b, double tol_root, double tol_zero);

/// Scalar root of phi(x0 + alpha dir) near alpha = 0 (Newton with step
/// limit and bracketing fall-back). Throws ReconstructionError on failure.
double solve_along(const LevelSetField& field, const Vec3& x0, const Vec3& dir, double tol, double max_step);

/// Line element on a cut triangular face from start to end (both roots on
/// face edges). Interior nodes: chord points moved along the in-plane
/// projection of grad(phi).
std::vector<Vec3> reconstruct_face_line(const LevelSetField& field, const std::array<Vec3, 3>& face,
                                        const Vec3& start, const Vec3& end, int p, double tol_root);

/// Permutation that orders the face corners by ascending global id:
/// result[k] = local position of the k-th smallest id.
std::array<int, 3> canonical_face_frame(const std::array<int, 3>& face_vertex_ids);

enum class NodeOrigin : std::uint8_t { cell_edge, cell_face, cell_interior, parent_node, slave_edge, slave_interface,
                                       slave_interior };

struct NodeProvenance {
    NodeOrigin origin = NodeOrigin::cell_interior;
    int index = -1; ///< local edge or face of the background cell, when applicable
};

// Leading tag of the provenance keys.
enum KeyTag : std::int64_t {
    kEdgeRoot = 1,
    kFaceLine = 2,
    kCellInterior = 3,
    kSubEdge = 4,
    kSubCut = 5,
    kInterface = 6,
    kInternalEdge = 7,
    kSubInterior = 8,
    kLineCut = 9,
    kVertexRoot = 10, ///< edge root that landed on a background vertex
};

constexpr int kNoMarker = -1;
constexpr int kBoxMarker = 0;

struct SurfaceElement {
    Shape shape = Shape::tri;
    int order = 1;
    int parent_cell = -1;
    NodeKey key;
    std::vector<Vec3> nodes;     ///< physical, lattice order
    std::vector<Vec3> ref_nodes; ///< reference coordinates in the parent cell
    std::vector<NodeKey> node_keys;
    std::vector<NodeProvenance> provenance;
    std::vector<int> edge_markers; ///< per local edge; kNoMarker for interior edges
};

/// Surface element of one background cell. Returns an empty optional for
/// uncut cells.
std::optional<SurfaceElement> reconstruct_element(const BackgroundMesh& mesh, int cell, const LevelSetField& field,
                                                  int p, const Tolerances& tol);

struct ReconstructionResult {
    std::vector<SurfaceElement> elements;
    int cut_cells = 0;
};

/// All cut cells of the background mesh, ordered by cell id.
ReconstructionResult reconstruct(const BackgroundMesh& mesh, const LevelSetField& field, int p, const Tolerances& tol,
                                 Execution exec = Execution::parallel);

/// Unit normal of a surface element at r (3D: dr x ds, 2D: rotated tangent).
Vec3 element_normal(const SurfaceElement& e, const Vec2& r);

} // namespace mfforge
