#pragma once

#include "mfforge/reconstruct.hpp"

#include <functional>

namespace mfforge {

enum class DecompositionKind { keep_whole, drop_whole, tri_to_tri_quad, quad_to_two_quads, quad_to_four_tris,
                               line_split };

/// Where a sub-element node comes from, in terms of the parent element.
struct SubNodeOrigin {
    enum Kind : std::uint8_t { parent_node, parent_edge, edge_cut, interface, internal_edge, interior };
    Kind kind = interior;
    int a = -1; ///< parent lattice index | parent edge | interface index | internal edge | sub-element
    int b = -1; ///< segment (0: start corner to cut, 1: cut to end corner) | internal index | lattice index
    int c = -1; ///< node index along the segment, counted from the segment start
};

struct SubEdgeOrigin {
    enum Kind : std::uint8_t { on_parent, on_interface, on_internal };
    Kind kind = on_internal;
    int edge = -1; ///< parent edge for on_parent
};

struct SubElementRef {
    Shape shape = Shape::tri;
    bool keep = false;
    std::vector<Vec2> ref_nodes; ///< parent reference coordinates, lattice order
    std::vector<SubNodeOrigin> origins;
    std::vector<SubEdgeOrigin> edges;
};

struct Decomposition {
    DecompositionKind kind = DecompositionKind::keep_whole;
    std::vector<SubElementRef> parts;
};

/// psi and its reference gradient at a reference point of the parent.
using ReferenceLevelSet = std::function<std::pair<double, Vec2>(const Vec2&)>;

/// Cut parameter along parent edge e in its local direction (for a line
/// element, edge 0 stands for the element itself).
using EdgeCutFn = std::function<double(int edge)>;

/// Decomposition of a reference element by psi. corner_values decide the
/// pattern; values within tol of zero count as positive unless that makes
/// the quad pattern ambiguous. No strictly positive corner keeps the
/// element whole, no strictly negative corner drops it.
Decomposition decompose_in_reference(Shape shape, int p, std::span<const double> corner_values,
                                     const EdgeCutFn& edge_cut, const ReferenceLevelSet& psi, double tol_root,
                                     double tol_zero);

/// Same, with psi given by nodal values of a degree-p interpolant.
Decomposition decompose_in_reference(Shape shape, int p, std::span<const double> nodal_values, double tol_root,
                                     double tol_zero);

std::vector<double> interpolate_slave_at_element(const LevelSetField& psi, const SurfaceElement& element);

/// Kept sub-elements of one element for one slave, mapped to physical space.
std::vector<SurfaceElement> restrict_element(const SurfaceElement& element, const LevelSetField& slave,
                                             const Tolerances& tol);

/// Folds restrict_element over the slaves in order.
std::vector<SurfaceElement> restrict_elements(std::vector<SurfaceElement> elements,
                                              std::span<const LevelSetField> slaves, const Tolerances& tol,
                                              Execution exec = Execution::parallel);

} // namespace mfforge
