#pragma once

#include "mfforge/surface_mesh.hpp"

#include <iosfwd>
#include <string>

namespace mfforge {

// Native text format:
//   MFMESH v1
//   dim p
//   nodes N      followed by N lines of hex-float coordinates
//   cells M      followed by M lines "shape id..."
//   boundary B   followed by B lines "cell localedge marker"
void write_native(std::ostream& out, const SurfaceMesh& mesh);
SurfaceMesh read_native(std::istream& in);
void export_native(const SurfaceMesh& mesh, const std::string& path);
SurfaceMesh import_native(const std::string& path);

struct NamedField {
    std::string name;
    std::vector<double> values; ///< one per mesh node
};

/// Legacy VTK unstructured grid. Every order-p cell is split into linear
/// sub-cells of its node lattice; point data are the nodal values.
void write_visualization(std::ostream& out, const SurfaceMesh& mesh, std::span<const NamedField> fields);
void export_visualization(const SurfaceMesh& mesh, std::span<const NamedField> fields, const std::string& path);

/// Linear sub-cells of one lattice, as lattice index tuples.
std::vector<std::vector<int>> lattice_subcells(Shape shape, int p);

} // namespace mfforge
