#pragma once

#include "mfforge/surface_mesh.hpp"

#include <Eigen/Sparse>

namespace mfforge {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Shape functions tabulated at the degree 2p+2 rule of a reference shape.
struct ShapeTable {
    Shape shape;
    int order;
    int nodes;
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<double> N;  ///< [q * nodes + i]
    std::vector<Vec2> dN;   ///< [q * nodes + i]
};
const ShapeTable& shape_table(Shape shape, int order);

/// Geometry of the isoparametric map at one point.
struct SurfacePoint {
    Vec3 x = Vec3::Zero();
    Vec3 dr = Vec3::Zero();
    Vec3 ds = Vec3::Zero();
    Vec3 normal = Vec3::Zero();
    Eigen::Matrix2d Ginv = Eigen::Matrix2d::Zero(); ///< inverse first fundamental form (1x1 block on lines)
    double jacobian = 0.0;                          ///< sqrt(det G)
};

/// Throws MeshError when the first fundamental form is singular.
SurfacePoint surface_point(Shape shape, std::span<const Vec3> nodes, std::span<const double> N,
                           std::span<const Vec2> dN);

/// J G^-1 grad_r u at reference point r.
Vec3 surface_gradient(Shape shape, std::span<const Vec3> nodes, const Vec2& r, std::span<const double> u);

SparseMatrix assemble_stiffness(const SurfaceMesh& mesh, Execution exec = Execution::parallel);
SparseMatrix assemble_mass(const SurfaceMesh& mesh, Execution exec = Execution::parallel);
/// C_ij = int M_i (c_G . grad_G M_j) with c_G = (I - n n^T) c at each quadrature point.
SparseMatrix assemble_advection(const SurfaceMesh& mesh, const VectorField& c,
                                Execution exec = Execution::parallel);
Vector assemble_load(const SurfaceMesh& mesh, const ScalarField& f, Execution exec = Execution::parallel);
/// Boundary integral of g over edges whose marker is listed (all when empty).
Vector assemble_neumann(const SurfaceMesh& mesh, const ScalarField& g, std::span<const int> markers = {});

Vector interpolate(const SurfaceMesh& mesh, const ScalarField& u);
double l2_error(const SurfaceMesh& mesh, const Vector& uh, const ScalarField& exact);
double l2_norm(const SurfaceMesh& mesh, const Vector& uh);
/// int u_h ds
double integral(const SurfaceMesh& mesh, const Vector& uh);

} // namespace mfforge
