#pragma once

#include "mfforge/levelset.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace mfforge {

using Param = Eigen::Vector2d;
using Parametrization = std::function<Vec3(const Param&)>;
using LocalFunction = std::function<double(const Param&)>;

/// Derivatives of a parametrized manifold x(xi) and of u(xi) at one point.
/// Only the leading dim x dim blocks are used.
struct LocalJet {
    int dim = 1;
    std::array<Vec3, 2> dx{Vec3::Zero(), Vec3::Zero()};
    std::array<std::array<Vec3, 2>, 2> ddx{{{Vec3::Zero(), Vec3::Zero()}, {Vec3::Zero(), Vec3::Zero()}}};
    Param du = Param::Zero();
    Eigen::Matrix2d ddu = Eigen::Matrix2d::Zero();
};

/// f = -Laplace-Beltrami(u) = -g^ij (u_ij - Gamma^k_ij u_k).
double laplace_beltrami_source(const LocalJet& jet);

/// f = -1/sqrt(g) d_i (g^ij sqrt(g) d_j u) by nested fourth-order central
/// differences with the given step. Throws InvalidDataError for a
/// near-singular metric.
double apply_lb_local(int dim, const Parametrization& x, const LocalFunction& u, const Param& xi,
                      double step = 1e-3);

enum class BoundaryCondition { zero_mean, dirichlet, none };

/// Which background nodes relocation may move.
enum class NodePolicy { free, sliding_box };

/// Parametrization of the exact manifold used by consistency checks.
struct Chart {
    int dim = 1;
    Parametrization map;
    Param lo = Param::Zero();
    Param hi = Param::Zero();
};

using SpaceTimeField = std::function<double(const Vec3&, double)>;

struct TransportSpec {
    VectorField velocity;
    double lambda = 0.0;
    ScalarField initial;
    SpaceTimeField exact; ///< empty when no exact solution is known
    std::vector<int> inflow_markers;
    ScalarField inflow_value;
    double t_end = 1.0;
    int n_steps = 4096;
    std::vector<double> checkpoints;
};

struct CaseSpec {
    std::string name;
    std::string description;
    ManifoldDefinition manifold;
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();
    double length_scale = 1.0; ///< h = length_scale / n
    std::vector<int> sweep;    ///< desk-scale denominators n
    std::vector<int> full_sweep;
    std::vector<int> orders;
    std::vector<int> full_orders;
    ScalarField exact;  ///< stationary exact solution, may be empty
    ScalarField source;
    BoundaryCondition bc = BoundaryCondition::none;
    NodePolicy nodes = NodePolicy::free;
    bool closed = true;
    std::optional<Chart> chart;
    std::optional<TransportSpec> transport;

    int dim() const { return manifold.ambient_dim; }
    double h_for(int n) const { return length_scale / n; }
};

/// Throws LookupError for unknown names.
const CaseSpec& get_case(const std::string& name);
std::vector<std::string> case_names();

} // namespace mfforge
