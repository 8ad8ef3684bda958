#pragma once

#include "mfforge/cases.hpp"
#include "mfforge/linear_system.hpp"
#include "mfforge/relocation.hpp"
#include "mfforge/restrict.hpp"
#include "mfforge/surface_mesh.hpp"
#include "mfforge/timeint.hpp"

#include <limits>

namespace mfforge {

/// Relocation band factors relative to h.
struct RelocationOptions {
    bool enabled = true;
    double crit = 3.0;
    double min = 0.25;
    double step = 0.1;
    int max_iters = 100;

    RelocationParams params(double h) const;
};

struct PreparedBackground {
    BackgroundMesh mesh;
    /// One report per field: master first, then the slaves in order.
    std::vector<RelocationReport> relocation;
    double seconds = 0.0;
};

/// Box mesh with spacing h, relocated away from the master and then from
/// each slave in turn.
PreparedBackground prepare_background(const ManifoldDefinition& def, const Vec3& lo, const Vec3& hi, double h,
                                      NodePolicy policy, const RelocationOptions& relocation,
                                      Execution exec = Execution::parallel);

struct GeneratedMesh {
    SurfaceMesh mesh;
    QualityReport quality;
    Tolerances tol;
    int cut_cells = 0;
    int elements_before_restriction = 0;
    double seconds = 0.0;
};

/// Reconstruct, restrict and unify on a prepared background.
GeneratedMesh build_surface_mesh(const ManifoldDefinition& def, const BackgroundMesh& background, int p,
                                 Execution exec = Execution::parallel, bool verify = false);

struct MeshRun {
    PreparedBackground background;
    GeneratedMesh surface;
};

MeshRun generate_mesh(const CaseSpec& c, double h, int p, const RelocationOptions& relocation = {},
                      Execution exec = Execution::parallel);

struct PoissonResult {
    Vector u;
    int dofs = 0;
    double l2_error = std::numeric_limits<double>::quiet_NaN();
    double mean = 0.0;     ///< int u_h ds
    double residual = 0.0; ///< relative residual of the constrained system
    double multiplier = 0.0;
    std::optional<ConditionEstimate> condition;
    double seconds = 0.0;
};

/// Stationary Laplace-Beltrami problem of the case on the given mesh.
PoissonResult solve_poisson(const SurfaceMesh& mesh, const CaseSpec& c, bool estimate_condition = false,
                            Execution exec = Execution::parallel);

struct TransportOptions {
    int n_steps = 0;                      ///< 0: case default
    std::optional<double> lambda;         ///< overrides the case diffusion
    std::vector<double> checkpoints;      ///< empty: case default
    StageSolver solver = StageSolver::coupled;
};

struct TransportResult {
    Trajectory trajectory;         ///< states at the checkpoints and the end
    std::vector<double> times;     ///< every step, starting with t0
    std::vector<double> integrals; ///< int u_h ds at every entry of times
    std::vector<double> l2_norms;  ///< |u_h|_L2 at every entry of times
    int dofs = 0;
    double l2_error = std::numeric_limits<double>::quiet_NaN(); ///< at t_end, when the exact solution is known
    double seconds = 0.0;
};

TransportResult solve_transport(const SurfaceMesh& mesh, const CaseSpec& c, const TransportOptions& options = {},
                                Execution exec = Execution::parallel);

} // namespace mfforge
