#pragma once

#include "mfforge/background.hpp"

namespace mfforge {

struct RelocationParams {
    double d_crit = 0.0;
    double d_min = 0.0;
    double d_step = 0.0;
    int max_iters = 100;
    double newton_tol = 0.0;
    int newton_max_iters = 50;

    /// d_crit = 3h, d_min = h/4, d_step = h/10.
    static RelocationParams defaults(double h);
    static RelocationParams scaled(double h, double crit, double min, double step);
    void validate() const;
};

struct DistanceEstimate {
    double distance = 0.0; ///< signed, sign(phi(x)) with sign(0) = +1
    Vec3 direction = Vec3::Zero();
    bool converged = false;
};

/// Closest-point Newton iteration x <- x - phi grad(phi) / |grad(phi)|^2.
DistanceEstimate estimate_signed_distance(const LevelSetField& field, const Vec3& x, double newton_tol,
                                          int newton_max_iters);

/// q = d_step (1 - |D| / d_crit), zero outside the critical band.
double step_length(double distance, const RelocationParams& params);

enum class RelocationStatus { converged, max_iters_reached };

struct RelocationReport {
    RelocationStatus status = RelocationStatus::converged;
    int iterations = 0;
    int moves = 0;
    int halved = 0;
    int rejected = 0;
    int skipped = 0; ///< Newton failures or singular gradients
    int remaining = 0; ///< nodes still inside the d_min band
};

/// Per-vertex bitmask of coordinate axes that must not change.
using AxisLocks = std::vector<std::uint8_t>;

AxisLocks free_locks(const BackgroundMesh& mesh);
/// Every box-boundary vertex is fixed.
AxisLocks frozen_box_boundary(const BackgroundMesh& mesh);
/// Box-boundary vertices keep the coordinates of the faces they lie on but
/// may slide within them.
AxisLocks sliding_box_boundary(const BackgroundMesh& mesh);

RelocationReport relocate_nodes(BackgroundMesh& mesh, const LevelSetField& field, const RelocationParams& params,
                                const AxisLocks& locks, Execution exec = Execution::parallel);

/// Same fix-point iteration for a free point cloud (no cell guard).
RelocationReport relocate_points(std::vector<Vec3>& points, const LevelSetField& field,
                                 const RelocationParams& params);

} // namespace mfforge
