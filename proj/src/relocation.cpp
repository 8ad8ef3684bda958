#include "mfforge/relocation.hpp"

#include "parallel.hpp"

#include <cmath>

namespace mfforge {

RelocationParams RelocationParams::defaults(double h) { return scaled(h, 3.0, 0.25, 0.1); }

RelocationParams RelocationParams::scaled(double h, double crit, double min, double step)
{
    RelocationParams p;
    p.d_crit = crit * h;
    p.d_min = min * h;
    p.d_step = step * h;
    p.newton_tol = 1e-12 * h;
    return p;
}

void RelocationParams::validate() const
{
    if (!(0.0 < d_step && d_step < d_min && d_min < d_crit))
        throw ArgumentError("relocation parameters need 0 < d_step < d_min < d_crit");
    if (max_iters < 1 || newton_max_iters < 1 || !(newton_tol > 0.0))
        throw ArgumentError("relocation iteration limits must be positive");
}

namespace {

enum class Probe { ok, singular, diverged };

Probe probe_distance(const LevelSetField& field, const Vec3& x0, double tol, int max_iters, DistanceEstimate& out)
{
    Vec3 x = x0;
    double phi0 = field(x0);
    double phi = phi0;
    int it = 0;
    while (std::abs(phi) > tol) {
        if (it++ == max_iters)
            return Probe::diverged;
        Vec3 g = field.grad(x);
        double g2 = g.squaredNorm();
        if (!(g2 > 1e-24))
            return Probe::singular;
        x -= (phi / g2) * g;
        phi = field(x);
        if (!std::isfinite(phi))
            return Probe::diverged;
    }
    double sign = phi0 < 0.0 ? -1.0 : 1.0;
    Vec3 diff = x0 - x;
    double dist = diff.norm();
    out.distance = sign * dist;
    if (dist > 0.0) {
        out.direction = diff / out.distance;
    }
    else {
        Vec3 g = field.grad(x0);
        if (!(g.norm() > 1e-12))
            return Probe::singular;
        out.direction = g.normalized();
    }
    out.converged = true;
    return Probe::ok;
}

} // namespace

DistanceEstimate estimate_signed_distance(const LevelSetField& field, const Vec3& x, double newton_tol,
                                          int newton_max_iters)
{
    DistanceEstimate est;
    if (probe_distance(field, x, newton_tol, newton_max_iters, est) == Probe::singular)
        throw InvalidDataError("singular level-set gradient during distance estimation");
    return est;
}

double step_length(double distance, const RelocationParams& params)
{
    double a = std::abs(distance);
    if (a >= params.d_crit)
        return 0.0;
    return params.d_step * (1.0 - a / params.d_crit);
}

AxisLocks free_locks(const BackgroundMesh& mesh) { return AxisLocks(mesh.vertices.size(), 0); }

AxisLocks frozen_box_boundary(const BackgroundMesh& mesh)
{
    AxisLocks locks(mesh.vertices.size(), 0);
    const std::uint8_t all = mesh.dim == 2 ? 0x3 : 0x7;
    for (std::size_t v = 0; v < locks.size(); ++v)
        if (mesh.boundary_bits[v] != 0)
            locks[v] = all;
    return locks;
}

AxisLocks sliding_box_boundary(const BackgroundMesh& mesh)
{
    AxisLocks locks(mesh.vertices.size(), 0);
    for (std::size_t v = 0; v < locks.size(); ++v)
        for (int a = 0; a < mesh.dim; ++a)
            if (mesh.boundary_bits[v] & (0x3u << (2 * a)))
                locks[v] |= 1u << a;
    return locks;
}

namespace {

struct Sweep {
    std::vector<Vec3> displacement;
    std::vector<char> moving;
    std::vector<char> active;
    std::vector<char> in_band;
    int skipped = 0;
};

// Distance probe for every active node; fills displacements and retires
// nodes that left the d_min band.
void sweep_displacements(const std::vector<Vec3>& x, const LevelSetField& field, const RelocationParams& params,
                         const AxisLocks* locks, int dim, Execution exec, Sweep& s)
{
    const long n = static_cast<long>(x.size());
    std::vector<char> skip(n, 0);
    s.in_band.assign(n, 0);
    auto body = [&](long i) {
        s.moving[i] = 0;
        if (!s.active[i])
            return;
        DistanceEstimate est;
        if (probe_distance(field, x[i], params.newton_tol, params.newton_max_iters, est) != Probe::ok) {
            skip[i] = 1;
            return;
        }
        if (std::abs(est.distance) > params.d_min) {
            s.active[i] = 0;
            return;
        }
        s.in_band[i] = 1;
        double q = step_length(est.distance, params);
        double sign = est.distance < 0.0 ? -1.0 : 1.0;
        Vec3 d = q * sign * est.direction;
        if (locks)
            for (int a = 0; a < 3; ++a)
                if ((*locks)[i] & (1u << a))
                    d[a] = 0.0;
        if (dim == 2)
            d.z() = 0.0;
        if (d.squaredNorm() == 0.0) {
            skip[i] = 1;
            return;
        }
        s.displacement[i] = d;
        s.moving[i] = 1;
    };
    detail::for_range(0, n, exec, body, 256);
    s.skipped = 0;
    for (long i = 0; i < n; ++i)
        s.skipped += skip[i];
}

} // namespace

RelocationReport relocate_nodes(BackgroundMesh& mesh, const LevelSetField& field, const RelocationParams& params,
                                const AxisLocks& locks, Execution exec)
{
    params.validate();
    const int nv = mesh.num_vertices();
    if (static_cast<int>(locks.size()) != nv)
        throw ArgumentError("axis lock list does not match the vertex count");

    // vertex -> incident cells
    std::vector<int> offset(nv + 1, 0), incident;
    const int nc = mesh.corners_per_cell();
    for (const auto& cell : mesh.cells)
        for (int c = 0; c < nc; ++c)
            ++offset[cell[c] + 1];
    for (int v = 0; v < nv; ++v)
        offset[v + 1] += offset[v];
    incident.resize(offset[nv]);
    {
        std::vector<int> fill(offset.begin(), offset.end() - 1);
        for (int c = 0; c < mesh.num_cells(); ++c)
            for (int k = 0; k < nc; ++k)
                incident[fill[mesh.cells[c][k]]++] = c;
    }
    std::vector<double> floor_volume(mesh.cells.size());
    for (int c = 0; c < mesh.num_cells(); ++c)
        floor_volume[c] = 1e-3 * std::abs(mesh.cell_volume(c));

    const std::uint8_t all = mesh.dim == 2 ? 0x3 : 0x7;
    Sweep s;
    s.displacement.assign(nv, Vec3::Zero());
    s.moving.assign(nv, 0);
    s.active.assign(nv, 0);
    for (int v = 0; v < nv; ++v)
        s.active[v] = (locks[v] & all) != all;

    RelocationReport report;
    for (int sweep = 0; sweep < params.max_iters; ++sweep) {
        sweep_displacements(mesh.vertices, field, params, &locks, mesh.dim, exec, s);
        report.skipped = s.skipped;
        bool any = false;
        for (int v = 0; v < nv; ++v)
            any = any || s.moving[v];
        if (!any)
            break;
        report.iterations = sweep + 1;

        for (int v = 0; v < nv; ++v) {
            if (!s.moving[v])
                continue;
            const Vec3 origin = mesh.vertices[v];
            Vec3 d = s.displacement[v];
            bool accepted = false;
            for (int attempt = 0; attempt <= 10; ++attempt) {
                mesh.vertices[v] = origin + d;
                bool valid = true;
                for (int k = offset[v]; k < offset[v + 1] && valid; ++k)
                    valid = mesh.cell_volume(incident[k]) > floor_volume[incident[k]];
                if (valid) {
                    accepted = true;
                    report.halved += attempt > 0;
                    break;
                }
                d *= 0.5;
            }
            if (accepted) {
                ++report.moves;
            }
            else {
                mesh.vertices[v] = origin;
                ++report.rejected;
            }
        }
    }

    // final census of the band
    sweep_displacements(mesh.vertices, field, params, &locks, mesh.dim, exec, s);
    report.remaining = 0;
    for (int v = 0; v < nv; ++v)
        report.remaining += s.in_band[v];
    report.status = report.remaining == 0 ? RelocationStatus::converged : RelocationStatus::max_iters_reached;
    return report;
}

RelocationReport relocate_points(std::vector<Vec3>& points, const LevelSetField& field,
                                 const RelocationParams& params)
{
    params.validate();
    const int n = static_cast<int>(points.size());
    Sweep s;
    s.displacement.assign(n, Vec3::Zero());
    s.moving.assign(n, 0);
    s.active.assign(n, 1);
    RelocationReport report;
    for (int sweep = 0; sweep < params.max_iters; ++sweep) {
        sweep_displacements(points, field, params, nullptr, 3, Execution::serial, s);
        bool any = false;
        for (int i = 0; i < n; ++i)
            if (s.moving[i]) {
                points[i] += s.displacement[i];
                ++report.moves;
                any = true;
            }
        if (!any)
            break;
        report.iterations = sweep + 1;
    }
    sweep_displacements(points, field, params, nullptr, 3, Execution::serial, s);
    for (int i = 0; i < n; ++i)
        report.remaining += s.in_band[i];
    report.skipped = s.skipped;
    report.status = report.remaining == 0 ? RelocationStatus::converged : RelocationStatus::max_iters_reached;
    return report;
}

} // namespace mfforge
