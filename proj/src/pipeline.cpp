#include "mfforge/pipeline.hpp"

#include <chrono>

namespace mfforge {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

RelocationParams RelocationOptions::params(double h) const
{
    RelocationParams p = RelocationParams::scaled(h, crit, min, step);
    p.max_iters = max_iters;
    p.validate();
    return p;
}

PreparedBackground prepare_background(const ManifoldDefinition& def, const Vec3& lo, const Vec3& hi, double h,
                                      NodePolicy policy, const RelocationOptions& relocation, Execution exec)
{
    def.validate();
    const auto start = std::chrono::steady_clock::now();
    PreparedBackground out;
    out.mesh = build_box_mesh(lo, hi, divisions_for(lo, hi, h, def.ambient_dim), def.ambient_dim, 1);
    if (relocation.enabled) {
        const RelocationParams params = relocation.params(out.mesh.h);
        const AxisLocks locks =
            policy == NodePolicy::sliding_box ? sliding_box_boundary(out.mesh) : free_locks(out.mesh);
        out.relocation.push_back(relocate_nodes(out.mesh, def.master, params, locks, exec));
        for (const auto& s : def.slaves)
            out.relocation.push_back(relocate_nodes(out.mesh, s, params, locks, exec));
    }
    out.seconds = seconds_since(start);
    return out;
}

GeneratedMesh build_surface_mesh(const ManifoldDefinition& def, const BackgroundMesh& background, int p,
                                 Execution exec, bool verify)
{
    const auto start = std::chrono::steady_clock::now();
    GeneratedMesh out;
    out.tol = Tolerances::for_h(background.h);
    ReconstructionResult rec = reconstruct(background, def.master, p, out.tol, exec);
    out.cut_cells = rec.cut_cells;
    out.elements_before_restriction = static_cast<int>(rec.elements.size());
    auto elements = restrict_elements(std::move(rec.elements), def.slaves, out.tol, exec);
    out.mesh = unify_nodes(elements, def.ambient_dim, p, verify);
    out.quality = quality_report(out.mesh);
    out.seconds = seconds_since(start);
    return out;
}

MeshRun generate_mesh(const CaseSpec& c, double h, int p, const RelocationOptions& relocation, Execution exec)
{
    MeshRun run;
    run.background = prepare_background(c.manifold, c.lo, c.hi, h, c.nodes, relocation, exec);
    run.surface = build_surface_mesh(c.manifold, run.background.mesh, p, exec);
    return run;
}

PoissonResult solve_poisson(const SurfaceMesh& mesh, const CaseSpec& c, bool estimate_condition, Execution exec)
{
    if (!c.source)
        throw ArgumentError("case '" + c.name + "' has no stationary problem");
    const auto start = std::chrono::steady_clock::now();
    PoissonResult out;
    out.dofs = mesh.num_nodes();
    const SparseMatrix K = assemble_stiffness(mesh, exec);
    const SparseMatrix M = assemble_mass(mesh, exec);
    LinearSystem system = make_system(K, assemble_load(mesh, c.source, exec));
    switch (c.bc) {
    case BoundaryCondition::zero_mean: apply_zero_mean(system, M); break;
    case BoundaryCondition::dirichlet: {
        if (!c.exact)
            throw ArgumentError("Dirichlet case without boundary data");
        const auto nodes = mesh.boundary_nodes();
        std::vector<double> values;
        values.reserve(nodes.size());
        for (int n : nodes)
            values.push_back(c.exact(mesh.nodes[n]));
        apply_dirichlet(system, nodes, values);
        break;
    }
    case BoundaryCondition::none: break;
    }
    Solution sol = solve_direct(system);
    out.u = std::move(sol.u);
    out.residual = sol.residual;
    out.multiplier = sol.multiplier;
    out.mean = integral(mesh, out.u);
    if (c.exact)
        out.l2_error = l2_error(mesh, out.u, c.exact);
    if (estimate_condition)
        out.condition = condition_estimate(constrained_matrix(system));
    out.seconds = seconds_since(start);
    return out;
}

TransportResult solve_transport(const SurfaceMesh& mesh, const CaseSpec& c, const TransportOptions& options,
                                Execution exec)
{
    if (!c.transport)
        throw ArgumentError("case '" + c.name + "' has no transport problem");
    const TransportSpec& spec = *c.transport;
    const auto start = std::chrono::steady_clock::now();

    TransientProblem problem;
    problem.M = assemble_mass(mesh, exec);
    problem.K = assemble_stiffness(mesh, exec);
    problem.C = assemble_advection(mesh, spec.velocity, exec);
    problem.lambda = options.lambda.value_or(spec.lambda);
    problem.u0 = interpolate(mesh, spec.initial);
    problem.t0 = 0.0;
    problem.t_end = spec.t_end;
    problem.n_steps = options.n_steps > 0 ? options.n_steps : spec.n_steps;
    if (!spec.inflow_markers.empty()) {
        problem.dirichlet_nodes = mesh.boundary_nodes(spec.inflow_markers);
        if (problem.dirichlet_nodes.empty())
            throw MeshError("case '" + c.name + "': no boundary nodes carry the inflow markers");
        problem.dirichlet_value = [&mesh, g = spec.inflow_value](int node, double) { return g(mesh.nodes[node]); };
        for (int n : problem.dirichlet_nodes)
            problem.u0[n] = spec.inflow_value(mesh.nodes[n]);
    }

    TransportResult out;
    out.dofs = mesh.num_nodes();
    const Vector weights = problem.M * Vector::Ones(out.dofs);
    auto observer = [&](double t, const Vector& u) {
        out.times.push_back(t);
        out.integrals.push_back(weights.dot(u));
        out.l2_norms.push_back(std::sqrt(std::max(0.0, u.dot(problem.M * u))));
    };
    const auto& checkpoints = options.checkpoints.empty() ? spec.checkpoints : options.checkpoints;
    out.trajectory = integrate(problem, checkpoints, options.solver, observer);
    if (spec.exact) {
        const double t_end = spec.t_end;
        out.l2_error = l2_error(mesh, out.trajectory.states.back(),
                                [&](const Vec3& x) { return spec.exact(x, t_end); });
    }
    out.seconds = seconds_since(start);
    return out;
}

} // namespace mfforge
