// mfforge command line driver.
#include "mfforge/mesh_io.hpp"
#include "mfforge/study.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mfforge;

namespace {

struct Options {
    std::string case_name;
    double h = 0.0;
    int n = 0;
    std::vector<double> hsweep;
    int order = 0; ///< 0: first order listed by the case
    std::string orders;
    bool no_relocate = false;
    double dcrit = 3.0, dmin = 0.25, dstep = 0.1;
    std::string out = ".";
    bool viz = false;
    bool full = false;
    int jobs = 1;
    bool no_timing = false;
    bool condition = false;
    int steps = 0;
    std::vector<double> checkpoints;
    double lambda = -1.0;
    bool serial = false;
    bool diagonalized = false;
};

std::vector<int> parse_orders(const std::string& s)
{
    std::vector<int> out;
    auto dots = s.find("..");
    if (dots != std::string::npos) {
        const int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
        for (int p = a; p <= b; ++p)
            out.push_back(p);
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stoi(tok));
    return out;
}

RelocationOptions relocation_of(const Options& o)
{
    RelocationOptions r;
    r.enabled = !o.no_relocate;
    r.crit = o.dcrit;
    r.min = o.dmin;
    r.step = o.dstep;
    return r;
}

Execution exec_of(const Options& o) { return o.serial ? Execution::serial : Execution::parallel; }

double h_of(const Options& o, const CaseSpec& c)
{
    if (o.h > 0.0)
        return o.h;
    if (o.n > 0)
        return c.h_for(o.n);
    return c.h_for(c.sweep.front());
}

std::string stem(const CaseSpec& c, double h, int p)
{
    std::ostringstream s;
    s << c.name << "_h" << std::setprecision(6) << h << "_p" << p;
    return s.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path);
    if (!f)
        throw Error("cannot write " + path.string());
    f << text;
}

std::string quality_text(const MeshRun& run)
{
    const auto& q = run.surface.quality;
    std::ostringstream s;
    s << std::setprecision(10);
    s << "nodes," << run.surface.mesh.num_nodes() << "\ncells," << run.surface.mesh.num_cells() << "\ntris," << q.tris
      << "\nquads," << q.quads << "\nlines," << q.lines << "\nsize_max," << q.size_max << "\nsize_min," << q.size_min
      << "\nratio," << q.ratio << "\nmax_angle_tri," << q.max_angle_tri << "\nmax_angle_quad," << q.max_angle_quad
      << "\ncut_cells," << run.surface.cut_cells << "\n";
    for (std::size_t i = 0; i < run.background.relocation.size(); ++i) {
        const auto& r = run.background.relocation[i];
        s << "relocation_" << i << ",iterations=" << r.iterations << ";moves=" << r.moves
          << ";remaining=" << r.remaining << ";status="
          << (r.status == RelocationStatus::converged ? "converged" : "max_iters_reached") << "\n";
    }
    return s.str();
}

std::string nodal_csv(const SurfaceMesh& mesh, std::span<const NamedField> fields)
{
    std::ostringstream s;
    s << std::setprecision(17) << "node,x,y,z";
    for (const auto& f : fields)
        s << ',' << f.name;
    s << '\n';
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        s << i << ',' << mesh.nodes[i].x() << ',' << mesh.nodes[i].y() << ',' << mesh.nodes[i].z();
        for (const auto& f : fields)
            s << ',' << f.values[i];
        s << '\n';
    }
    return s.str();
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

int order_of(const Options& o, const CaseSpec& c)
{
    if (!o.orders.empty())
        return parse_orders(o.orders).front();
    return o.order > 0 ? o.order : c.orders.front();
}

void warn_relocation(const MeshRun& run)
{
    for (const auto& r : run.background.relocation)
        if (r.status != RelocationStatus::converged)
            std::cerr << "warning: relocation stopped after " << r.iterations << " sweeps with " << r.remaining
                      << " nodes inside the d_min band\n";
}

int run_mesh(const Options& o)
{
    const CaseSpec& c = get_case(o.case_name);
    const double h = h_of(o, c);
    const int p = order_of(o, c);
    MeshRun run = generate_mesh(c, h, p, relocation_of(o), exec_of(o));
    warn_relocation(run);
    fs::create_directories(o.out);
    const fs::path base = fs::path(o.out) / stem(c, h, p);
    export_native(run.surface.mesh, base.string() + ".mfmesh");
    write_text(base.string() + "_quality.csv", quality_text(run));
    if (o.viz)
        export_visualization(run.surface.mesh, {}, base.string() + ".vtk");
    std::cout << quality_text(run);
    return 0;
}

int run_solve(const Options& o)
{
    const CaseSpec& c = get_case(o.case_name);
    if (!c.source)
        throw ArgumentError("case '" + c.name + "' has no stationary problem");
    const double h = h_of(o, c);
    const int p = order_of(o, c);
    MeshRun run = generate_mesh(c, h, p, relocation_of(o), exec_of(o));
    warn_relocation(run);
    const PoissonResult r = solve_poisson(run.surface.mesh, c, o.condition, exec_of(o));
    std::vector<NamedField> fields{{"u", to_std(r.u)}};
    if (c.exact)
        fields.push_back({"exact", to_std(interpolate(run.surface.mesh, c.exact))});

    fs::create_directories(o.out);
    const fs::path base = fs::path(o.out) / stem(c, h, p);
    export_native(run.surface.mesh, base.string() + ".mfmesh");
    write_text(base.string() + "_quality.csv", quality_text(run));
    write_text(base.string() + "_solution.csv", nodal_csv(run.surface.mesh, fields));
    if (o.viz)
        export_visualization(run.surface.mesh, fields, base.string() + ".vtk");
    std::cout << std::setprecision(10) << "case," << c.name << "\nh," << h << "\np," << p << "\ndofs," << r.dofs
              << "\nl2_error," << r.l2_error << "\nintegral," << r.mean << "\nresidual," << r.residual << "\n";
    if (r.condition)
        std::cout << "condition," << r.condition->value << (r.condition->approximate ? " (approximate)" : "") << "\n";
    return 0;
}

int run_transport(const Options& o)
{
    const CaseSpec& c = get_case(o.case_name);
    if (!c.transport)
        throw ArgumentError("case '" + c.name + "' has no transport problem");
    const double h = h_of(o, c);
    const int p = order_of(o, c);
    MeshRun run = generate_mesh(c, h, p, relocation_of(o), exec_of(o));
    warn_relocation(run);
    TransportOptions t;
    t.n_steps = o.steps;
    t.checkpoints = o.checkpoints;
    if (o.lambda >= 0.0)
        t.lambda = o.lambda;
    t.solver = o.diagonalized ? StageSolver::diagonalized : StageSolver::coupled;
    const TransportResult r = solve_transport(run.surface.mesh, c, t, exec_of(o));

    fs::create_directories(o.out);
    const fs::path base = fs::path(o.out) / stem(c, h, p);
    export_native(run.surface.mesh, base.string() + ".mfmesh");
    std::ostringstream hist;
    hist << std::setprecision(17) << "t,integral,l2_norm\n";
    for (std::size_t i = 0; i < r.times.size(); ++i)
        hist << r.times[i] << ',' << r.integrals[i] << ',' << r.l2_norms[i] << '\n';
    write_text(base.string() + "_history.csv", hist.str());
    for (std::size_t k = 0; k < r.trajectory.times.size(); ++k) {
        std::ostringstream tag;
        tag << std::fixed << std::setprecision(2) << r.trajectory.times[k];
        std::vector<NamedField> fields{{"u", to_std(r.trajectory.states[k])}};
        if (c.transport->exact) {
            const double tk = r.trajectory.times[k];
            fields.push_back(
                {"exact", to_std(interpolate(run.surface.mesh, [&](const Vec3& x) { return c.transport->exact(x, tk); }))});
        }
        write_text(base.string() + "_t" + tag.str() + ".csv", nodal_csv(run.surface.mesh, fields));
        if (o.viz)
            export_visualization(run.surface.mesh, fields, base.string() + "_t" + tag.str() + ".vtk");
    }
    std::cout << std::setprecision(10) << "case," << c.name << "\nh," << h << "\np," << p << "\ndofs," << r.dofs
              << "\nsteps," << r.times.size() - 1 << "\nintegral_start," << r.integrals.front() << "\nintegral_end,"
              << r.integrals.back() << "\n";
    if (!std::isnan(r.l2_error))
        std::cout << "l2_error," << r.l2_error << "\n";
    return 0;
}

int run_converge_cmd(const Options& o, bool transport)
{
    const CaseSpec& c = get_case(o.case_name);
    ConvergeConfig cfg = default_converge_config(c, transport ? StudyMode::transport : StudyMode::poisson, o.full);
    if (!o.hsweep.empty())
        cfg.hs = o.hsweep;
    else if (o.h > 0.0 || o.n > 0)
        cfg.hs = {h_of(o, c)};
    if (!o.orders.empty())
        cfg.orders = parse_orders(o.orders);
    cfg.relocation = relocation_of(o);
    cfg.condition = o.condition;
    cfg.jobs = o.jobs;
    cfg.exec = exec_of(o);
    cfg.transport.n_steps = o.steps;
    if (o.lambda >= 0.0)
        cfg.transport.lambda = o.lambda;
    cfg.transport.solver = o.diagonalized ? StageSolver::diagonalized : StageSolver::coupled;
    const auto rows = run_converge(cfg);
    std::ostringstream csv;
    write_converge_csv(csv, rows, !o.no_timing);
    fs::create_directories(o.out);
    write_text(fs::path(o.out) / (c.name + (transport ? "_transport" : "") + "_converge.csv"), csv.str());
    std::cout << csv.str();
    for (const auto& r : rows)
        if (!r.failure.empty())
            return 2;
    return 0;
}

void add_common(CLI::App* app, Options& o)
{
    app->add_option("--case", o.case_name, "case name")->required();
    app->add_option("--h", o.h, "background spacing");
    app->add_option("--n", o.n, "background spacing as length_scale / n");
    app->add_option("--order", o.order, "element order (default: first order of the case)")->check(CLI::Range(1, 6));
    app->add_flag("--no-relocate", o.no_relocate, "skip background node relocation");
    app->add_option("--dcrit", o.dcrit, "critical band, multiple of h");
    app->add_option("--dmin", o.dmin, "target clearance, multiple of h");
    app->add_option("--dstep", o.dstep, "largest move per sweep, multiple of h");
    app->add_option("--out", o.out, "output directory");
    app->add_flag("--viz", o.viz, "also write VTK files");
    app->add_flag("--serial", o.serial, "use the serial reference kernels");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Higher-order surface meshes from level sets, and PDEs on them"};
    app.set_help_flag("--help", "print this help and exit");
    app.set_config("--config", "", "TOML/INI file mirroring the flags");
    app.require_subcommand(1);
    Options o;

    auto* mesh = app.add_subcommand("mesh", "generate a surface mesh");
    add_common(mesh, o);

    auto* solve = app.add_subcommand("solve", "stationary Laplace-Beltrami problem");
    add_common(solve, o);
    solve->add_flag("--condition", o.condition, "estimate the condition number");

    auto* transport = app.add_subcommand("transport", "advection-diffusion with Gauss IRK");
    add_common(transport, o);
    transport->add_option("--orders", o.orders, "element order (first entry used)");
    transport->add_option("--steps", o.steps, "number of time steps");
    transport->add_option("--checkpoints", o.checkpoints, "output times")->delimiter(',');
    transport->add_option("--lambda", o.lambda, "diffusion coefficient override");
    transport->add_flag("--diagonalized", o.diagonalized, "diagonalized stage solver");

    auto* converge = app.add_subcommand("converge", "convergence sweep, CSV output");
    add_common(converge, o);
    converge->add_option("--hsweep", o.hsweep, "h values, strictly decreasing")->delimiter(',');
    converge->add_option("--orders", o.orders, "orders, e.g. 1..6 or 1,3,5");
    converge->add_flag("--full", o.full, "extended sweep (finer levels, orders up to 6)");
    converge->add_option("--jobs", o.jobs, "orders run concurrently per h level");
    converge->add_flag("--no-timing", o.no_timing, "omit wall times");
    converge->add_flag("--condition", o.condition, "estimate condition numbers");
    bool transport_mode = false;
    converge->add_flag("--transport", transport_mode, "sweep the transport problem");
    converge->add_option("--steps", o.steps, "number of time steps (transport)");
    converge->add_option("--lambda", o.lambda, "diffusion coefficient override (transport)");
    converge->add_flag("--diagonalized", o.diagonalized, "diagonalized stage solver (transport)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*mesh)
            return run_mesh(o);
        if (*solve)
            return run_solve(o);
        if (*transport)
            return run_transport(o);
        return run_converge_cmd(o, transport_mode);
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
