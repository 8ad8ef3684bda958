#include "mfforge/study.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <thread>

namespace mfforge {

void ConvergeConfig::validate() const
{
    if (hs.empty() || orders.empty())
        throw ArgumentError("sweep needs at least one h and one order");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!(hs[i] > 0.0))
            throw ArgumentError("h values must be positive");
        if (i > 0 && !(hs[i] < hs[i - 1]))
            throw ArgumentError("h sweep must be strictly decreasing");
    }
    for (int p : orders)
        if (p < 1 || p > 6)
            throw ArgumentError("order must lie in [1,6], got " + std::to_string(p));
    if (jobs < 1)
        throw ArgumentError("jobs must be >= 1");
}

ConvergeConfig default_converge_config(const CaseSpec& c, StudyMode mode, bool full)
{
    ConvergeConfig cfg;
    cfg.case_name = c.name;
    cfg.mode = mode;
    for (int n : full ? c.full_sweep : c.sweep)
        cfg.hs.push_back(c.h_for(n));
    cfg.orders = full ? c.full_orders : c.orders;
    return cfg;
}

double observed_rate(double e0, double e1, double h0, double h1)
{
    return std::log(e0 / e1) / std::log(h0 / h1);
}

namespace {

ConvergeRow run_point(const CaseSpec& c, const ConvergeConfig& cfg, const PreparedBackground& bg, double h, int p)
{
    const auto start = std::chrono::steady_clock::now();
    ConvergeRow row;
    row.case_name = c.name;
    row.mode = cfg.mode == StudyMode::poisson ? "poisson" : "transport";
    row.h = h;
    row.order = p;
    for (const auto& r : bg.relocation) {
        row.relocation_sweeps += r.iterations;
        row.relocation_converged = row.relocation_converged && r.status == RelocationStatus::converged;
    }
    try {
        const GeneratedMesh gm = build_surface_mesh(c.manifold, bg.mesh, p, cfg.exec);
        row.dofs = gm.mesh.num_nodes();
        row.cells = gm.mesh.num_cells();
        row.size_ratio = gm.quality.ratio;
        row.max_angle_tri = gm.quality.max_angle_tri;
        row.max_angle_quad = gm.quality.max_angle_quad;
        if (cfg.mode == StudyMode::poisson) {
            const PoissonResult r = solve_poisson(gm.mesh, c, cfg.condition, cfg.exec);
            row.error = r.l2_error;
            row.mean = r.mean;
            if (r.condition) {
                row.condition = r.condition->value;
                row.condition_approximate = r.condition->approximate;
            }
        }
        else {
            const TransportResult r = solve_transport(gm.mesh, c, cfg.transport, cfg.exec);
            row.error = r.l2_error;
            row.mean = r.integrals.back();
        }
    }
    catch (const std::exception& e) {
        row.failure = e.what();
    }
    row.seconds = bg.seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

} // namespace

std::vector<ConvergeRow> run_converge(const ConvergeConfig& config)
{
    config.validate();
    const CaseSpec& c = get_case(config.case_name);
    if (config.mode == StudyMode::transport && !c.transport)
        throw ArgumentError("case '" + c.name + "' has no transport problem");
    if (config.mode == StudyMode::poisson && !c.source)
        throw ArgumentError("case '" + c.name + "' has no stationary problem");

    const std::size_t nh = config.hs.size(), np = config.orders.size();
    std::vector<ConvergeRow> grid(nh * np);
    for (std::size_t i = 0; i < nh; ++i) {
        const double h = config.hs[i];
        PreparedBackground bg;
        try {
            bg = prepare_background(c.manifold, c.lo, c.hi, h, c.nodes, config.relocation, config.exec);
        }
        catch (const std::exception& e) {
            for (std::size_t k = 0; k < np; ++k) {
                ConvergeRow& row = grid[k * nh + i];
                row.case_name = c.name;
                row.mode = config.mode == StudyMode::poisson ? "poisson" : "transport";
                row.h = h;
                row.order = config.orders[k];
                row.failure = e.what();
            }
            continue;
        }
        if (config.jobs == 1) {
            for (std::size_t k = 0; k < np; ++k)
                grid[k * nh + i] = run_point(c, config, bg, h, config.orders[k]);
            continue;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (int w = 0; w < std::min<int>(config.jobs, static_cast<int>(np)); ++w)
            workers.emplace_back([&] {
                for (std::size_t k = next++; k < np; k = next++)
                    grid[k * nh + i] = run_point(c, config, bg, h, config.orders[k]);
            });
        for (auto& t : workers)
            t.join();
    }
    for (std::size_t k = 0; k < np; ++k)
        for (std::size_t i = 1; i < nh; ++i) {
            const ConvergeRow& a = grid[k * nh + i - 1];
            ConvergeRow& b = grid[k * nh + i];
            if (a.failure.empty() && b.failure.empty() && a.error > 0.0 && b.error > 0.0)
                b.rate = observed_rate(a.error, b.error, a.h, b.h);
        }
    return grid;
}

void write_converge_csv(std::ostream& out, std::span<const ConvergeRow> rows, bool timing)
{
    out << "case,mode,h,p,dofs,cells,l2_error,rate,condition,condition_approximate,size_ratio,max_angle_tri,"
           "max_angle_quad,integral,relocation_sweeps,relocation_converged";
    if (timing)
        out << ",seconds";
    out << ",failure\n";
    auto num = [&](double v) {
        if (std::isnan(v))
            out << "";
        else
            out << std::setprecision(10) << v;
    };
    for (const auto& r : rows) {
        out << r.case_name << ',' << r.mode << ',';
        num(r.h);
        out << ',' << r.order << ',' << r.dofs << ',' << r.cells << ',';
        num(r.error);
        out << ',';
        num(r.rate);
        out << ',';
        num(r.condition);
        out << ',' << (r.condition_approximate ? 1 : 0) << ',';
        num(r.size_ratio);
        out << ',';
        num(r.max_angle_tri);
        out << ',';
        num(r.max_angle_quad);
        out << ',';
        num(r.mean);
        out << ',' << r.relocation_sweeps << ',' << (r.relocation_converged ? 1 : 0);
        if (timing) {
            out << ',';
            num(r.seconds);
        }
        std::string f = r.failure;
        for (char& ch : f)
            if (ch == ',' || ch == '\n')
                ch = ';';
        out << ',' << f << '\n';
    }
}

} // namespace mfforge
