// Acceptance runner: one PASS/FAIL line per criterion, indented detail lines.
// Usage: acceptance [--criterion N]
#include "properties.hpp"

#include "mfforge/study.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace mfforge;

namespace {

struct Verdict {
    bool pass = true;
    std::string summary;
    std::vector<std::string> details;

    void fail_if(bool bad, const std::string& why)
    {
        if (bad) {
            pass = false;
            details.push_back("violated: " + why);
        }
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Sweep {
    std::vector<ConvergeRow> rows;
    double seconds = 0.0;
};

Sweep sweep(const std::string& name, StudyMode mode, bool condition = false, int steps = 0)
{
    auto cfg = default_converge_config(get_case(name), mode);
    cfg.condition = condition;
    cfg.transport.n_steps = steps;
    const auto t0 = std::chrono::steady_clock::now();
    Sweep s;
    s.rows = run_converge(cfg);
    s.seconds = elapsed(t0);
    return s;
}

std::map<int, std::vector<const ConvergeRow*>> by_order(const std::vector<ConvergeRow>& rows)
{
    std::map<int, std::vector<const ConvergeRow*>> out;
    for (const auto& r : rows)
        out[r.order].push_back(&r);
    return out;
}

// Rates of the two finest pairs of each order must lie in [target(p) - below, target(p) + above].
void check_rates(Verdict& v, const std::vector<ConvergeRow>& rows, const std::function<double(int)>& target,
                 double below, double above)
{
    for (const auto& r : rows)
        v.fail_if(!r.failure.empty(), r.case_name + " p=" + std::to_string(r.order) + " h=" + fmt("%g", r.h) +
                                          " failed: " + r.failure);
    for (const auto& [p, list] : by_order(rows)) {
        std::ostringstream line;
        line << "p=" << p << " errors";
        for (const auto* r : list)
            line << ' ' << fmt("%.3e", r->error);
        line << " | rates";
        for (const auto* r : list)
            if (!std::isnan(r->rate))
                line << ' ' << fmt("%.2f", r->rate);
        const double t = target(p);
        line << " | window [" << fmt("%.2f", t - below) << ", " << fmt("%.2f", t + above) << "]";
        v.details.push_back(line.str());
        if (list.size() < 3) {
            v.fail_if(true, "p=" + std::to_string(p) + " has fewer than two rates");
            continue;
        }
        for (std::size_t i = list.size() - 2; i < list.size(); ++i) {
            const double rate = list[i]->rate;
            v.fail_if(!(rate >= t - below && rate <= t + above),
                      "p=" + std::to_string(p) + " rate " + fmt("%.2f", rate) + " at h=" + fmt("%g", list[i]->h));
        }
    }
}

double optimal(int p) { return p + 1.0; }

Verdict circle_poisson()
{
    Verdict v;
    const auto s = sweep("circle", StudyMode::poisson);
    check_rates(v, s.rows, optimal, 0.2, 0.5);
    v.fail_if(s.seconds >= 120.0, "runtime " + fmt("%.1f", s.seconds) + " s");
    v.summary = "circle p=1..6, 7 levels, " + fmt("%.1f", s.seconds) + " s";
    return v;
}

// least-squares slope of log(cond) against log(1/h)
double ls_slope(const std::vector<const ConvergeRow*>& rows)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rows.size());
    for (const auto* r : rows) {
        const double x = std::log(1.0 / r->h), y = std::log(r->condition);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Verdict circle_condition()
{
    Verdict v;
    const auto s = sweep("circle", StudyMode::poisson, true);
    for (const auto& [p, list] : by_order(s.rows)) {
        const double slope = ls_slope(list);
        std::string line = "p=" + std::to_string(p) + " cond";
        for (const auto* r : list)
            line += " " + fmt("%.3e", r->condition) + (r->condition_approximate ? "~" : "");
        v.details.push_back(line + " | slope " + fmt("%.3f", slope));
        v.fail_if(std::abs(slope - 2.0) > 0.3, "p=" + std::to_string(p) + " slope " + fmt("%.3f", slope));
    }
    v.summary = "condition slope vs 1/h, target 2.0 +- 0.3";
    return v;
}

Verdict circle_quality()
{
    Verdict v;
    const auto& c = get_case("circle");
    double worst = 0.0;
    for (int n : c.sweep) {
        const auto run = generate_mesh(c, c.h_for(n), 1);
        const double ratio = run.surface.quality.ratio;
        worst = std::max(worst, ratio);
        v.details.push_back("n=" + std::to_string(n) + " h_max/h_min " + fmt("%.3f", ratio));
        v.fail_if(!(ratio < 4.0), "n=" + std::to_string(n) + " ratio " + fmt("%.3f", ratio));
    }
    v.summary = "worst element length ratio " + fmt("%.3f", worst) + " (bound 4)";
    return v;
}

Verdict flower_poisson()
{
    Verdict v;
    const auto s = sweep("flower", StudyMode::poisson);
    check_rates(v, s.rows, optimal, 0.25, 0.5);
    v.summary = "flower p=1..4, " + fmt("%.1f", s.seconds) + " s";
    return v;
}

Verdict sline_poisson()
{
    Verdict v;
    const auto s = sweep("sline", StudyMode::poisson);
    check_rates(v, s.rows, optimal, 0.25, 0.5);
    const auto& c = get_case("sline");
    double worst = 0.0;
    for (int n : c.sweep)
        for (int p : c.orders) {
            const auto run = generate_mesh(c, c.h_for(n), p);
            const auto& m = run.surface.mesh;
            for (const auto& slave : c.manifold.slaves) {
                const std::array<int, 1> marker{slave.id};
                const auto nodes = m.boundary_nodes(marker);
                v.fail_if(nodes.empty(), "no boundary node on slave " + std::to_string(slave.id));
                for (int node : nodes)
                    worst = std::max(worst, std::abs(slave(m.nodes[node])) / run.surface.tol.surface);
            }
        }
    v.details.push_back("max |psi| at slave boundary nodes / tol_surface " + fmt("%.3e", worst));
    v.fail_if(worst > 1.0, "boundary node off its slave");
    v.summary = "S-curve p=1..4 with two slaves, " + fmt("%.1f", s.seconds) + " s";
    return v;
}

void check_angles(Verdict& v, const std::vector<ConvergeRow>& rows)
{
    double tri = 0.0, quad = 0.0;
    for (const auto& r : rows) {
        tri = std::max(tri, r.max_angle_tri);
        quad = std::max(quad, r.max_angle_quad);
    }
    v.details.push_back("max inner angle: tri " + fmt("%.1f", tri) + ", quad " + fmt("%.1f", quad));
    v.fail_if(!(tri < 110.0), "triangle angle " + fmt("%.1f", tri));
    v.fail_if(!(quad < 140.0), "quadrilateral angle " + fmt("%.1f", quad));
}

Verdict sphere_poisson()
{
    Verdict v;
    const auto s = sweep("sphere", StudyMode::poisson);
    check_rates(v, s.rows, optimal, 0.3, 0.5);
    check_angles(v, s.rows);
    v.fail_if(s.seconds >= 1200.0, "runtime " + fmt("%.1f", s.seconds) + " s");
    v.summary = "sphere p=1..4, " + fmt("%.1f", s.seconds) + " s";
    return v;
}

Verdict cylinder_poisson()
{
    Verdict v;
    const auto s = sweep("quarter-cylinder", StudyMode::poisson);
    check_rates(v, s.rows, optimal, 0.3, 0.5);
    double worst = 0.0;
    for (const auto& r : s.rows)
        worst = std::max(worst, r.size_ratio);
    v.details.push_back("max A_max/A_min " + fmt("%.2f", worst));
    v.fail_if(!(worst < 100.0), "area ratio " + fmt("%.2f", worst));
    v.summary = "quarter cylinder p=1..4, " + fmt("%.1f", s.seconds) + " s";
    return v;
}

Verdict saddle_poisson()
{
    Verdict v;
    const auto s = sweep("hyperbolic-paraboloid", StudyMode::poisson);
    check_rates(v, s.rows, optimal, 0.3, 0.5);
    v.summary = "hyperbolic paraboloid, four plane slaves, p=1..3, " + fmt("%.1f", s.seconds) + " s";
    return v;
}

Verdict advection()
{
    Verdict v;
    // odd orders keep p+1, even orders drop to p
    auto target = [](int p) { return p % 2 ? p + 1.0 : double(p); };
    const auto circle = sweep("advect-circle", StudyMode::transport);
    v.details.push_back("advect-circle, 4096 steps, " + fmt("%.1f", circle.seconds) + " s");
    check_rates(v, circle.rows, target, 0.3, 0.3);
    // the sphere at 512 steps: the time error is far below the spatial error
    const auto sphere = sweep("advect-sphere", StudyMode::transport, false, 512);
    v.details.push_back("advect-sphere, 512 steps, " + fmt("%.1f", sphere.seconds) + " s");
    check_rates(v, sphere.rows, target, 0.3, 0.3);
    v.summary = "pure advection rate pattern, circle p=1..4 and sphere p=1..3";
    return v;
}

Verdict irk_order()
{
    Verdict v;
    TransientProblem prob;
    prob.M = SparseMatrix(1, 1);
    prob.M.insert(0, 0) = 1.0;
    prob.K = prob.M;
    prob.C = SparseMatrix(1, 1);
    prob.lambda = 1.0;
    prob.u0 = Vector::Ones(1);
    std::vector<double> finals;
    for (int n = 1; n <= 64; n *= 2) {
        prob.n_steps = n;
        finals.push_back(integrate(prob).states.back()[0]);
    }
    // self-convergence: differences of successive halvings
    std::string line = "differences";
    int rates = 0;
    for (std::size_t k = 0; k + 2 < finals.size(); ++k) {
        const double d0 = std::abs(finals[k] - finals[k + 1]), d1 = std::abs(finals[k + 1] - finals[k + 2]);
        line += " " + fmt("%.2e", d0);
        if (d1 < 1e-13)
            break;
        const double rate = std::log2(d0 / d1);
        ++rates;
        line += " (" + fmt("%.2f", rate) + ")";
        v.fail_if(rate < 5.8, "self-convergence rate " + fmt("%.2f", rate));
    }
    v.details.push_back(line);
    v.fail_if(rates < 2, "fewer than two rates above the roundoff floor");
    v.details.push_back("error vs exp(-1) at 64 steps " + fmt("%.2e", std::abs(finals.back() - std::exp(-1.0))));

    // tableau in sqrt(15) form: rational part, coefficient of sqrt(15)
    const double A[3][3][2] = {{{5. / 36, 0}, {2. / 9, -1. / 15}, {5. / 36, -1. / 30}},
                               {{5. / 36, 1. / 24}, {2. / 9, 0}, {5. / 36, -1. / 24}},
                               {{5. / 36, 1. / 30}, {2. / 9, 1. / 15}, {5. / 36, 0}}};
    const double b[3][2] = {{5. / 18, 0}, {4. / 9, 0}, {5. / 18, 0}};
    const double c[3][2] = {{0.5, -0.1}, {0.5, 0}, {0.5, 0.1}};
    const auto t = gauss_legendre_tableau();
    int mismatches = 0;
    auto same = [&](const Surd15& s, const double (&e)[2]) { mismatches += s.rational != e[0] || s.root15 != e[1]; };
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j)
            same(t.A[i][j], A[i][j]);
        same(t.b[i], b[i]);
        same(t.c[i], c[i]);
    }
    v.details.push_back("tableau entries differing from the sqrt(15) form: " + std::to_string(mismatches));
    v.fail_if(mismatches > 0, "tableau mismatch");
    v.summary = "3-stage Gauss IRK, u' = -u";
    return v;
}

Verdict properties()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& o : props::run_all(20240607u, 40)) {
        v.details.push_back(std::string(o.pass() ? "ok   " : "FAIL ") + o.name + ": worst " + fmt("%.3e", o.worst) +
                            " (bound " + fmt("%.1e", o.bound) + ", " + std::to_string(o.samples) + " samples) at " +
                            o.detail);
        v.fail_if(!o.pass(), o.name);
    }
    v.summary = "property suites, " + fmt("%.1f", elapsed(t0)) + " s";
    return v;
}

bool monotone_non_increasing(const std::vector<double>& v, double slack)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + slack)
            return false;
    return true;
}

Verdict transport_showcases()
{
    Verdict v;
    for (const char* name : {"transport-sline", "transport-hp"}) {
        const auto& c = get_case(name);
        try {
            const auto run = generate_mesh(c, c.h_for(c.sweep.front()), c.orders.front());
            const auto r = solve_transport(run.surface.mesh, c);
            bool finite = true;
            for (const auto& s : r.trajectory.states)
                finite = finite && s.allFinite();
            v.details.push_back(std::string(name) + ": " + std::to_string(r.dofs) + " dofs, int u " +
                                fmt("%.4e", r.integrals.front()) + " -> " + fmt("%.4e", r.integrals.back()) + ", " +
                                fmt("%.1f", r.seconds) + " s");
            v.fail_if(!finite, std::string(name) + " produced non-finite values");
        }
        catch (const std::exception& e) {
            v.fail_if(true, std::string(name) + ": " + e.what());
        }
    }
    // closed-manifold variants: int u is invariant for both lambda (divergence-free tangential c),
    // what diffusion drives down is the L2 norm
    struct Closed {
        const char* name;
        int n;
        int p;
        int steps;
    };
    for (const Closed& k : {Closed{"advect-circle", 32, 2, 1024}, Closed{"advect-sphere", 4, 2, 256}}) {
        const auto& c = get_case(k.name);
        const auto run = generate_mesh(c, c.h_for(k.n), k.p);
        for (double lambda : {0.0, 0.1}) {
            TransportOptions o;
            o.n_steps = k.steps;
            o.lambda = lambda;
            const auto r = solve_transport(run.surface.mesh, c, o);
            const double i0 = r.integrals.front();
            double drift = 0.0;
            for (double x : r.integrals)
                drift = std::max(drift, std::abs(x - i0) / std::abs(i0));
            const bool l2_down = monotone_non_increasing(r.l2_norms, 1e-12 * r.l2_norms.front());
            v.details.push_back(std::string(k.name) + " lambda=" + fmt("%g", lambda) + ": max relative drift of int u " +
                                fmt("%.2e", drift) + ", L2 norm non-increasing " + (l2_down ? "yes" : "no"));
            v.fail_if(drift > 0.01, std::string(k.name) + " does not conserve int u");
            if (lambda > 0.0)
                v.fail_if(!l2_down, std::string(k.name) + " L2 norm increases under diffusion");
        }
    }
    v.summary = "transport showcases and conservation diagnostics";
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Verdict()>> checks{circle_poisson, circle_condition, circle_quality,
                                                       flower_poisson, sline_poisson,    sphere_poisson,
                                                       cylinder_poisson, saddle_poisson, advection,
                                                       irk_order,      properties,       transport_showcases};
    int failed = 0;
    for (int k = 1; k <= 12; ++k) {
        if (only && k != only)
            continue;
        Verdict v;
        try {
            v = checks[k - 1]();
        }
        catch (const std::exception& e) {
            v.pass = false;
            v.summary = std::string("error: ") + e.what();
        }
        std::cout << "criterion " << k << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.summary << '\n';
        for (const auto& d : v.details)
            std::cout << "    " << d << '\n';
        std::cout.flush();
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
