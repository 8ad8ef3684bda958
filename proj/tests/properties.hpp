#pragma once

// Randomized invariants of the mesh generator and the discretization.
// Shared by the property test driver and the acceptance runner.

#include "mfforge/pipeline.hpp"
#include "mfforge/quadrature.hpp"
#include "mfforge/reference_element.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>

namespace mfforge::props {

struct Outcome {
    std::string name;
    double worst = 0.0;
    double bound = 0.0;
    int samples = 0;
    std::string detail;

    bool pass() const { return samples > 0 && worst <= bound; }
};

struct Sample {
    std::string case_name;
    double h;
    int p;
};

inline std::vector<Sample> mesh_samples(std::mt19937& rng, int count)
{
    // desk-sized meshes only; 3D cases at coarse spacing
    const std::vector<std::pair<std::string, std::pair<double, double>>> pool{
        {"circle", {0.01, 0.4}},          {"flower", {0.005, 0.04}},
        {"sline", {0.01, 0.15}},          {"sphere", {0.1, 0.45}},
        {"quarter-cylinder", {0.1, 0.45}}, {"hyperbolic-paraboloid", {0.06, 0.3}},
    };
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1), order(1, 6);
    std::vector<Sample> out;
    for (int i = 0; i < count; ++i) {
        const auto& [name, range] = pool[pick(rng)];
        // log-uniform spacing
        std::uniform_real_distribution<double> lh(std::log(range.first), std::log(range.second));
        const double h = std::exp(lh(rng));
        const bool three_d = get_case(name).dim() == 3;
        out.push_back({name, h, three_d ? std::min(order(rng), 4) : order(rng)});
    }
    return out;
}

inline std::string where(const Sample& s)
{
    return s.case_name + " h=" + std::to_string(s.h) + " p=" + std::to_string(s.p);
}

inline void record(Outcome& o, double value, const std::string& at)
{
    ++o.samples;
    if (value >= o.worst) {
        o.worst = value;
        o.detail = at;
    }
}

/// Copies of a node produced by different elements coincide, and the
/// unified mesh has no conflicting shared edges.
inline Outcome c0_coincidence(const std::vector<Sample>& samples)
{
    Outcome o{"C0 node coincidence", 0.0, 1e-14};
    for (const auto& s : samples) {
        const auto& c = get_case(s.case_name);
        const auto bg = prepare_background(c.manifold, c.lo, c.hi, s.h, c.nodes, {});
        const auto tol = Tolerances::for_h(bg.mesh.h);
        auto elems = reconstruct(bg.mesh, c.manifold.master, s.p, tol).elements;
        elems = restrict_elements(std::move(elems), c.manifold.slaves, tol);
        std::map<NodeKey, Vec3> first;
        double worst = 0.0;
        for (const auto& e : elems)
            for (std::size_t k = 0; k < e.nodes.size(); ++k) {
                auto [it, fresh] = first.emplace(e.node_keys[k], e.nodes[k]);
                if (!fresh)
                    worst = std::max(worst, (it->second - e.nodes[k]).norm());
            }
        const auto mesh = unify_nodes(elems, c.dim(), s.p);
        const auto census = edge_census(mesh);
        if (census.mismatched > 0 || census.non_manifold > 0)
            worst = std::max(worst, 1.0);
        record(o, worst, where(s));
    }
    return o;
}

/// Reconstructed element nodes on the master zero set, slave-tagged
/// boundary nodes of the final mesh on their slave; in units of tol_surface.
inline Outcome on_surface(const std::vector<Sample>& samples)
{
    Outcome o{"on-surface residual / tol_surface", 0.0, 1.0};
    for (const auto& s : samples) {
        const auto& c = get_case(s.case_name);
        const auto bg = prepare_background(c.manifold, c.lo, c.hi, s.h, c.nodes, {});
        const auto tol = Tolerances::for_h(bg.mesh.h);
        auto elems = reconstruct(bg.mesh, c.manifold.master, s.p, tol).elements;
        double worst = 0.0;
        for (const auto& e : elems)
            for (const Vec3& x : e.nodes)
                worst = std::max(worst, std::abs(c.manifold.master(x)) / tol.surface);
        elems = restrict_elements(std::move(elems), c.manifold.slaves, tol);
        const auto m = unify_nodes(elems, c.dim(), s.p);
        for (const auto& slave : c.manifold.slaves) {
            const std::array<int, 1> marker{slave.id};
            for (int n : m.boundary_nodes(marker))
                worst = std::max(worst, std::abs(slave(m.nodes[n])) / tol.surface);
        }
        record(o, worst, where(s));
    }
    return o;
}

inline Outcome partition_of_unity(std::mt19937& rng, int points)
{
    Outcome o{"partition of unity", 0.0, 1e-12};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> order(1, 6), shape(0, 2);
    for (int i = 0; i < points; ++i) {
        const Shape s = static_cast<Shape>(shape(rng));
        const int p = order(rng);
        Vec2 r(u(rng), s == Shape::line ? 0.0 : u(rng));
        if (s == Shape::tri && r.sum() > 1.0)
            r = Vec2(1.0 - r[0], 1.0 - r[1]);
        const auto& ref = reference_element(s, p);
        std::vector<double> N(ref.size());
        std::vector<Vec2> dN(ref.size());
        ref.eval_grad(r, N, dN);
        double sum = 0.0;
        for (double v : N)
            sum += v;
        record(o, std::abs(sum - 1.0), std::string(shape_name(s)) + " p=" + std::to_string(p));
    }
    return o;
}

/// |K 1|_inf / max |K_ij|
inline Outcome stiffness_row_sum(const std::vector<Sample>& samples)
{
    Outcome o{"stiffness row sum (relative)", 0.0, 1e-10};
    for (const auto& s : samples) {
        const auto& c = get_case(s.case_name);
        const auto m = generate_mesh(c, s.h, s.p).surface.mesh;
        const SparseMatrix K = assemble_stiffness(m);
        double kmax = 0.0;
        for (int j = 0; j < K.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(K, j); it; ++it)
                kmax = std::max(kmax, std::abs(it.value()));
        const Vector row = K * Vector::Ones(K.rows());
        record(o, row.cwiseAbs().maxCoeff() / kmax, where(s));
    }
    return o;
}

/// |int u_h| / (|Gamma| max|u_h|) after the bordered solve.
inline Outcome zero_mean(std::mt19937& rng, int count)
{
    Outcome o{"zero-mean residual", 0.0, 1e-10};
    const std::vector<std::pair<std::string, double>> pool{{"circle", 0.05}, {"flower", 0.02}, {"sphere", 0.3}};
    std::uniform_int_distribution<int> pick(0, 2), order(1, 4);
    std::uniform_real_distribution<double> scale(0.7, 1.4);
    for (int i = 0; i < count; ++i) {
        const auto& [name, h0] = pool[pick(rng)];
        const Sample s{name, h0 * scale(rng), order(rng)};
        const auto& c = get_case(name);
        const auto m = generate_mesh(c, s.h, s.p).surface.mesh;
        const auto r = solve_poisson(m, c);
        record(o, std::abs(r.mean) / (total_measure(m) * r.u.cwiseAbs().maxCoeff()), where(s));
    }
    return o;
}

/// Observed rate of |area - 4 pi| on the two finest pairs, minus p+1;
/// passes when non-negative.
inline Outcome sphere_area(const std::vector<double>& hs)
{
    Outcome o{"sphere area rate deficit (p+1 - rate)", 0.0, 0.0};
    const auto& c = get_case("sphere");
    for (int p = 1; p <= 3; ++p) {
        std::vector<double> err;
        for (double h : hs)
            err.push_back(std::abs(total_measure(generate_mesh(c, h, p).surface.mesh) - 4.0 * M_PI));
        std::string rates;
        double deficit = 0.0;
        for (std::size_t i = hs.size() - 2; i < hs.size(); ++i) {
            const double rate = std::log(err[i - 1] / err[i]) / std::log(hs[i - 1] / hs[i]);
            rates += " " + std::to_string(rate);
            deficit = std::max(deficit, (p + 1) - rate);
        }
        record(o, deficit, "p=" + std::to_string(p) + " rates" + rates);
    }
    return o;
}

inline Outcome quadrature_exactness(std::mt19937& rng, int trials)
{
    Outcome o{"quadrature exactness", 0.0, 1e-13};
    std::uniform_int_distribution<int> deg(0, 14), shape(0, 2);
    for (int i = 0; i < trials; ++i) {
        const Shape s = static_cast<Shape>(shape(rng));
        const int d = deg(rng);
        const auto rule = make_rule(s, d);
        std::uniform_int_distribution<int> ea(0, d);
        const int a = ea(rng);
        const int b = s == Shape::line ? 0 : std::uniform_int_distribution<int>(0, d - a)(rng);
        double q = 0.0;
        for (int k = 0; k < rule.size(); ++k)
            q += rule.weights[k] * std::pow(rule.points[k][0], a) * std::pow(rule.points[k][1], b);
        // exact monomial integrals; the triangle rule weights sum to 1/2
        double exact = 0.0;
        if (s == Shape::line)
            exact = 1.0 / (a + 1);
        else if (s == Shape::quad)
            exact = 1.0 / ((a + 1) * (b + 1));
        else
            exact = std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
        record(o, std::abs(q - exact),
               std::string(shape_name(s)) + " degree " + std::to_string(d) + " x^" + std::to_string(a) + " y^" +
                   std::to_string(b));
    }
    return o;
}

inline std::vector<Outcome> run_all(unsigned seed, int mesh_count)
{
    std::mt19937 rng(seed);
    const auto meshes = mesh_samples(rng, mesh_count);
    std::vector<Outcome> out;
    out.push_back(c0_coincidence(meshes));
    out.push_back(on_surface(meshes));
    out.push_back(partition_of_unity(rng, 2000));
    out.push_back(stiffness_row_sum(meshes));
    out.push_back(zero_mean(rng, 6));
    out.push_back(sphere_area({0.5, 0.25, 0.125}));
    out.push_back(quadrature_exactness(rng, 500));
    return out;
}

} // namespace mfforge::props
