#include "mfforge/cases.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mfforge;

namespace {

std::vector<Param> chart_samples(const Chart& ch, int n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::vector<Param> out;
    for (int i = 0; i < n; ++i) {
        Param s;
        for (int a = 0; a < 2; ++a) {
            // keep away from the chart border and from coordinate singularities
            const double lo = ch.lo[a], hi = ch.hi[a];
            std::uniform_real_distribution<double> u(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
            s[a] = a < ch.dim ? u(rng) : 0.0;
        }
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST(Cases, Registry)
{
    const auto names = case_names();
    EXPECT_EQ(names.size(), 10u);
    for (const auto& n : names) {
        const auto& c = get_case(n);
        EXPECT_EQ(c.name, n);
        EXPECT_FALSE(c.sweep.empty());
        EXPECT_FALSE(c.orders.empty());
        EXPECT_TRUE(c.source || c.transport) << n;
        EXPECT_NO_THROW(c.manifold.validate());
    }
    EXPECT_THROW(get_case("torus"), LookupError);
}

TEST(Cases, GradientsConsistent)
{
    for (const auto& n : case_names()) {
        const auto& c = get_case(n);
        std::mt19937 rng(3);
        std::vector<Vec3> pts;
        for (int i = 0; i < 100; ++i) {
            Vec3 x;
            for (int a = 0; a < 3; ++a)
                x[a] = a < c.dim() ? std::uniform_real_distribution<double>(c.lo[a], c.hi[a])(rng) : 0.0;
            // gradients are singular on the axis of rotational fields
            if (x.head<2>().norm() > 0.05)
                pts.push_back(x);
        }
        EXPECT_LT(gradient_consistency_error(c.manifold.master, pts, 1e-6, c.dim()), 1e-6) << n;
        for (const auto& s : c.manifold.slaves)
            EXPECT_LT(gradient_consistency_error(s, pts, 1e-6, c.dim()), 1e-6) << n;
    }
}

TEST(Cases, ChartLiesOnZeroSet)
{
    for (const auto& n : case_names()) {
        const auto& c = get_case(n);
        if (!c.chart)
            continue;
        for (const Param& s : chart_samples(*c.chart, 50, 9))
            EXPECT_NEAR(c.manifold.master(c.chart->map(s)), 0.0, 1e-12) << n;
    }
}

// the registered sources against an independent finite-difference operator
TEST(Cases, SourcesMatchDifferenceOperator)
{
    int checked = 0;
    for (const auto& n : case_names()) {
        const auto& c = get_case(n);
        if (!c.chart || !c.source || !c.exact)
            continue;
        const auto& ch = *c.chart;
        LocalFunction u = [&](const Param& s) { return c.exact(ch.map(s)); };
        double scale = 0.0;
        std::vector<std::pair<double, double>> pairs;
        for (const Param& s : chart_samples(ch, 40, 17)) {
            const double f = c.source(ch.map(s));
            pairs.emplace_back(f, apply_lb_local(ch.dim, ch.map, u, s, 1e-3));
            scale = std::max(scale, std::abs(f));
        }
        for (auto [f, g] : pairs)
            EXPECT_NEAR(f, g, 1e-6 * std::max(1.0, scale)) << n;
        ++checked;
    }
    EXPECT_GE(checked, 6);
}

TEST(Cases, JetFormulaOnFlatPlane)
{
    // u = x^2 y on the plane z = 0: -Delta u = -2 y
    LocalJet j;
    j.dim = 2;
    j.dx = {Vec3::UnitX(), Vec3::UnitY()};
    const double x = 0.3, y = -0.4;
    j.du = Param(2 * x * y, x * x);
    j.ddu << 2 * y, 2 * x, 2 * x, 0.0;
    EXPECT_NEAR(laplace_beltrami_source(j), -2 * y, 1e-15);
}

TEST(Cases, DifferenceOperatorOnSphere)
{
    // u = z is an eigenfunction on the unit sphere: -Delta u = 2 u
    Parametrization x = [](const Param& s) {
        return Vec3(std::sin(s[0]) * std::cos(s[1]), std::sin(s[0]) * std::sin(s[1]), std::cos(s[0]));
    };
    LocalFunction u = [&](const Param& s) { return x(s).z(); };
    const Param s(1.1, 0.4);
    EXPECT_NEAR(apply_lb_local(2, x, u, s, 1e-3), 2.0 * std::cos(1.1), 1e-8);
    EXPECT_THROW(apply_lb_local(3, x, u, s), ArgumentError);
    EXPECT_THROW(apply_lb_local(2, x, u, s, 0.0), ArgumentError);
}

TEST(Cases, TransportInitialMatchesExact)
{
    for (const auto& n : case_names()) {
        const auto& c = get_case(n);
        if (!c.transport || !c.transport->exact || !c.chart)
            continue;
        for (const Param& s : chart_samples(*c.chart, 20, 1)) {
            const Vec3 x = c.chart->map(s);
            EXPECT_NEAR(c.transport->exact(x, 0.0), c.transport->initial(x), 1e-14) << n;
            // tangential velocity
            EXPECT_NEAR(c.transport->velocity(x).dot(c.manifold.master.grad(x)), 0.0, 1e-12) << n;
        }
    }
}
