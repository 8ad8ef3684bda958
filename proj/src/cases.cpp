#include "mfforge/cases.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace mfforge {

namespace {

constexpr double pi = std::numbers::pi;

struct Metric {
    Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d ginv = Eigen::Matrix2d::Identity();
    double det = 1.0;
};

Metric metric(int dim, const std::array<Vec3, 2>& dx)
{
    Metric m;
    if (dim == 1) {
        m.g(0, 0) = dx[0].squaredNorm();
        m.det = m.g(0, 0);
        if (!(m.det > 1e-24))
            throw InvalidDataError("near-singular metric");
        m.ginv(0, 0) = 1.0 / m.det;
        return m;
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m.g(i, j) = dx[i].dot(dx[j]);
    m.det = m.g.determinant();
    if (!(m.det > 1e-24 * m.g.squaredNorm()))
        throw InvalidDataError("near-singular metric");
    m.ginv = m.g.inverse();
    return m;
}

} // namespace

double laplace_beltrami_source(const LocalJet& jet)
{
    const int k = jet.dim;
    const Metric m = metric(k, jet.dx);
    double lap = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double christoffel_term = 0.0;
            for (int a = 0; a < k; ++a) {
                double gamma = 0.0;
                for (int l = 0; l < k; ++l)
                    gamma += m.ginv(a, l) * jet.ddx[i][j].dot(jet.dx[l]);
                christoffel_term += gamma * jet.du[a];
            }
            lap += m.ginv(i, j) * (jet.ddu(i, j) - christoffel_term);
        }
    return -lap;
}

double apply_lb_local(int dim, const Parametrization& x, const LocalFunction& u, const Param& xi, double step)
{
    if (dim != 1 && dim != 2)
        throw ArgumentError("manifold dimension must be 1 or 2");
    if (!(step > 0.0))
        throw ArgumentError("difference step must be positive");
    auto d4 = [step](auto&& f, const Param& at, int axis) {
        Param e = Param::Zero();
        e[axis] = step;
        return (-f(Param(at + 2.0 * e)) + 8.0 * f(Param(at + e)) - 8.0 * f(Param(at - e)) + f(Param(at - 2.0 * e)))
               / (12.0 * step);
    };
    // flux F^i = sqrt(g) g^ij du/dxi_j
    auto flux = [&](const Param& at, int i) {
        std::array<Vec3, 2> dx{Vec3::Zero(), Vec3::Zero()};
        Param du = Param::Zero();
        for (int j = 0; j < dim; ++j) {
            dx[j] = d4(x, at, j);
            du[j] = d4(u, at, j);
        }
        const Metric m = metric(dim, dx);
        double F = 0.0;
        for (int j = 0; j < dim; ++j)
            F += m.ginv(i, j) * du[j];
        return std::sqrt(m.det) * F;
    };
    double div = 0.0;
    for (int i = 0; i < dim; ++i)
        div += d4([&](const Param& at) { return flux(at, i); }, xi, i);
    std::array<Vec3, 2> dx{Vec3::Zero(), Vec3::Zero()};
    for (int j = 0; j < dim; ++j)
        dx[j] = d4(x, xi, j);
    return -div / std::sqrt(metric(dim, dx).det);
}

namespace {

double polar_angle(const Vec3& x) { return std::atan2(x.y(), x.x()); }

double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * pi);
    return a <= -pi ? a + 2.0 * pi : a;
}

Vec3 planar_tangent(const Vec3& x)
{
    const double r = std::hypot(x.x(), x.y());
    return r > 0.0 ? Vec3(-x.y() / r, x.x() / r, 0.0) : Vec3::Zero();
}

LevelSetField master(ScalarField value, VectorField gradient)
{
    LevelSetField f;
    f.value = std::move(value);
    f.gradient = std::move(gradient);
    f.role = LevelSetRole::master;
    return f;
}

// ---- circle ---------------------------------------------------------------

void add_circle_geometry(CaseSpec& c)
{
    c.manifold.ambient_dim = 2;
    c.manifold.master = sphere_field(Vec3::Zero(), 1.0);
    c.lo = Vec3(-1.5, -1.5, 0.0);
    c.hi = Vec3(1.5, 1.5, 0.0);
    c.length_scale = 1.0;
    c.closed = true;
    c.chart = Chart{1, [](const Param& s) { return Vec3(std::cos(s[0]), std::sin(s[0]), 0.0); }, Param(-pi, 0.0),
                    Param(pi, 0.0)};
}

CaseSpec circle_case()
{
    CaseSpec c;
    c.name = "circle";
    c.description = "Poisson on the unit circle, zero mean";
    add_circle_geometry(c);
    c.sweep = {4, 8, 16, 32, 64, 128, 256};
    c.full_sweep = {4, 8, 16, 32, 64, 128, 256, 512};
    c.orders = {1, 2, 3, 4, 5, 6};
    c.full_orders = c.orders;
    c.exact = [](const Vec3& x) { return 12.0 * std::sin(3.0 * polar_angle(x)); };
    c.source = [](const Vec3& x) { return 108.0 / x.head<2>().squaredNorm() * std::sin(3.0 * polar_angle(x)); };
    c.bc = BoundaryCondition::zero_mean;
    return c;
}

CaseSpec advect_circle_case()
{
    CaseSpec c;
    c.name = "advect-circle";
    c.description = "pure advection around the unit circle, |c| = 5";
    add_circle_geometry(c);
    c.sweep = {4, 8, 16, 32, 64, 128};
    c.full_sweep = {4, 8, 16, 32, 64, 128, 256, 512};
    c.orders = {1, 2, 3, 4};
    c.full_orders = {1, 2, 3, 4, 5, 6};
    c.bc = BoundaryCondition::none;
    const double speed = 5.0;
    TransportSpec t;
    t.velocity = [speed](const Vec3& x) -> Vec3 { return speed * planar_tangent(x); };
    t.lambda = 0.0;
    t.initial = [](const Vec3& x) {
        const double a = polar_angle(x);
        return std::exp(-4.0 * a * a);
    };
    t.exact = [speed](const Vec3& x, double time) {
        const double a = wrap_angle(polar_angle(x) - speed * time);
        return std::exp(-4.0 * a * a);
    };
    t.checkpoints = {0.0, 0.2, 1.0};
    c.transport = t;
    return c;
}

// ---- flower ---------------------------------------------------------------

CaseSpec flower_case()
{
    CaseSpec c;
    c.name = "flower";
    c.description = "Poisson on the flower curve r = 0.5 + 0.1 sin 8 theta, zero mean";
    c.manifold.ambient_dim = 2;
    auto R = [](double t) { return 0.5 + 0.1 * std::sin(8.0 * t); };
    auto dR = [](double t) { return 0.8 * std::cos(8.0 * t); };
    auto ddR = [](double t) { return -6.4 * std::sin(8.0 * t); };
    c.manifold.master = master(
        [R](const Vec3& x) { return std::hypot(x.x(), x.y()) - R(polar_angle(x)); },
        [dR](const Vec3& x) -> Vec3 {
            const double r2 = x.x() * x.x() + x.y() * x.y();
            if (r2 == 0.0)
                return Vec3::Zero();
            const double r = std::sqrt(r2);
            const Vec3 grad_theta(-x.y() / r2, x.x() / r2, 0.0);
            return Vec3(x.x() / r, x.y() / r, 0.0) - dR(polar_angle(x)) * grad_theta;
        });
    c.lo = Vec3(-0.75, -0.75, 0.0);
    c.hi = Vec3(0.75, 0.75, 0.0);
    c.length_scale = 0.5;
    c.sweep = {32, 64, 128, 256};
    c.full_sweep = {32, 64, 128, 256, 512, 1024, 2048};
    c.orders = {1, 2, 3, 4};
    c.full_orders = {1, 2, 3, 4, 5, 6};
    c.exact = [](const Vec3& x) { return 12.0 * std::sin(3.0 * polar_angle(x)); };
    c.source = [R, dR, ddR](const Vec3& x) {
        const double t = polar_angle(x);
        const double ct = std::cos(t), st = std::sin(t);
        const Vec3 radial(ct, st, 0.0), normal(-st, ct, 0.0);
        LocalJet j;
        j.dim = 1;
        j.dx[0] = dR(t) * radial + R(t) * normal;
        j.ddx[0][0] = ddR(t) * radial + 2.0 * dR(t) * normal - R(t) * radial;
        j.du[0] = 36.0 * std::cos(3.0 * t);
        j.ddu(0, 0) = -108.0 * std::sin(3.0 * t);
        return laplace_beltrami_source(j);
    };
    c.bc = BoundaryCondition::zero_mean;
    c.closed = true;
    c.chart = Chart{1, [R](const Param& s) { return Vec3(R(s[0]) * std::cos(s[0]), R(s[0]) * std::sin(s[0]), 0.0); },
                    Param(-pi, 0.0), Param(pi, 0.0)};
    return c;
}

// ---- S-shaped line --------------------------------------------------------

struct SCurve {
    // f(x) = x^3/2 + sin(pi s) sin^5(pi s / 2) - 1/4, s = 1 - x
    static std::array<double, 3> eval(double x)
    {
        const double s = 1.0 - x;
        const double A = std::sin(pi * s), dA = -pi * std::cos(pi * s), ddA = -pi * pi * A;
        const double B = std::sin(0.5 * pi * s), dB = -0.5 * pi * std::cos(0.5 * pi * s), ddB = -0.25 * pi * pi * B;
        const double B4 = B * B * B * B, B5 = B4 * B, B3 = B * B * B;
        const double g = A * B5;
        const double dg = dA * B5 + 5.0 * A * B4 * dB;
        const double ddg = ddA * B5 + 10.0 * dA * B4 * dB + 20.0 * A * B3 * dB * dB + 5.0 * A * B4 * ddB;
        return {0.5 * x * x * x + g - 0.25, 1.5 * x * x + dg, 3.0 * x + ddg};
    }
};

void add_sline_geometry(CaseSpec& c)
{
    c.manifold.ambient_dim = 2;
    c.manifold.master = master([](const Vec3& x) { return SCurve::eval(x.x())[0] - x.y(); },
                               [](const Vec3& x) -> Vec3 { return Vec3(SCurve::eval(x.x())[1], -1.0, 0.0); });
    c.manifold.slaves = {plane_field(Vec3(0.0, -0.25, 0.0), Vec3(0.0, -1.0, 0.0), 1),
                         plane_field(Vec3(0.0, 0.25, 0.0), Vec3(0.0, 1.0, 0.0), 2)};
    c.lo = Vec3(-0.25, -0.5, 0.0);
    c.hi = Vec3(1.25, 0.5, 0.0);
    c.length_scale = 1.0;
    c.closed = false;
    c.chart = Chart{1, [](const Param& s) { return Vec3(s[0], SCurve::eval(s[0])[0], 0.0); }, Param(0.0, 0.0),
                    Param(1.0, 0.0)};
}

CaseSpec sline_case()
{
    CaseSpec c;
    c.name = "sline";
    c.description = "Poisson on the S-shaped curve bounded by y = -1/4 and y = 1/4";
    add_sline_geometry(c);
    c.sweep = {8, 16, 32, 64, 128};
    c.full_sweep = {8, 16, 32, 64, 128, 256, 512};
    c.orders = {1, 2, 3, 4};
    c.full_orders = {1, 2, 3, 4, 5, 6};
    c.exact = [](const Vec3& x) { return std::exp(2.0 * x.x()); };
    c.source = [](const Vec3& x) {
        const auto f = SCurve::eval(x.x());
        const double e = std::exp(2.0 * x.x());
        LocalJet j;
        j.dim = 1;
        j.dx[0] = Vec3(1.0, f[1], 0.0);
        j.ddx[0][0] = Vec3(0.0, f[2], 0.0);
        j.du[0] = 2.0 * e;
        j.ddu(0, 0) = 4.0 * e;
        return laplace_beltrami_source(j);
    };
    c.bc = BoundaryCondition::dirichlet;
    return c;
}

CaseSpec transport_sline_case()
{
    CaseSpec c;
    c.name = "transport-sline";
    c.description = "advection-diffusion on the S-shaped curve, inflow u = 1";
    add_sline_geometry(c);
    c.sweep = {64};
    c.full_sweep = {64, 128};
    c.orders = {3};
    c.full_orders = {3};
    c.bc = BoundaryCondition::none;
    TransportSpec t;
    t.velocity = [](const Vec3& x) -> Vec3 {
        const Vec3 d(1.0, SCurve::eval(x.x())[1], 0.0);
        return d.normalized();
    };
    t.lambda = 0.15;
    t.initial = [](const Vec3&) { return 0.0; };
    t.inflow_markers = {1};
    t.inflow_value = [](const Vec3&) { return 1.0; };
    t.checkpoints = {0.0, 0.19, 1.0};
    c.transport = t;
    return c;
}

// ---- quarter cylinder -----------------------------------------------------

CaseSpec quarter_cylinder_case()
{
    CaseSpec c;
    c.name = "quarter-cylinder";
    c.description = "Poisson on a quarter cylinder r = 1, L = 4, u = 0 on the boundary";
    c.manifold.ambient_dim = 3;
    c.manifold.master = master([](const Vec3& x) { return std::hypot(x.x(), x.y()) - 1.0; },
                               [](const Vec3& x) -> Vec3 {
                                   const double r = std::hypot(x.x(), x.y());
                                   return r > 0.0 ? Vec3(x.x() / r, x.y() / r, 0.0) : Vec3::Zero();
                               });
    const double L = 4.0, alpha = 3.0, beta = 1.0 / (1.5 - std::sqrt(2.0));
    c.lo = Vec3(0.0, 0.0, 0.0);
    c.hi = Vec3(1.25, 1.25, L);
    c.length_scale = 1.0;
    c.sweep = {4, 8, 16, 32};
    c.full_sweep = {4, 8, 16, 32, 64, 128};
    c.orders = {1, 2, 3, 4};
    c.full_orders = {1, 2, 3, 4, 5, 6};
    auto g1 = [](double a) { return (1.0 - std::cos(a)) * (1.0 - std::sin(a)); };
    auto g2 = [](double a) { return std::cos(a) + std::sin(a) - 4.0 * std::sin(a) * std::cos(a); };
    auto gz = [=](double z) { return std::sin(alpha * pi * z / L); };
    c.exact = [=](const Vec3& x) { return beta * g1(polar_angle(x)) * gz(x.z()); };
    c.source = [=](const Vec3& x) {
        const double a = polar_angle(x);
        const double k = alpha * pi / L;
        return beta * gz(x.z()) * (k * k * g1(a) - g2(a));
    };
    c.bc = BoundaryCondition::dirichlet;
    c.nodes = NodePolicy::sliding_box;
    c.closed = false;
    c.chart = Chart{2, [](const Param& s) { return Vec3(std::cos(s[0]), std::sin(s[0]), s[1]); }, Param(0.0, 0.0),
                    Param(0.5 * pi, L)};
    return c;
}

// ---- sphere ---------------------------------------------------------------

void add_sphere_geometry(CaseSpec& c)
{
    c.manifold.ambient_dim = 3;
    c.manifold.master = sphere_field(Vec3::Zero(), 1.0);
    c.lo = Vec3(-1.25, -1.25, -1.25);
    c.hi = Vec3(1.25, 1.25, 1.25);
    c.length_scale = 1.0;
    c.closed = true;
    c.chart = Chart{2,
                    [](const Param& s) {
                        return Vec3(std::sin(s[0]) * std::cos(s[1]), std::sin(s[0]) * std::sin(s[1]), std::cos(s[0]));
                    },
                    Param(0.05, -pi), Param(pi - 0.05, pi)};
}

CaseSpec sphere_case()
{
    CaseSpec c;
    c.name = "sphere";
    c.description = "Poisson on the unit sphere, zero mean";
    add_sphere_geometry(c);
    c.sweep = {4, 8, 16, 32};
    c.full_sweep = {4, 8, 16, 32};
    c.orders = {1, 2, 3, 4};
    c.full_orders = {1, 2, 3, 4, 5, 6};
    // sin 3t (cos p - sin p) written with sin t = rho / r, cos t = z / r
    c.exact = [](const Vec3& x) {
        const double r = x.norm();
        const double rho2 = x.x() * x.x() + x.y() * x.y();
        return (x.x() - x.y()) / r * (3.0 - 4.0 * rho2 / (r * r));
    };
    // (24 cos^4 - 29 cos^2 + 5) = -sin^2 (24 cos^2 - 5)
    c.source = [](const Vec3& x) {
        const double r = x.norm();
        const double cz = x.z() / r;
        return 2.0 * (x.x() - x.y()) / r * (24.0 * cz * cz - 5.0);
    };
    c.bc = BoundaryCondition::zero_mean;
    return c;
}

CaseSpec advect_sphere_case()
{
    CaseSpec c;
    c.name = "advect-sphere";
    c.description = "pure advection on the unit sphere, rotation in the xz-plane";
    add_sphere_geometry(c);
    c.sweep = {4, 8, 16};
    c.full_sweep = {4, 8, 16, 32};
    c.orders = {1, 2, 3};
    c.full_orders = {1, 2, 3, 4};
    c.bc = BoundaryCondition::none;
    const double omega = -7.0 / 8.0;
    auto u0 = [](const Vec3& x) {
        const double t = std::acos(std::clamp(x.z() / x.norm(), -1.0, 1.0));
        return std::exp(-4.0 * t * t);
    };
    TransportSpec t;
    t.velocity = [omega](const Vec3& x) -> Vec3 { return omega * Vec3(x.z(), 0.0, -x.x()); };
    t.lambda = 0.0;
    t.initial = u0;
    t.exact = [=](const Vec3& x, double time) {
        const double ca = std::cos(omega * time), sa = std::sin(omega * time);
        return u0(Vec3(x.x() * ca - x.z() * sa, x.y(), x.x() * sa + x.z() * ca));
    };
    t.checkpoints = {0.0, 0.5, 1.0};
    c.transport = t;
    return c;
}

// ---- hyperbolic paraboloid with bumps -------------------------------------

struct Saddle {
    // F = (x^2 - y^2)/2 + 3/20 sin 2 pi x sin 2 pi y, returns F, F_x, F_y, F_xx, F_xy, F_yy
    static std::array<double, 6> eval(double x, double y)
    {
        const double k = 2.0 * pi, a = 0.15;
        const double sx = std::sin(k * x), cx = std::cos(k * x), sy = std::sin(k * y), cy = std::cos(k * y);
        return {0.5 * (x * x - y * y) + a * sx * sy, x + a * k * cx * sy, -y + a * k * sx * cy,
                1.0 - a * k * k * sx * sy, a * k * k * cx * cy, -1.0 - a * k * k * sx * sy};
    }
};

void add_saddle_geometry(CaseSpec& c)
{
    c.manifold.ambient_dim = 3;
    c.manifold.master = master([](const Vec3& x) { return Saddle::eval(x.x(), x.y())[0] - x.z(); },
                               [](const Vec3& x) -> Vec3 {
                                   const auto F = Saddle::eval(x.x(), x.y());
                                   return Vec3(F[1], F[2], -1.0);
                               });
    c.manifold.slaves = {plane_field(Vec3(0.5, 0.0, 0.0), Vec3(1.0, 0.0, 0.0), 1),
                         plane_field(Vec3(0.0, 0.5, 0.0), Vec3(0.0, 1.0, 0.0), 2),
                         plane_field(Vec3(-0.5, 0.0, 0.0), Vec3(-1.0, 0.0, 0.0), 3),
                         plane_field(Vec3(0.0, -0.5, 0.0), Vec3(0.0, -1.0, 0.0), 4)};
    c.lo = Vec3(-0.75, -0.75, -0.75);
    c.hi = Vec3(0.75, 0.75, 0.75);
    c.length_scale = 1.0;
    c.closed = false;
    c.chart = Chart{2, [](const Param& s) { return Vec3(s[0], s[1], Saddle::eval(s[0], s[1])[0]); },
                    Param(-0.5, -0.5), Param(0.5, 0.5)};
}

CaseSpec saddle_case()
{
    CaseSpec c;
    c.name = "hyperbolic-paraboloid";
    c.description = "Poisson on a hyperbolic paraboloid with bumps, four plane slaves";
    add_saddle_geometry(c);
    c.sweep = {4, 8, 16, 32};
    c.full_sweep = {4, 8, 16, 32, 64};
    c.orders = {1, 2, 3};
    c.full_orders = {1, 2, 3, 4, 5, 6};
    c.exact = [](const Vec3& x) { return std::sin(pi * (x.x() - 0.5)) * std::sin(pi * (x.y() - 0.5)); };
    c.source = [](const Vec3& x) {
        const auto F = Saddle::eval(x.x(), x.y());
        const double sx = std::sin(pi * (x.x() - 0.5)), cx = std::cos(pi * (x.x() - 0.5));
        const double sy = std::sin(pi * (x.y() - 0.5)), cy = std::cos(pi * (x.y() - 0.5));
        LocalJet j;
        j.dim = 2;
        j.dx = {Vec3(1.0, 0.0, F[1]), Vec3(0.0, 1.0, F[2])};
        j.ddx[0][0] = Vec3(0.0, 0.0, F[3]);
        j.ddx[0][1] = j.ddx[1][0] = Vec3(0.0, 0.0, F[4]);
        j.ddx[1][1] = Vec3(0.0, 0.0, F[5]);
        j.du = Param(pi * cx * sy, pi * sx * cy);
        j.ddu << -pi * pi * sx * sy, pi * pi * cx * cy, pi * pi * cx * cy, -pi * pi * sx * sy;
        return laplace_beltrami_source(j);
    };
    c.bc = BoundaryCondition::dirichlet;
    return c;
}

CaseSpec transport_saddle_case()
{
    CaseSpec c;
    c.name = "transport-hp";
    c.description = "advection-diffusion on the hyperbolic paraboloid, flow in y";
    add_saddle_geometry(c);
    c.sweep = {16};
    c.full_sweep = {16, 32};
    c.orders = {2};
    c.full_orders = {2};
    c.bc = BoundaryCondition::none;
    const double speed = 1.25;
    auto u0 = [](const Vec3& x) { return 0.5 * std::exp(-10.0 * (x.x() * x.x() + x.y() * x.y())); };
    TransportSpec t;
    t.velocity = [speed](const Vec3& x) -> Vec3 {
        const auto F = Saddle::eval(x.x(), x.y());
        const Vec3 n = Vec3(F[1], F[2], -1.0).normalized();
        const Vec3 ey(0.0, 1.0, 0.0);
        return speed * (ey - n.y() * n).normalized();
    };
    t.lambda = 0.01;
    t.initial = u0;
    t.inflow_markers = {4};
    t.inflow_value = u0;
    t.checkpoints = {0.0, 0.5, 1.0};
    c.transport = t;
    return c;
}

const std::map<std::string, CaseSpec>& registry()
{
    static const std::map<std::string, CaseSpec> cases = [] {
        std::map<std::string, CaseSpec> m;
        for (auto make : {circle_case, flower_case, sline_case, quarter_cylinder_case, sphere_case, saddle_case,
                          advect_circle_case, advect_sphere_case, transport_sline_case, transport_saddle_case}) {
            CaseSpec c = make();
            for (std::size_t i = 0; i < c.manifold.slaves.size(); ++i)
                c.manifold.slaves[i].role = LevelSetRole::slave;
            c.manifold.validate();
            m.emplace(c.name, std::move(c));
        }
        return m;
    }();
    return cases;
}

} // namespace

const CaseSpec& get_case(const std::string& name)
{
    const auto& r = registry();
    auto it = r.find(name);
    if (it == r.end())
        throw LookupError("unknown case '" + name + "'");
    return it->second;
}

std::vector<std::string> case_names()
{
    std::vector<std::string> out;
    for (const auto& [name, c] : registry())
        out.push_back(name);
    return out;
}

} // namespace mfforge
