#include "mfforge/assembly.hpp"

#include "mfforge/quadrature.hpp"
#include "mfforge/reference_element.hpp"

#include "parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

namespace mfforge {

const ShapeTable& shape_table(Shape shape, int order)
{
    static std::array<std::array<std::unique_ptr<ShapeTable>, 7>, 3> cache;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int s = 0; s < 3; ++s)
            for (int p = 1; p <= 6; ++p) {
                const Shape sh = static_cast<Shape>(s);
                const auto& ref = reference_element(sh, p);
                const auto& rule = element_rule(sh, p);
                auto t = std::make_unique<ShapeTable>();
                t->shape = sh;
                t->order = p;
                t->nodes = ref.size();
                t->points = rule.points;
                t->weights = rule.weights;
                t->N.resize(rule.size() * ref.size());
                t->dN.resize(rule.size() * ref.size());
                for (int q = 0; q < rule.size(); ++q)
                    ref.eval_grad(rule.points[q], std::span<double>(t->N.data() + q * ref.size(), ref.size()),
                                  std::span<Vec2>(t->dN.data() + q * ref.size(), ref.size()));
                cache[s][p] = std::move(t);
            }
    });
    if (order < 1 || order > 6)
        throw ArgumentError("element order must lie in [1,6]");
    return *cache[static_cast<int>(shape)][order];
}

SurfacePoint surface_point(Shape shape, std::span<const Vec3> nodes, std::span<const double> N,
                           std::span<const Vec2> dN)
{
    SurfacePoint sp;
    // tangents from offsets to the first node: sum dN_i = 0, and the offsets
    // are O(h) instead of O(1)
    const Vec3& origin = nodes[0];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Vec3 d = nodes[i] - origin;
        sp.x += N[i] * d;
        sp.dr += dN[i].x() * d;
        sp.ds += dN[i].y() * d;
    }
    sp.x += origin;
    if (shape == Shape::line) {
        const double g = sp.dr.squaredNorm();
        if (!(g > 1e-28))
            throw MeshError("degenerate line element");
        sp.Ginv(0, 0) = 1.0 / g;
        sp.jacobian = std::sqrt(g);
        sp.normal = Vec3(sp.dr.y(), -sp.dr.x(), 0.0) / sp.jacobian;
        return sp;
    }
    Eigen::Matrix2d G;
    G << sp.dr.dot(sp.dr), sp.dr.dot(sp.ds), sp.ds.dot(sp.dr), sp.ds.dot(sp.ds);
    const double det = G.determinant();
    const double scale = G.trace();
    if (!(det > 1e-14 * scale * scale))
        throw MeshError("degenerate surface element");
    sp.Ginv << G(1, 1) / det, -G(0, 1) / det, -G(1, 0) / det, G(0, 0) / det;
    sp.jacobian = std::sqrt(det);
    sp.normal = sp.dr.cross(sp.ds) / sp.jacobian;
    return sp;
}

namespace {

Vec3 tangential_gradient(const SurfacePoint& sp, const Vec2& dr)
{
    const Vec2 c = sp.Ginv * dr;
    return c.x() * sp.dr + c.y() * sp.ds;
}

// Gathers the node coordinates of a cell into a fixed buffer.
struct CellNodes {
    std::array<Vec3, 64> x;
    int n = 0;
    std::span<const Vec3> span() const { return {x.data(), static_cast<std::size_t>(n)}; }
};

CellNodes gather(const SurfaceMesh& mesh, int c)
{
    CellNodes out;
    const auto& cell = mesh.cells[c];
    out.n = static_cast<int>(cell.nodes.size());
    for (int i = 0; i < out.n; ++i)
        out.x[i] = mesh.nodes[cell.nodes[i]];
    return out;
}

// CSC pattern of the node-to-node coupling graph, scatter targets per cell.
class Pattern {
public:
    explicit Pattern(const SurfaceMesh& mesh) : n_(mesh.num_nodes())
    {
        std::vector<std::vector<int>> cols(n_);
        for (const auto& cell : mesh.cells)
            for (int a : cell.nodes)
                for (int b : cell.nodes)
                    cols[b].push_back(a);
        outer_.assign(n_ + 1, 0);
        for (int j = 0; j < n_; ++j) {
            auto& v = cols[j];
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            outer_[j + 1] = outer_[j] + static_cast<int>(v.size());
        }
        inner_.reserve(outer_[n_]);
        for (auto& v : cols)
            inner_.insert(inner_.end(), v.begin(), v.end());
        values_.assign(inner_.size(), 0.0);
    }

    void add(int row, int col, double v)
    {
        auto first = inner_.begin() + outer_[col];
        auto last = inner_.begin() + outer_[col + 1];
        values_[std::lower_bound(first, last, row) - inner_.begin()] += v;
    }

    SparseMatrix finish() const
    {
        Eigen::Map<const SparseMatrix> view(n_, n_, static_cast<Eigen::Index>(inner_.size()), outer_.data(),
                                            inner_.data(), values_.data());
        return SparseMatrix(view);
    }

private:
    int n_;
    std::vector<int> outer_, inner_;
    std::vector<double> values_;
};

using ElementKernel = std::function<void(const SurfaceMesh&, int, Eigen::MatrixXd&)>;

// Element matrices are computed in blocks (in parallel when requested) and
// scattered serially in cell order, so both paths give bitwise equal sums.
SparseMatrix assemble_matrix(const SurfaceMesh& mesh, const ElementKernel& kernel, Execution exec)
{
    Pattern pattern(mesh);
    constexpr int kBlock = 2048;
    std::vector<Eigen::MatrixXd> local(kBlock);
    for (int start = 0; start < mesh.num_cells(); start += kBlock) {
        const int stop = std::min(mesh.num_cells(), start + kBlock);
        detail::for_range(start, stop, exec, [&](long c) { kernel(mesh, static_cast<int>(c), local[c - start]); });
        for (int c = start; c < stop; ++c) {
            const auto& ids = mesh.cells[c].nodes;
            const auto& Ke = local[c - start];
            for (std::size_t j = 0; j < ids.size(); ++j)
                for (std::size_t i = 0; i < ids.size(); ++i)
                    pattern.add(ids[i], ids[j], Ke(i, j));
        }
    }
    return pattern.finish();
}

template <class Body>
void for_each_point(const SurfaceMesh& mesh, int c, Body&& body)
{
    const auto& cell = mesh.cells[c];
    const auto& t = shape_table(cell.shape, mesh.order);
    auto xs = gather(mesh, c);
    for (std::size_t q = 0; q < t.weights.size(); ++q) {
        std::span<const double> N(t.N.data() + q * t.nodes, t.nodes);
        std::span<const Vec2> dN(t.dN.data() + q * t.nodes, t.nodes);
        SurfacePoint sp;
        try {
            sp = surface_point(cell.shape, xs.span(), N, dN);
        }
        catch (const MeshError&) {
            throw MeshError("degenerate surface element in mesh cell " + std::to_string(c));
        }
        body(sp, N, dN, t.weights[q] * sp.jacobian);
    }
}

} // namespace

Vec3 surface_gradient(Shape shape, std::span<const Vec3> nodes, const Vec2& r, std::span<const double> u)
{
    const int p = [&] {
        for (int k = 1; k <= 6; ++k)
            if (lattice_size(shape, k) == static_cast<int>(nodes.size()))
                return k;
        throw ArgumentError("node count does not match a Lagrange lattice");
    }();
    const auto& ref = reference_element(shape, p);
    std::array<double, 64> N;
    std::array<Vec2, 64> dN;
    ref.eval_grad(r, std::span<double>(N.data(), ref.size()), std::span<Vec2>(dN.data(), ref.size()));
    auto sp = surface_point(shape, nodes, std::span<const double>(N.data(), ref.size()),
                            std::span<const Vec2>(dN.data(), ref.size()));
    Vec2 gr = Vec2::Zero();
    for (int i = 0; i < ref.size(); ++i)
        gr += u[i] * dN[i];
    return tangential_gradient(sp, gr);
}

SparseMatrix assemble_stiffness(const SurfaceMesh& mesh, Execution exec)
{
    auto kernel = [](const SurfaceMesh& m, int c, Eigen::MatrixXd& K) {
        const int n = static_cast<int>(m.cells[c].nodes.size());
        K.setZero(n, n);
        for_each_point(m, c, [&](const SurfacePoint& sp, std::span<const double>, std::span<const Vec2> dN, double w) {
            std::array<Vec2, 64> g;
            for (int i = 0; i < n; ++i)
                g[i] = sp.Ginv * dN[i];
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    K(i, j) += w * dN[i].dot(g[j]);
        });
    };
    return assemble_matrix(mesh, kernel, exec);
}

SparseMatrix assemble_mass(const SurfaceMesh& mesh, Execution exec)
{
    auto kernel = [](const SurfaceMesh& m, int c, Eigen::MatrixXd& M) {
        const int n = static_cast<int>(m.cells[c].nodes.size());
        M.setZero(n, n);
        for_each_point(m, c, [&](const SurfacePoint&, std::span<const double> N, std::span<const Vec2>, double w) {
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    M(i, j) += w * N[i] * N[j];
        });
    };
    return assemble_matrix(mesh, kernel, exec);
}

SparseMatrix assemble_advection(const SurfaceMesh& mesh, const VectorField& velocity, Execution exec)
{
    auto kernel = [&velocity](const SurfaceMesh& m, int c, Eigen::MatrixXd& C) {
        const int n = static_cast<int>(m.cells[c].nodes.size());
        C.setZero(n, n);
        for_each_point(m, c, [&](const SurfacePoint& sp, std::span<const double> N, std::span<const Vec2> dN,
                                 double w) {
            Vec3 v = velocity(sp.x);
            v -= v.dot(sp.normal) * sp.normal;
            for (int j = 0; j < n; ++j) {
                const double cg = v.dot(tangential_gradient(sp, dN[j]));
                for (int i = 0; i < n; ++i)
                    C(i, j) += w * N[i] * cg;
            }
        });
    };
    return assemble_matrix(mesh, kernel, exec);
}

Vector assemble_load(const SurfaceMesh& mesh, const ScalarField& f, Execution exec)
{
    const int nc = mesh.num_cells();
    std::vector<std::vector<double>> local(nc);
    detail::for_range(0, nc, exec, [&](long c) {
        const int n = static_cast<int>(mesh.cells[c].nodes.size());
        local[c].assign(n, 0.0);
        for_each_point(mesh, static_cast<int>(c), [&](const SurfacePoint& sp, std::span<const double> N,
                                                      std::span<const Vec2>, double w) {
            const double fv = f(sp.x);
            for (int i = 0; i < n; ++i)
                local[c][i] += w * fv * N[i];
        });
    });
    Vector F = Vector::Zero(mesh.num_nodes());
    for (int c = 0; c < nc; ++c)
        for (std::size_t i = 0; i < local[c].size(); ++i)
            F[mesh.cells[c].nodes[i]] += local[c][i];
    return F;
}

Vector assemble_neumann(const SurfaceMesh& mesh, const ScalarField& g, std::span<const int> markers)
{
    Vector F = Vector::Zero(mesh.num_nodes());
    const auto& t = shape_table(Shape::line, mesh.order);
    for (const auto& b : mesh.boundary) {
        if (!markers.empty() && std::find(markers.begin(), markers.end(), b.marker) == markers.end())
            continue;
        auto ids = mesh.boundary_edge_nodes(b);
        if (mesh.cells[b.cell].shape == Shape::line) {
            F[ids[0]] += g(mesh.nodes[ids[0]]);
            continue;
        }
        std::array<Vec3, 8> xs;
        for (std::size_t i = 0; i < ids.size(); ++i)
            xs[i] = mesh.nodes[ids[i]];
        std::span<const Vec3> span(xs.data(), ids.size());
        for (std::size_t q = 0; q < t.weights.size(); ++q) {
            std::span<const double> N(t.N.data() + q * t.nodes, t.nodes);
            std::span<const Vec2> dN(t.dN.data() + q * t.nodes, t.nodes);
            auto sp = surface_point(Shape::line, span, N, dN);
            const double w = t.weights[q] * sp.jacobian * g(sp.x);
            for (std::size_t i = 0; i < ids.size(); ++i)
                F[ids[i]] += w * N[i];
        }
    }
    return F;
}

Vector interpolate(const SurfaceMesh& mesh, const ScalarField& u)
{
    Vector out(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i)
        out[i] = u(mesh.nodes[i]);
    return out;
}

namespace {

template <class Integrand>
double integrate_cells(const SurfaceMesh& mesh, Integrand&& f)
{
    const int nc = mesh.num_cells();
    std::vector<double> part(nc, 0.0);
    detail::for_range(0, nc, Execution::parallel, [&](long c) {
        const auto& ids = mesh.cells[c].nodes;
        for_each_point(mesh, static_cast<int>(c), [&](const SurfacePoint& sp, std::span<const double> N,
                                                      std::span<const Vec2>, double w) {
            double uh = 0.0;
            for (std::size_t i = 0; i < ids.size(); ++i)
                uh += N[i] * f.coefficient(ids[i]);
            part[c] += w * f.value(sp.x, uh);
        });
    });
    double sum = 0.0;
    for (double v : part)
        sum += v;
    return sum;
}

} // namespace

double l2_error(const SurfaceMesh& mesh, const Vector& uh, const ScalarField& exact)
{
    struct {
        const Vector& u;
        const ScalarField& ex;
        double coefficient(int i) const { return u[i]; }
        double value(const Vec3& x, double v) const
        {
            const double d = v - ex(x);
            return d * d;
        }
    } f{uh, exact};
    return std::sqrt(integrate_cells(mesh, f));
}

double l2_norm(const SurfaceMesh& mesh, const Vector& uh)
{
    struct {
        const Vector& u;
        double coefficient(int i) const { return u[i]; }
        double value(const Vec3&, double v) const { return v * v; }
    } f{uh};
    return std::sqrt(integrate_cells(mesh, f));
}

double integral(const SurfaceMesh& mesh, const Vector& uh)
{
    struct {
        const Vector& u;
        double coefficient(int i) const { return u[i]; }
        double value(const Vec3&, double v) const { return v; }
    } f{uh};
    return integrate_cells(mesh, f);
}

} // namespace mfforge
