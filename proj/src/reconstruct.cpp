#include "mfforge/reconstruct.hpp"

#include "mfforge/quadrature.hpp"
#include "mfforge/reference_element.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace mfforge {

namespace {

constexpr std::array<std::array<int, 2>, 3> kTriEdges{{{0, 1}, {1, 2}, {2, 0}}};
constexpr std::array<std::array<int, 2>, 6> kTetEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

int local_edge(int dim, int u, int v)
{
    auto edges = cell_edges(dim);
    for (std::size_t e = 0; e < edges.size(); ++e)
        if ((edges[e][0] == u && edges[e][1] == v) || (edges[e][0] == v && edges[e][1] == u))
            return static_cast<int>(e);
    return -1;
}

bool negative(double v, double tol) { return v < -tol; }

} // namespace

std::span<const std::array<int, 2>> cell_edges(int dim)
{
    if (dim == 2)
        return kTriEdges;
    return kTetEdges;
}

CutTopology classify_cut(std::span<const double> corner_values, double tol_surface)
{
    const int n = static_cast<int>(corner_values.size());
    if (n != 3 && n != 4)
        throw ArgumentError("cell must have 3 or 4 corners");
    CutTopology topo;
    int negatives = 0;
    for (double v : corner_values) {
        topo.corner_signs.push_back(negative(v, tol_surface) ? -1 : 1);
        negatives += topo.corner_signs.back() < 0;
    }
    if (negatives == 0 || negatives == n)
        return topo;
    auto edges = cell_edges(n - 1);
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (topo.corner_signs[edges[e][0]] != topo.corner_signs[edges[e][1]])
            topo.cut_edges.push_back(static_cast<int>(e));
    if (n == 3)
        topo.kind = CutKind::line;
    else
        topo.kind = topo.cut_edges.size() == 3 ? CutKind::triangular : CutKind::quadrilateral;
    return topo;
}

double root_on_segment(const ScalarCurve& f, double tol_root, double tol_zero)
{
    const double fa = f(0.0).first, fb = f(1.0).first;
    if (std::abs(fa) <= tol_zero)
        return 0.0;
    if (std::abs(fb) <= tol_zero)
        return 1.0;
    if ((fa < 0.0) == (fb < 0.0))
        throw InvalidDataError("segment has no sign change of the level set");

    constexpr int kScan = 20;
    double lo = 0.0, hi = 1.0, flo = fa;
    int changes = 0;
    double prev = fa;
    for (int k = 1; k <= kScan; ++k) {
        const double t = static_cast<double>(k) / kScan;
        const double v = k == kScan ? fb : f(t).first;
        if ((v < 0.0) != (prev < 0.0)) {
            ++changes;
            lo = static_cast<double>(k - 1) / kScan;
            hi = t;
            flo = prev;
        }
        prev = v;
    }
    if (changes > 1)
        throw InvalidDataError("multiple level-set roots on one edge; background too coarse");

    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const auto [v, dv] = f(t);
        if (std::abs(v) <= tol_root)
            return t;
        if ((v < 0.0) == (flo < 0.0)) {
            lo = t;
            flo = v;
        }
        else {
            hi = t;
        }
        if (hi - lo <= 4e-16)
            return t;
        double next = dv != 0.0 ? t - v / dv : lo;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        t = next;
    }
    return t;
}

double edge_root(const LevelSetField& field, const Vec3& a, const Vec3& b, double tol_root, double tol_zero)
{
    const Vec3 d = b - a;
    auto f = [&](double t) {
        const Vec3 x = a + t * d;
        return std::pair<double, double>(field(x), field.grad(x).dot(d));
    };
    return root_on_segment(f, tol_root, tol_zero);
}

double solve_on_line(const ScalarCurve& g, double tol, double max_step)
{
    double alpha = 0.0;
    auto [v, dv] = g(0.0);
    const double v0 = v;
    if (std::abs(v) <= tol)
        return 0.0;
    for (int it = 0; it < 50; ++it) {
        if (!(std::abs(dv) > 0.0))
            break;
        alpha += std::clamp(-v / dv, -max_step, max_step);
        if (std::abs(alpha) > 2.0 * max_step)
            break;
        std::tie(v, dv) = g(alpha);
        if (std::abs(v) <= tol)
            return alpha;
    }

    // bracket outward from the start point, nearest sign change first
    double lo = 0.0, hi = 0.0, flo = v0;
    bool found = false;
    for (int k = 1; k <= 20 && !found; ++k) {
        for (double s : {1.0, -1.0}) {
            const double a = s * max_step * k / 10.0;
            const double prev_a = s * max_step * (k - 1) / 10.0;
            const double fa = g(a).first;
            const double fp = k == 1 ? v0 : g(prev_a).first;
            if ((fa < 0.0) != (fp < 0.0)) {
                lo = prev_a;
                hi = a;
                flo = fp;
                found = true;
                break;
            }
        }
    }
    if (!found)
        throw ReconstructionError("projection onto the isosurface failed to bracket a root");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = g(mid).first;
        if (std::abs(fm) <= tol)
            return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        }
        else {
            hi = mid;
        }
    }
    throw ReconstructionError("projection onto the isosurface did not converge");
}

double solve_along(const LevelSetField& field, const Vec3& x0, const Vec3& dir, double tol, double max_step)
{
    auto g = [&](double a) {
        const Vec3 x = x0 + a * dir;
        return std::pair<double, double>(field(x), field.grad(x).dot(dir));
    };
    return solve_on_line(g, tol, max_step);
}

std::vector<Vec3> reconstruct_face_line(const LevelSetField& field, const std::array<Vec3, 3>& face,
                                        const Vec3& start, const Vec3& end, int p, double tol_root)
{
    std::vector<Vec3> nodes(p + 1);
    nodes[0] = start;
    nodes[p] = end;
    if (p == 1)
        return nodes;
    const Vec3 n = (face[1] - face[0]).cross(face[2] - face[0]).normalized();
    const double reach = std::max({(face[1] - face[0]).norm(), (face[2] - face[0]).norm(),
                                   (face[2] - face[1]).norm()});
    for (int k = 1; k < p; ++k) {
        const Vec3 x0 = start + (static_cast<double>(k) / p) * (end - start);
        Vec3 g = field.grad(x0);
        g -= g.dot(n) * n;
        const double gn = g.norm();
        if (!(gn > 0.0))
            throw ReconstructionError("level-set gradient is normal to a cut face");
        g /= gn;
        nodes[k] = x0 + solve_along(field, x0, g, tol_root, reach) * g;
    }
    return nodes;
}

std::array<int, 3> canonical_face_frame(const std::array<int, 3>& ids)
{
    std::array<int, 3> perm{0, 1, 2};
    std::sort(perm.begin(), perm.end(), [&](int a, int b) { return ids[a] < ids[b]; });
    return perm;
}

namespace {

struct CellContext {
    const BackgroundMesh& mesh;
    const LevelSetField& field;
    int cell;
    int p;
    Tolerances tol;
    std::array<int, 4> ids{};
    std::array<Vec3, 4> X{};
    std::array<int, 4> sign{};
};

struct Root {
    Vec3 x;
    NodeKey key;
    int edge;
};

Root edge_root_node(const CellContext& c, int u, int v)
{
    int a = u, b = v;
    if (c.ids[a] > c.ids[b])
        std::swap(a, b);
    const double t = edge_root(c.field, c.X[a], c.X[b], c.tol.root, c.tol.surface);
    Root r;
    r.x = t == 0.0 ? c.X[a] : (t == 1.0 ? c.X[b] : Vec3(c.X[a] + t * (c.X[b] - c.X[a])));
    if (t == 0.0 || t == 1.0)
        r.key = {kVertexRoot, t == 0.0 ? c.ids[a] : c.ids[b]};
    else
        r.key = {kEdgeRoot, c.ids[a], c.ids[b]};
    r.edge = local_edge(c.mesh.dim, u, v);
    return r;
}

struct EdgeNodes {
    std::vector<Vec3> x;
    std::vector<NodeKey> keys;
    std::vector<NodeProvenance> prov;
    int marker = kNoMarker;
};

Vec3 project_along_gradient(const CellContext& c, const Vec3& x0)
{
    const Vec3 g = c.field.grad(x0);
    if (!(g.norm() > 1e-12))
        throw ReconstructionError("singular level-set gradient at a surface node", c.cell);
    const Vec3 dir = g.normalized();
    return x0 + solve_along(c.field, x0, dir, c.tol.root, c.mesh.h * std::sqrt(3.0)) * dir;
}

std::vector<Vec3> project_chord(const CellContext& c, const Vec3& start, const Vec3& end)
{
    std::vector<Vec3> nodes(c.p + 1);
    nodes[0] = start;
    nodes[c.p] = end;
    for (int k = 1; k < c.p; ++k)
        nodes[k] = project_along_gradient(c, start + (static_cast<double>(k) / c.p) * (end - start));
    return nodes;
}

// Line element on face (u, v, w) from the root on edge (u, v) to the root on
// edge (u, w). Built in the canonical frame so both incident cells agree.
EdgeNodes face_edge(const CellContext& c, int u, int v, int w, const Root& from, const Root& to)
{
    std::array<int, 3> local{u, v, w};
    std::array<int, 3> gids{c.ids[u], c.ids[v], c.ids[w]};
    auto perm = canonical_face_frame(gids);
    std::array<int, 3> s{local[perm[0]], local[perm[1]], local[perm[2]]};

    // canonical start: root whose sorted vertex pair is lexicographically smaller
    const bool forward = from.key < to.key;
    const Root& first = forward ? from : to;
    const Root& second = forward ? to : from;
    std::array<int, 3> fv{c.ids[u], c.ids[v], c.ids[w]};
    const bool box_face = on_box_boundary(c.mesh, fv);
    // Box faces keep their lines in plane. Elsewhere the chord is projected
    // along the full gradient, the same map used for the interior nodes.
    auto line = box_face ? reconstruct_face_line(c.field, {c.X[s[0]], c.X[s[1]], c.X[s[2]]}, first.x, second.x,
                                                 c.p, c.tol.root)
                         : project_chord(c, first.x, second.x);

    const int face = 6 - u - v - w; // tet: local face = opposite vertex
    EdgeNodes out;
    out.x.resize(c.p + 1);
    out.keys.resize(c.p + 1);
    out.prov.resize(c.p + 1);
    for (int k = 0; k <= c.p; ++k) {
        const int kc = forward ? k : c.p - k;
        out.x[k] = line[kc];
        if (k == 0) {
            out.keys[k] = from.key;
            out.prov[k] = {NodeOrigin::cell_edge, from.edge};
        }
        else if (k == c.p) {
            out.keys[k] = to.key;
            out.prov[k] = {NodeOrigin::cell_edge, to.edge};
        }
        else {
            out.keys[k] = {kFaceLine, c.ids[s[0]], c.ids[s[1]], c.ids[s[2]], kc};
            out.prov[k] = {NodeOrigin::cell_face, face};
        }
    }
    out.marker = box_face ? kBoxMarker : kNoMarker;
    out.x[0] = from.x;
    out.x[c.p] = to.x;
    return out;
}

Vec3 sign_direction(const CellContext& c)
{
    Vec3 pos = Vec3::Zero(), neg = Vec3::Zero();
    int np = 0, nn = 0;
    for (int k = 0; k <= c.mesh.dim; ++k) {
        if (c.sign[k] > 0)
            pos += c.X[k], ++np;
        else
            neg += c.X[k], ++nn;
    }
    return pos / np - neg / nn;
}

void check_element(const CellContext& c, const SurfaceElement& e)
{
    const auto& ref = reference_element(e.shape, e.order);
    const auto& rule = element_rule(e.shape, e.order);
    const double h = c.mesh.h;
    for (const auto& r : rule.points) {
        auto m = evaluate_map(ref, e.nodes, r);
        const double measure = e.shape == Shape::line ? m.dr.norm() : m.dr.cross(m.ds).norm();
        const double floor = e.shape == Shape::line ? 1e-14 * h : 1e-14 * h * h;
        if (!(measure > floor))
            throw ReconstructionError("degenerate surface element", c.cell);
    }
}

std::optional<SurfaceElement> build_2d(CellContext& c, const CutTopology& topo)
{
    auto edges = cell_edges(2);
    Root A = edge_root_node(c, edges[topo.cut_edges[0]][0], edges[topo.cut_edges[0]][1]);
    Root B = edge_root_node(c, edges[topo.cut_edges[1]][0], edges[topo.cut_edges[1]][1]);
    if (A.key == B.key)
        return std::nullopt; // the curve only touches a vertex
    const Vec3 t = B.x - A.x;
    const Vec3 n(t.y(), -t.x(), 0.0);
    if (n.dot(sign_direction(c)) < 0.0)
        std::swap(A, B);

    SurfaceElement e;
    e.shape = Shape::line;
    e.order = c.p;
    e.parent_cell = c.cell;
    e.key = {c.cell};
    e.nodes = reconstruct_face_line(c.field, {c.X[0], c.X[1], c.X[2]}, A.x, B.x, c.p, c.tol.root);
    e.node_keys.resize(c.p + 1);
    e.provenance.resize(c.p + 1);
    e.node_keys[0] = A.key;
    e.provenance[0] = {NodeOrigin::cell_edge, A.edge};
    e.node_keys[c.p] = B.key;
    e.provenance[c.p] = {NodeOrigin::cell_edge, B.edge};
    for (int k = 1; k < c.p; ++k) {
        e.node_keys[k] = {kCellInterior, c.cell, k};
        e.provenance[k] = {NodeOrigin::cell_interior, -1};
    }
    for (const Root* r : {&A, &B}) {
        auto ev = edges[r->edge];
        std::array<int, 2> vv{c.ids[ev[0]], c.ids[ev[1]]};
        e.edge_markers.push_back(on_box_boundary(c.mesh, vv) ? kBoxMarker : kNoMarker);
    }
    return e;
}

std::optional<SurfaceElement> build_3d(CellContext& c, const CutTopology& topo)
{
    std::vector<EdgeNodes> sides;
    if (topo.kind == CutKind::triangular) {
        int v = 0;
        const int negatives = std::count(c.sign.begin(), c.sign.end(), -1);
        for (int k = 0; k < 4; ++k)
            if ((negatives == 1) == (c.sign[k] < 0))
                v = k;
        std::array<int, 3> o;
        for (int k = 0, m = 0; k < 4; ++k)
            if (k != v)
                o[m++] = k;
        Root ra = edge_root_node(c, v, o[0]);
        Root rb = edge_root_node(c, v, o[1]);
        Root rc = edge_root_node(c, v, o[2]);
        if (ra.key == rb.key || rb.key == rc.key || rc.key == ra.key)
            return std::nullopt;
        if ((rb.x - ra.x).cross(rc.x - ra.x).dot(sign_direction(c)) < 0.0) {
            std::swap(o[1], o[2]);
            std::swap(rb, rc);
        }
        sides.push_back(face_edge(c, v, o[0], o[1], ra, rb));
        sides.push_back(face_edge(c, v, o[1], o[2], rb, rc));
        sides.push_back(face_edge(c, v, o[2], o[0], rc, ra));
    }
    else {
        std::array<int, 2> neg, pos;
        for (int k = 0, a = 0, b = 0; k < 4; ++k)
            (c.sign[k] < 0 ? neg[a++] : pos[b++]) = k;
        auto [a, b] = neg;
        auto [cc, d] = pos;
        Root rac = edge_root_node(c, a, cc);
        Root rad = edge_root_node(c, a, d);
        Root rbd = edge_root_node(c, b, d);
        Root rbc = edge_root_node(c, b, cc);
        if (rac.key == rbc.key && rad.key == rbd.key)
            return std::nullopt;
        if ((rbd.x - rac.x).cross(rbc.x - rad.x).dot(sign_direction(c)) < 0.0) {
            std::swap(cc, d);
            std::swap(rac, rad);
            std::swap(rbd, rbc);
        }
        // sides: R_ac -> R_ad on (a,c,d), R_ad -> R_bd on (d,a,b),
        //        R_bd -> R_bc on (b,d,c), R_bc -> R_ac on (c,b,a)
        sides.push_back(face_edge(c, a, cc, d, rac, rad));
        sides.push_back(face_edge(c, d, a, b, rad, rbd));
        sides.push_back(face_edge(c, b, d, cc, rbd, rbc));
        sides.push_back(face_edge(c, cc, b, a, rbc, rac));
    }

    SurfaceElement e;
    e.shape = sides.size() == 3 ? Shape::tri : Shape::quad;
    e.order = c.p;
    e.parent_cell = c.cell;
    e.key = {c.cell};
    const int n = lattice_size(e.shape, c.p);
    std::vector<std::vector<Vec3>> edge_x;
    for (auto& s : sides)
        edge_x.push_back(s.x);
    e.nodes = transfinite_lattice<Vec3>(e.shape, c.p, edge_x);
    e.node_keys.resize(n);
    e.provenance.resize(n);
    for (std::size_t s = 0; s < sides.size(); ++s) {
        auto idx = edge_indices(e.shape, c.p, static_cast<int>(s));
        for (int k = 0; k <= c.p; ++k) {
            e.node_keys[idx[k]] = sides[s].keys[k];
            e.provenance[idx[k]] = sides[s].prov[k];
        }
        e.edge_markers.push_back(sides[s].marker);
    }
    // Interior nodes start on the flat corner map (affine or bilinear) so
    // that edge and interior nodes come from one smooth map.
    std::vector<Vec3> corner;
    for (auto& s : sides)
        corner.push_back(s.x.front());
    for (int idx = 0; idx < n; ++idx) {
        if (is_boundary_index(e.shape, c.p, idx))
            continue;
        auto [i, j] = lattice_coords(e.shape, c.p, idx);
        const double a = static_cast<double>(i) / c.p, b = static_cast<double>(j) / c.p;
        const Vec3 x0 = e.shape == Shape::tri
                            ? Vec3((1.0 - a - b) * corner[0] + a * corner[1] + b * corner[2])
                            : Vec3((1.0 - a) * (1.0 - b) * corner[0] + a * (1.0 - b) * corner[1] + a * b * corner[2] +
                                   (1.0 - a) * b * corner[3]);
        e.nodes[idx] = project_along_gradient(c, x0);
        e.node_keys[idx] = {kCellInterior, c.cell, idx};
        e.provenance[idx] = {NodeOrigin::cell_interior, -1};
    }
    return e;
}

} // namespace

std::optional<SurfaceElement> reconstruct_element(const BackgroundMesh& mesh, int cell, const LevelSetField& field,
                                                  int p, const Tolerances& tol)
{
    if (p < 1 || p > 6)
        throw ArgumentError("order must lie in [1,6]");
    CellContext c{mesh, field, cell, p, tol};
    const int nc = mesh.corners_per_cell();
    std::array<double, 4> values{};
    for (int k = 0; k < nc; ++k) {
        c.ids[k] = mesh.cells[cell][k];
        c.X[k] = mesh.vertices[c.ids[k]];
        values[k] = field(c.X[k]);
    }
    auto topo = classify_cut(std::span<const double>(values.data(), nc), tol.surface);
    if (topo.kind == CutKind::none)
        return std::nullopt;
    for (int k = 0; k < nc; ++k)
        c.sign[k] = topo.corner_signs[k];

    SurfaceElement e;
    try {
        auto built = mesh.dim == 2 ? build_2d(c, topo) : build_3d(c, topo);
        if (!built)
            return std::nullopt;
        e = std::move(*built);
    }
    catch (const ReconstructionError& err) {
        if (err.cell() >= 0)
            throw;
        throw ReconstructionError(err.what(), cell);
    }
    check_element(c, e);
    e.ref_nodes.reserve(e.nodes.size());
    for (const auto& x : e.nodes)
        e.ref_nodes.push_back(mesh.to_reference(cell, x));
    return e;
}

ReconstructionResult reconstruct(const BackgroundMesh& mesh, const LevelSetField& field, int p, const Tolerances& tol,
                                 Execution exec)
{
    const long n = mesh.num_cells();
    std::vector<std::optional<SurfaceElement>> slots(n);
    detail::for_range(0, n, exec,
                      [&](long c) { slots[c] = reconstruct_element(mesh, static_cast<int>(c), field, p, tol); }, 64);

    ReconstructionResult out;
    for (auto& s : slots)
        if (s) {
            out.elements.push_back(std::move(*s));
            ++out.cut_cells;
        }
    return out;
}

Vec3 element_normal(const SurfaceElement& e, const Vec2& r)
{
    auto m = evaluate_map(reference_element(e.shape, e.order), e.nodes, r);
    if (e.shape == Shape::line)
        return Vec3(m.dr.y(), -m.dr.x(), 0.0).normalized();
    return m.dr.cross(m.ds).normalized();
}

} // namespace mfforge
