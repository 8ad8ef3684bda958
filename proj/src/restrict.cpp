#include "mfforge/restrict.hpp"

#include "mfforge/quadrature.hpp"
#include "mfforge/reference_element.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace mfforge {

namespace {

struct RefEdge {
    std::vector<Vec2> pts;
    std::vector<SubNodeOrigin> org;
    SubEdgeOrigin edge;
};

RefEdge reversed(RefEdge e)
{
    std::reverse(e.pts.begin(), e.pts.end());
    std::reverse(e.org.begin(), e.org.end());
    return e;
}

class Builder {
public:
    Builder(Shape shape, int p, const EdgeCutFn& edge_cut, const ReferenceLevelSet& psi, double tol_root)
        : shape_(shape), p_(p), edge_cut_(edge_cut), psi_(psi), tol_root_(tol_root),
          corners_(corner_indices(shape, p))
    {
    }

    double cut(int e)
    {
        if (!cut_[e])
            cut_[e] = edge_cut_(e);
        return *cut_[e];
    }

    SubNodeOrigin corner_origin(int c) const { return {SubNodeOrigin::parent_node, corners_[c], -1, -1}; }

    SubNodeOrigin cut_origin(int e)
    {
        const double t = cut(e);
        auto ec = shape_ == Shape::line ? std::array<int, 2>{0, 1} : edge_corners(shape_, e);
        if (t == 0.0)
            return corner_origin(ec[0]);
        if (t == 1.0)
            return corner_origin(ec[1]);
        return {SubNodeOrigin::edge_cut, e, -1, -1};
    }

    Vec2 cut_point(int e) { return edge_point(shape_, e, cut(e)); }

    RefEdge full_edge(int e, bool forward = true)
    {
        RefEdge out;
        for (int idx : edge_indices(shape_, p_, e)) {
            out.pts.push_back(lattice_point(shape_, p_, idx));
            out.org.push_back({SubNodeOrigin::parent_node, idx, -1, -1});
        }
        out.edge = {SubEdgeOrigin::on_parent, e};
        return forward ? out : reversed(out);
    }

    RefEdge segment(int e, int seg, bool forward = true)
    {
        const double tc = cut(e);
        if ((seg == 0 && tc == 1.0) || (seg == 1 && tc == 0.0))
            return full_edge(e, forward);
        auto ec = edge_corners(shape_, e);
        RefEdge out;
        for (int m = 0; m <= p_; ++m) {
            const double f = static_cast<double>(m) / p_;
            const double t = seg == 0 ? tc * f : tc + (1.0 - tc) * f;
            out.pts.push_back(edge_point(shape_, e, t));
            if (m == 0)
                out.org.push_back(seg == 0 ? corner_origin(ec[0]) : cut_origin(e));
            else if (m == p_)
                out.org.push_back(seg == 0 ? cut_origin(e) : corner_origin(ec[1]));
            else
                out.org.push_back({SubNodeOrigin::parent_edge, e, seg, m});
        }
        out.pts.front() = seg == 0 ? lattice_point(shape_, p_, corners_[ec[0]]) : cut_point(e);
        out.pts.back() = seg == 0 ? cut_point(e) : lattice_point(shape_, p_, corners_[ec[1]]);
        out.edge = {SubEdgeOrigin::on_parent, e};
        return forward ? out : reversed(out);
    }

    // Interface curve from the cut on edge ea to the cut on edge eb.
    RefEdge interface(int ea, int eb, bool forward = true)
    {
        if (!interface_) {
            RefEdge out;
            const Vec2 a = cut_point(ea), b = cut_point(eb);
            out.pts.push_back(a);
            out.org.push_back(cut_origin(ea));
            for (int k = 1; k < p_; ++k) {
                const Vec2 r0 = a + (static_cast<double>(k) / p_) * (b - a);
                const Vec2 g = psi_(r0).second;
                if (!(g.norm() > 0.0))
                    throw InvalidDataError("slave level set has a vanishing gradient on the element");
                const Vec2 dir = g.normalized();
                auto line = [&](double s) {
                    auto [v, gr] = psi_(r0 + s * dir);
                    return std::pair<double, double>(v, gr.dot(dir));
                };
                out.pts.push_back(r0 + solve_on_line(line, tol_root_, 0.5) * dir);
                out.org.push_back({SubNodeOrigin::interface, k, -1, -1});
            }
            out.pts.push_back(b);
            out.org.push_back(cut_origin(eb));
            out.edge = {SubEdgeOrigin::on_interface, -1};
            interface_ = std::move(out);
        }
        return forward ? *interface_ : reversed(*interface_);
    }

    // Straight internal edge w from the cut on edge e to corner c.
    RefEdge internal(int w, int e, int c, bool forward = true)
    {
        RefEdge out;
        const Vec2 a = cut_point(e), b = lattice_point(shape_, p_, corners_[c]);
        for (int k = 0; k <= p_; ++k) {
            const double f = static_cast<double>(k) / p_;
            out.pts.push_back(k == p_ ? b : Vec2(a + f * (b - a)));
            if (k == 0)
                out.org.push_back(cut_origin(e));
            else if (k == p_)
                out.org.push_back(corner_origin(c));
            else
                out.org.push_back({SubNodeOrigin::internal_edge, w, k, -1});
        }
        out.edge = {SubEdgeOrigin::on_internal, -1};
        return forward ? out : reversed(out);
    }

    SubElementRef make(Shape shape, int sub, const std::vector<RefEdge>& edges, bool keep) const
    {
        SubElementRef s;
        s.shape = shape;
        s.keep = keep;
        std::vector<std::vector<Vec2>> pts;
        for (const auto& e : edges) {
            pts.push_back(e.pts);
            s.edges.push_back(e.edge);
        }
        s.ref_nodes = transfinite_lattice<Vec2>(shape, p_, pts);
        s.origins.assign(s.ref_nodes.size(), {});
        for (std::size_t e = 0; e < edges.size(); ++e) {
            auto idx = edge_indices(shape, p_, static_cast<int>(e));
            for (int k = 0; k <= p_; ++k)
                s.origins[idx[k]] = edges[e].org[k];
        }
        for (int idx = 0; idx < static_cast<int>(s.ref_nodes.size()); ++idx)
            if (!is_boundary_index(shape, p_, idx))
                s.origins[idx] = {SubNodeOrigin::interior, sub, idx, -1};
        return s;
    }

    int order() const { return p_; }

private:
    Shape shape_;
    int p_;
    const EdgeCutFn& edge_cut_;
    const ReferenceLevelSet& psi_;
    double tol_root_;
    std::vector<int> corners_;
    std::array<std::optional<double>, 4> cut_;
    std::optional<RefEdge> interface_;
};

Decomposition split_line(Builder& b, int p, int s0)
{
    Decomposition d;
    d.kind = DecompositionKind::line_split;
    const double tc = b.cut(0);
    for (int sub = 0; sub < 2; ++sub) {
        SubElementRef s;
        s.shape = Shape::line;
        s.keep = (sub == 0) == (s0 < 0);
        for (int m = 0; m <= p; ++m) {
            const double f = static_cast<double>(m) / p;
            const double t = sub == 0 ? (m == p ? tc : tc * f) : (m == p ? 1.0 : tc + (1.0 - tc) * f);
            s.ref_nodes.emplace_back(t, 0.0);
            if ((sub == 0 && m == 0) || (sub == 1 && m == p))
                s.origins.push_back(b.corner_origin(sub));
            else if ((sub == 0 && m == p) || (sub == 1 && m == 0))
                s.origins.push_back(b.cut_origin(0));
            else
                s.origins.push_back({SubNodeOrigin::interior, sub, m, -1});
        }
        if (sub == 0)
            s.edges = {{SubEdgeOrigin::on_parent, 0}, {SubEdgeOrigin::on_interface, -1}};
        else
            s.edges = {{SubEdgeOrigin::on_interface, -1}, {SubEdgeOrigin::on_parent, 1}};
        d.parts.push_back(std::move(s));
    }
    return d;
}

bool ambiguous_quad(const std::vector<int>& s)
{
    return s[0] == s[2] && s[1] == s[3] && s[0] != s[1];
}

} // namespace

Decomposition decompose_in_reference(Shape shape, int p, std::span<const double> corner_values,
                                     const EdgeCutFn& edge_cut, const ReferenceLevelSet& psi, double tol_root,
                                     double tol_zero)
{
    const int nc = num_corners(shape);
    if (static_cast<int>(corner_values.size()) != nc)
        throw ArgumentError("corner value count does not match the element shape");
    bool any_pos = false, any_neg = false;
    for (double v : corner_values) {
        any_pos = any_pos || v > tol_zero;
        any_neg = any_neg || v < -tol_zero;
    }
    Decomposition d;
    if (!any_pos) {
        d.kind = DecompositionKind::keep_whole;
        return d;
    }
    if (!any_neg) {
        d.kind = DecompositionKind::drop_whole;
        return d;
    }

    std::vector<int> s(nc);
    for (int c = 0; c < nc; ++c)
        s[c] = corner_values[c] < -tol_zero ? -1 : 1;
    if (shape == Shape::quad && ambiguous_quad(s)) {
        for (int c = 0; c < nc; ++c)
            s[c] = corner_values[c] <= tol_zero ? -1 : 1;
        if (ambiguous_quad(s))
            throw InvalidDataError("slave level set cuts a quadrilateral along both diagonals");
    }

    Builder b(shape, p, edge_cut, psi, tol_root);
    if (shape == Shape::line)
        return split_line(b, p, s[0]);

    const int negatives = static_cast<int>(std::count(s.begin(), s.end(), -1));
    auto lone_corner = [&] {
        for (int c = 0; c < nc; ++c) {
            int same = 0;
            for (int o = 0; o < nc; ++o)
                same += s[o] == s[c];
            if (same == 1)
                return c;
        }
        return -1;
    };

    if (shape == Shape::tri) {
        const int k = lone_corner();
        const int ea = k, eb = (k + 2) % 3;
        d.kind = DecompositionKind::tri_to_tri_quad;
        d.parts.push_back(b.make(Shape::tri, 0, {b.segment(ea, 0), b.interface(ea, eb), b.segment(eb, 1)}, s[k] < 0));
        d.parts.push_back(b.make(Shape::quad, 1,
                                 {b.segment(ea, 1), b.full_edge((k + 1) % 3), b.segment(eb, 0),
                                  b.interface(ea, eb, false)},
                                 s[k] > 0));
        return d;
    }

    if (negatives == 2) {
        int k = 0;
        while (!(s[k] == s[(k + 1) % 4] && s[(k + 2) % 4] == s[(k + 3) % 4]))
            ++k;
        const int ea = (k + 1) % 4, eb = (k + 3) % 4;
        d.kind = DecompositionKind::quad_to_two_quads;
        d.parts.push_back(b.make(Shape::quad, 0,
                                 {b.full_edge(k), b.segment(ea, 0), b.interface(ea, eb), b.segment(eb, 1)},
                                 s[k] < 0));
        d.parts.push_back(b.make(Shape::quad, 1,
                                 {b.interface(ea, eb, false), b.segment(ea, 1), b.full_edge((k + 2) % 4),
                                  b.segment(eb, 0)},
                                 s[k] > 0));
        return d;
    }

    const int k = lone_corner();
    const int ea = k, eb = (k + 3) % 4, opposite = (k + 2) % 4;
    d.kind = DecompositionKind::quad_to_four_tris;
    d.parts.push_back(b.make(Shape::tri, 0, {b.segment(ea, 0), b.interface(ea, eb), b.segment(eb, 1)}, s[k] < 0));
    d.parts.push_back(b.make(Shape::tri, 1,
                             {b.segment(ea, 1), b.full_edge((k + 1) % 4), b.internal(0, ea, opposite, false)},
                             s[k] > 0));
    d.parts.push_back(b.make(Shape::tri, 2,
                             {b.internal(0, ea, opposite), b.internal(1, eb, opposite, false),
                              b.interface(ea, eb, false)},
                             s[k] > 0));
    d.parts.push_back(b.make(Shape::tri, 3,
                             {b.internal(1, eb, opposite), b.full_edge(opposite), b.segment(eb, 0)}, s[k] > 0));
    return d;
}

Decomposition decompose_in_reference(Shape shape, int p, std::span<const double> nodal_values, double tol_root,
                                     double tol_zero)
{
    const auto& ref = reference_element(shape, p);
    if (static_cast<int>(nodal_values.size()) != ref.size())
        throw ArgumentError("nodal value count does not match the element lattice");
    auto interp = [&ref, nodal_values](const Vec2& r) {
        std::array<double, 64> N;
        std::array<Vec2, 64> dN;
        ref.eval_grad(r, std::span<double>(N.data(), ref.size()), std::span<Vec2>(dN.data(), ref.size()));
        double v = 0.0;
        Vec2 g = Vec2::Zero();
        for (int i = 0; i < ref.size(); ++i) {
            v += N[i] * nodal_values[i];
            g += nodal_values[i] * dN[i];
        }
        return std::pair<double, Vec2>(v, g);
    };
    ReferenceLevelSet psi = interp;
    EdgeCutFn cut = [&](int e) {
        Vec2 a, b;
        if (shape == Shape::line) {
            a = Vec2(0.0, 0.0);
            b = Vec2(1.0, 0.0);
        }
        else {
            a = edge_point(shape, e, 0.0);
            b = edge_point(shape, e, 1.0);
        }
        auto f = [&](double t) {
            auto [v, g] = interp(a + t * (b - a));
            return std::pair<double, double>(v, g.dot(b - a));
        };
        return root_on_segment(f, tol_root, tol_zero);
    };
    std::vector<double> corners;
    for (int idx : corner_indices(shape, p))
        corners.push_back(nodal_values[idx]);
    return decompose_in_reference(shape, p, corners, cut, psi, tol_root, tol_zero);
}

std::vector<double> interpolate_slave_at_element(const LevelSetField& psi, const SurfaceElement& element)
{
    std::vector<double> out;
    out.reserve(element.nodes.size());
    for (const auto& x : element.nodes)
        out.push_back(psi(x));
    return out;
}

namespace {

NodeKey concat(std::initializer_list<std::int64_t> head, const NodeKey& tail)
{
    NodeKey k(head);
    k.insert(k.end(), tail.begin(), tail.end());
    return k;
}

} // namespace

std::vector<SurfaceElement> restrict_element(const SurfaceElement& element, const LevelSetField& slave,
                                             const Tolerances& tol)
{
    const int p = element.order;
    const auto& ref = reference_element(element.shape, p);
    const auto corners = corner_indices(element.shape, p);

    std::vector<double> corner_values;
    for (int idx : corners)
        corner_values.push_back(slave(element.nodes[idx]));

    ReferenceLevelSet psi = [&](const Vec2& r) {
        auto m = evaluate_map(ref, element.nodes, r);
        const Vec3 g = slave.grad(m.x);
        return std::pair<double, Vec2>(slave(m.x), Vec2(g.dot(m.dr), g.dot(m.ds)));
    };

    // Parent edges are cut along their canonical direction (ascending corner
    // keys) so neighbours sharing the edge compute bitwise identical nodes.
    const int ne = element.shape == Shape::line ? 1 : num_edges(element.shape);
    std::vector<std::vector<Vec3>> canon(ne);
    std::vector<char> forward(ne, 1);
    std::vector<NodeKey> key_lo(ne), key_hi(ne);
    std::vector<double> cut_canon(ne, 0.0);
    if (element.shape != Shape::line) {
        for (int e = 0; e < ne; ++e) {
            auto idx = edge_indices(element.shape, p, e);
            const NodeKey& ks = element.node_keys[idx.front()];
            const NodeKey& ke = element.node_keys[idx.back()];
            forward[e] = ks < ke;
            if (!forward[e])
                std::reverse(idx.begin(), idx.end());
            for (int i : idx)
                canon[e].push_back(element.nodes[i]);
            key_lo[e] = forward[e] ? ks : ke;
            key_hi[e] = forward[e] ? ke : ks;
        }
    }
    auto curve_root = [&](int e) {
        if (element.shape == Shape::line) {
            auto f = [&](double t) {
                auto m = evaluate_map(ref, element.nodes, Vec2(t, 0.0));
                return std::pair<double, double>(slave(m.x), slave.grad(m.x).dot(m.dr));
            };
            cut_canon[0] = root_on_segment(f, tol.root, tol.surface);
            return cut_canon[0];
        }
        const auto& nodes = canon[e];
        auto f = [&](double t) {
            std::array<double, 8> N, dN;
            lagrange_1d_all(p, t, std::span<double>(N.data(), p + 1), std::span<double>(dN.data(), p + 1));
            Vec3 x = Vec3::Zero(), dx = Vec3::Zero();
            for (int k = 0; k <= p; ++k) {
                x += N[k] * nodes[k];
                dx += dN[k] * nodes[k];
            }
            return std::pair<double, double>(slave(x), slave.grad(x).dot(dx));
        };
        cut_canon[e] = root_on_segment(f, tol.root, tol.surface);
        return forward[e] ? cut_canon[e] : 1.0 - cut_canon[e];
    };

    Decomposition d = decompose_in_reference(element.shape, p, corner_values, curve_root, psi, tol.root,
                                             tol.surface);
    if (d.kind == DecompositionKind::keep_whole) {
        // corners resting on the interface: the neighbour beyond is dropped
        SurfaceElement kept = element;
        auto on_zero = [&](int c) { return std::abs(corner_values[c]) <= tol.surface; };
        if (element.shape == Shape::line) {
            for (int c = 0; c < 2; ++c)
                if (on_zero(c))
                    kept.edge_markers[c] = slave.id;
        }
        else {
            const int nc = static_cast<int>(corner_values.size());
            for (int e = 0; e < ne; ++e)
                if (on_zero(e) && on_zero((e + 1) % nc))
                    kept.edge_markers[e] = slave.id;
        }
        return {kept};
    }
    if (d.kind == DecompositionKind::drop_whole)
        return {};

    auto edge_key = [&](std::int64_t tag, std::initializer_list<std::int64_t> mid, int e) {
        NodeKey k{tag, slave.id};
        k.insert(k.end(), mid.begin(), mid.end());
        k.push_back(static_cast<std::int64_t>(key_lo[e].size()));
        k.insert(k.end(), key_lo[e].begin(), key_lo[e].end());
        k.insert(k.end(), key_hi[e].begin(), key_hi[e].end());
        return k;
    };
    auto canon_point = [&](int e, double t) { return eval_curve(std::span<const Vec3>(canon[e]), t); };

    std::vector<SurfaceElement> out;
    std::array<double, 64> N;
    for (std::size_t sub = 0; sub < d.parts.size(); ++sub) {
        const auto& part = d.parts[sub];
        if (!part.keep)
            continue;
        SurfaceElement s;
        s.shape = part.shape;
        s.order = p;
        s.parent_cell = element.parent_cell;
        s.key = element.key;
        s.key.push_back(slave.id);
        s.key.push_back(static_cast<std::int64_t>(sub));
        const int n = static_cast<int>(part.ref_nodes.size());
        s.nodes.resize(n);
        s.ref_nodes.resize(n);
        s.node_keys.resize(n);
        s.provenance.resize(n);
        for (int i = 0; i < n; ++i) {
            const auto& o = part.origins[i];
            const Vec2& r = part.ref_nodes[i];
            ref.eval(r, std::span<double>(N.data(), ref.size()));
            Vec3 xr = Vec3::Zero(), x = Vec3::Zero();
            for (int j = 0; j < ref.size(); ++j) {
                xr += N[j] * element.ref_nodes[j];
                x += N[j] * element.nodes[j];
            }
            s.ref_nodes[i] = xr;
            switch (o.kind) {
            case SubNodeOrigin::parent_node:
                s.nodes[i] = element.nodes[o.a];
                s.ref_nodes[i] = element.ref_nodes[o.a];
                s.node_keys[i] = element.node_keys[o.a];
                s.provenance[i] = element.provenance[o.a];
                break;
            case SubNodeOrigin::parent_edge: {
                const int e = o.a;
                const int seg = forward[e] ? o.b : 1 - o.b;
                const int m = forward[e] ? o.c : p - o.c;
                const double tc = cut_canon[e];
                const double f = static_cast<double>(m) / p;
                const double t = seg == 0 ? tc * f : tc + (1.0 - tc) * f;
                s.nodes[i] = canon_point(e, t);
                s.node_keys[i] = edge_key(kSubEdge, {seg, m}, e);
                s.provenance[i] = {NodeOrigin::slave_edge, e};
                break;
            }
            case SubNodeOrigin::edge_cut:
                if (element.shape == Shape::line) {
                    s.nodes[i] = x;
                    s.node_keys[i] = concat({kLineCut, slave.id}, element.key);
                }
                else {
                    s.nodes[i] = canon_point(o.a, cut_canon[o.a]);
                    s.node_keys[i] = edge_key(kSubCut, {}, o.a);
                }
                s.provenance[i] = {NodeOrigin::slave_interface, o.a};
                break;
            case SubNodeOrigin::interface:
                s.nodes[i] = x;
                s.node_keys[i] = concat({kInterface, slave.id, o.a}, element.key);
                s.provenance[i] = {NodeOrigin::slave_interface, -1};
                break;
            case SubNodeOrigin::internal_edge:
                s.nodes[i] = x;
                s.node_keys[i] = concat({kInternalEdge, slave.id, o.a, o.b}, element.key);
                s.provenance[i] = {NodeOrigin::slave_interior, -1};
                break;
            case SubNodeOrigin::interior:
                s.nodes[i] = x;
                s.node_keys[i] = concat({kSubInterior, slave.id, o.a, o.b}, element.key);
                s.provenance[i] = {NodeOrigin::slave_interior, -1};
                break;
            }
        }
        for (const auto& eo : part.edges) {
            switch (eo.kind) {
            case SubEdgeOrigin::on_parent: s.edge_markers.push_back(element.edge_markers[eo.edge]); break;
            case SubEdgeOrigin::on_interface: s.edge_markers.push_back(slave.id); break;
            case SubEdgeOrigin::on_internal: s.edge_markers.push_back(kNoMarker); break;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SurfaceElement> restrict_elements(std::vector<SurfaceElement> elements,
                                              std::span<const LevelSetField> slaves, const Tolerances& tol,
                                              Execution exec)
{
    for (const auto& slave : slaves) {
        const long n = static_cast<long>(elements.size());
        std::vector<std::vector<SurfaceElement>> pieces(n);
        detail::for_range(0, n, exec, [&](long i) { pieces[i] = restrict_element(elements[i], slave, tol); }, 64);
        std::vector<SurfaceElement> next;
        for (auto& v : pieces)
            for (auto& e : v)
                next.push_back(std::move(e));
        elements = std::move(next);
    }
    return elements;
}

} // namespace mfforge
