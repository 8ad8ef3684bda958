#include "mfforge/lattice.hpp"

namespace mfforge {

const char* shape_name(Shape s)
{
    switch (s) {
    case Shape::line: return "line";
    case Shape::tri: return "tri";
    case Shape::quad: return "quad";
    }
    return "?";
}

Shape shape_from_name(const std::string& name)
{
    if (name == "line")
        return Shape::line;
    if (name == "tri")
        return Shape::tri;
    if (name == "quad")
        return Shape::quad;
    throw ArgumentError("unknown cell shape '" + name + "'");
}

int lattice_size(Shape s, int p)
{
    switch (s) {
    case Shape::line: return p + 1;
    case Shape::tri: return (p + 1) * (p + 2) / 2;
    case Shape::quad: return (p + 1) * (p + 1);
    }
    return 0;
}

int lattice_index(Shape s, int p, int i, int j)
{
    switch (s) {
    case Shape::line: return i;
    case Shape::tri: return j * (p + 1) - j * (j - 1) / 2 + i;
    case Shape::quad: return j * (p + 1) + i;
    }
    return -1;
}

std::array<int, 2> lattice_coords(Shape s, int p, int idx)
{
    switch (s) {
    case Shape::line: return {idx, 0};
    case Shape::quad: return {idx % (p + 1), idx / (p + 1)};
    case Shape::tri: {
        int j = 0;
        while (idx >= p + 1 - j) {
            idx -= p + 1 - j;
            ++j;
        }
        return {idx, j};
    }
    }
    return {0, 0};
}

Vec2 lattice_point(Shape s, int p, int idx)
{
    auto [i, j] = lattice_coords(s, p, idx);
    return {static_cast<double>(i) / p, static_cast<double>(j) / p};
}

int num_corners(Shape s) { return s == Shape::line ? 2 : (s == Shape::tri ? 3 : 4); }

int num_edges(Shape s) { return num_corners(s); }

std::array<int, 2> edge_corners(Shape s, int edge)
{
    if (s == Shape::line)
        return {edge, edge};
    return {edge, (edge + 1) % num_corners(s)};
}

std::vector<int> corner_indices(Shape s, int p)
{
    switch (s) {
    case Shape::line: return {0, p};
    case Shape::tri: return {0, p, lattice_index(s, p, 0, p)};
    case Shape::quad: return {0, p, lattice_index(s, p, p, p), lattice_index(s, p, 0, p)};
    }
    return {};
}

std::vector<int> edge_indices(Shape s, int p, int edge)
{
    if (s == Shape::line)
        return {edge == 0 ? 0 : p};
    std::vector<int> out(p + 1);
    for (int k = 0; k <= p; ++k) {
        int i = 0, j = 0;
        if (s == Shape::tri) {
            switch (edge) {
            case 0: i = k, j = 0; break;
            case 1: i = p - k, j = k; break;
            default: i = 0, j = p - k; break;
            }
        }
        else {
            switch (edge) {
            case 0: i = k, j = 0; break;
            case 1: i = p, j = k; break;
            case 2: i = p - k, j = p; break;
            default: i = 0, j = p - k; break;
            }
        }
        out[k] = lattice_index(s, p, i, j);
    }
    return out;
}

Vec2 edge_point(Shape s, int edge, double t)
{
    if (s == Shape::line)
        return {edge == 0 ? 0.0 : 1.0, 0.0};
    if (s == Shape::tri) {
        switch (edge) {
        case 0: return {t, 0.0};
        case 1: return {1.0 - t, t};
        default: return {0.0, 1.0 - t};
        }
    }
    switch (edge) {
    case 0: return {t, 0.0};
    case 1: return {1.0, t};
    case 2: return {1.0 - t, 1.0};
    default: return {0.0, 1.0 - t};
    }
}

bool is_boundary_index(Shape s, int p, int idx)
{
    auto [i, j] = lattice_coords(s, p, idx);
    switch (s) {
    case Shape::line: return i == 0 || i == p;
    case Shape::tri: return i == 0 || j == 0 || i + j == p;
    case Shape::quad: return i == 0 || j == 0 || i == p || j == p;
    }
    return false;
}

double lagrange_1d(int p, int k, double t)
{
    double v = 1.0;
    for (int a = 0; a <= p; ++a)
        if (a != k)
            v *= (p * t - a) / (k - a);
    return v;
}

void lagrange_1d_all(int p, double t, std::span<double> N, std::span<double> dN)
{
    const double s = p * t;
    for (int k = 0; k <= p; ++k) {
        double v = 1.0;
        for (int a = 0; a <= p; ++a)
            if (a != k)
                v *= (s - a) / (k - a);
        N[k] = v;
        if (dN.empty())
            continue;
        double d = 0.0;
        for (int m = 0; m <= p; ++m) {
            if (m == k)
                continue;
            double term = static_cast<double>(p) / (k - m);
            for (int a = 0; a <= p; ++a)
                if (a != k && a != m)
                    term *= (s - a) / (k - a);
            d += term;
        }
        dN[k] = d;
    }
}

} // namespace mfforge
