#include "mfforge/mesh_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mfforge {

namespace {

std::string hex(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::istringstream next(const char* what)
    {
        std::string line;
        while (std::getline(in_, line)) {
            ++number_;
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                return std::istringstream(line);
        }
        throw ParseError(std::string("unexpected end of file, expected ") + what, number_ + 1);
    }

    int line() const { return number_; }

private:
    std::istream& in_;
    int number_ = 0;
};

double parse_double(const std::string& tok, int line)
{
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError("bad number '" + tok + "'", line);
    return v;
}

int expect_count(LineReader& r, const char* keyword)
{
    auto ls = r.next(keyword);
    std::string word;
    long n = -1;
    if (!(ls >> word >> n) || word != keyword || n < 0)
        throw ParseError(std::string("expected '") + keyword + " <count>'", r.line());
    return static_cast<int>(n);
}

} // namespace

void write_native(std::ostream& out, const SurfaceMesh& mesh)
{
    out << "MFMESH v1\n" << mesh.dim << ' ' << mesh.order << '\n';
    out << "nodes " << mesh.nodes.size() << '\n';
    for (const auto& x : mesh.nodes) {
        out << hex(x.x()) << ' ' << hex(x.y());
        if (mesh.dim == 3)
            out << ' ' << hex(x.z());
        out << '\n';
    }
    out << "cells " << mesh.cells.size() << '\n';
    for (const auto& c : mesh.cells) {
        out << shape_name(c.shape);
        for (int n : c.nodes)
            out << ' ' << n;
        out << '\n';
    }
    out << "boundary " << mesh.boundary.size() << '\n';
    for (const auto& b : mesh.boundary)
        out << b.cell << ' ' << b.local_edge << ' ' << b.marker << '\n';
}

SurfaceMesh read_native(std::istream& in)
{
    LineReader r(in);
    {
        auto ls = r.next("header");
        std::string magic, version;
        ls >> magic >> version;
        if (magic != "MFMESH" || version != "v1")
            throw ParseError("missing 'MFMESH v1' header", r.line());
    }
    SurfaceMesh mesh;
    {
        auto ls = r.next("dimension and order");
        if (!(ls >> mesh.dim >> mesh.order) || (mesh.dim != 2 && mesh.dim != 3) || mesh.order < 1 || mesh.order > 6)
            throw ParseError("expected '<dim 2|3> <order 1..6>'", r.line());
    }
    const int nn = expect_count(r, "nodes");
    mesh.nodes.reserve(nn);
    for (int i = 0; i < nn; ++i) {
        auto ls = r.next("node coordinates");
        Vec3 x = Vec3::Zero();
        for (int a = 0; a < mesh.dim; ++a) {
            std::string tok;
            if (!(ls >> tok))
                throw ParseError("node line needs " + std::to_string(mesh.dim) + " coordinates", r.line());
            x[a] = parse_double(tok, r.line());
        }
        std::string extra;
        if (ls >> extra)
            throw ParseError("trailing data on node line", r.line());
        mesh.nodes.push_back(x);
    }
    const int nc = expect_count(r, "cells");
    for (int i = 0; i < nc; ++i) {
        auto ls = r.next("cell");
        std::string name;
        ls >> name;
        SurfaceCell c;
        try {
            c.shape = shape_from_name(name);
        }
        catch (const ArgumentError&) {
            throw ParseError("unknown cell shape '" + name + "'", r.line());
        }
        long id;
        while (ls >> id) {
            if (id < 0 || id >= nn)
                throw ParseError("node id out of range", r.line());
            c.nodes.push_back(static_cast<int>(id));
        }
        if (!ls.eof())
            throw ParseError("bad node id", r.line());
        if (static_cast<int>(c.nodes.size()) != lattice_size(c.shape, mesh.order))
            throw ParseError("cell has the wrong number of nodes for its shape", r.line());
        mesh.cells.push_back(std::move(c));
    }
    const int nb = expect_count(r, "boundary");
    for (int i = 0; i < nb; ++i) {
        auto ls = r.next("boundary edge");
        BoundaryEdge b;
        if (!(ls >> b.cell >> b.local_edge >> b.marker))
            throw ParseError("expected '<cell> <localedge> <marker>'", r.line());
        if (b.cell < 0 || b.cell >= nc || b.local_edge < 0 || b.local_edge >= num_edges(mesh.cells[b.cell].shape))
            throw ParseError("boundary edge refers to a missing cell edge", r.line());
        mesh.boundary.push_back(b);
    }
    return mesh;
}

void export_native(const SurfaceMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_native(out, mesh);
    if (!out)
        throw Error("write to '" + path + "' failed");
}

SurfaceMesh import_native(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "'");
    return read_native(in);
}

std::vector<std::vector<int>> lattice_subcells(Shape shape, int p)
{
    std::vector<std::vector<int>> out;
    switch (shape) {
    case Shape::line:
        for (int k = 0; k < p; ++k)
            out.push_back({k, k + 1});
        break;
    case Shape::quad:
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < p; ++i)
                out.push_back({lattice_index(shape, p, i, j), lattice_index(shape, p, i + 1, j),
                               lattice_index(shape, p, i + 1, j + 1), lattice_index(shape, p, i, j + 1)});
        break;
    case Shape::tri:
        for (int j = 0; j < p; ++j)
            for (int i = 0; i + j < p; ++i) {
                out.push_back({lattice_index(shape, p, i, j), lattice_index(shape, p, i + 1, j),
                               lattice_index(shape, p, i, j + 1)});
                if (i + j + 1 < p)
                    out.push_back({lattice_index(shape, p, i + 1, j), lattice_index(shape, p, i + 1, j + 1),
                                   lattice_index(shape, p, i, j + 1)});
            }
        break;
    }
    return out;
}

void write_visualization(std::ostream& out, const SurfaceMesh& mesh, std::span<const NamedField> fields)
{
    for (const auto& f : fields)
        if (f.values.size() != mesh.nodes.size())
            throw ArgumentError("field '" + f.name + "' does not match the node count");
    std::vector<std::vector<int>> cells;
    std::vector<int> types;
    for (const auto& c : mesh.cells)
        for (const auto& sub : lattice_subcells(c.shape, mesh.order)) {
            std::vector<int> ids;
            for (int idx : sub)
                ids.push_back(c.nodes[idx]);
            cells.push_back(std::move(ids));
            types.push_back(c.shape == Shape::line ? 3 : (c.shape == Shape::tri ? 5 : 9));
        }
    std::size_t total = 0;
    for (const auto& c : cells)
        total += c.size() + 1;

    out << "# vtk DataFile Version 3.0\nmfforge surface mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.nodes.size() << " double\n";
    out.precision(17);
    for (const auto& x : mesh.nodes)
        out << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
    out << "CELLS " << cells.size() << ' ' << total << '\n';
    for (const auto& c : cells) {
        out << c.size();
        for (int id : c)
            out << ' ' << id;
        out << '\n';
    }
    out << "CELL_TYPES " << types.size() << '\n';
    for (int t : types)
        out << t << '\n';
    if (fields.empty())
        return;
    out << "POINT_DATA " << mesh.nodes.size() << '\n';
    for (const auto& f : fields) {
        out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : f.values)
            out << v << '\n';
    }
}

void export_visualization(const SurfaceMesh& mesh, std::span<const NamedField> fields, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_visualization(out, mesh, fields);
    if (!out)
        throw Error("write to '" + path + "' failed");
}

} // namespace mfforge
