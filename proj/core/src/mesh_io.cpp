#include "sll/mesh_io.hpp"

#include "sll/error.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sll {

namespace {

template <typename T>
T next_value(std::istream& is, const char* what) {
    T v{};
    if (!(is >> v)) throw ParseError(std::string("mesh file: expected ") + what);
    return v;
}

} // namespace

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << kMeshMagic << '\n';
    os << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' ' << mesh.boundary_edges.size() << '\n';
    os << std::setprecision(17);
    for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << '\n';
    for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& b : mesh.boundary_edges) os << b.a << ' ' << b.b << ' ' << b.tag << '\n';
    os << mesh.curved_midpoints.size() << '\n';
    for (const auto& [key, p] : mesh.curved_midpoints) {
        os << key.first << ' ' << key.second << ' ' << p.x() << ' ' << p.y() << '\n';
    }
}

Mesh read_mesh(std::istream& is) {
    std::string magic;
    std::getline(is, magic);
    while (!magic.empty() && (magic.back() == '\r' || magic.back() == ' ')) magic.pop_back();
    if (magic != kMeshMagic) throw ParseError("mesh file: missing 'SLLMESH 1' header");
    Mesh mesh;
    const auto nv = next_value<long>(is, "vertex count");
    const auto nt = next_value<long>(is, "triangle count");
    const auto nb = next_value<long>(is, "boundary edge count");
    if (nv < 3 || nt < 1 || nb < 3) throw ParseError("mesh file: invalid header counts");
    mesh.vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        const double x = next_value<double>(is, "vertex x");
        const double y = next_value<double>(is, "vertex y");
        mesh.vertices.emplace_back(x, y);
    }
    auto index = [&](const char* what) {
        const long v = next_value<long>(is, what);
        if (v < 0 || v >= nv) throw ParseError(std::string("mesh file: ") + what + " out of range");
        return static_cast<int>(v);
    };
    for (long t = 0; t < nt; ++t) {
        const int a = index("triangle vertex"), b = index("triangle vertex"), c = index("triangle vertex");
        mesh.triangles.push_back({a, b, c});
    }
    for (long e = 0; e < nb; ++e) {
        const int a = index("boundary vertex"), b = index("boundary vertex");
        const int tag = next_value<int>(is, "boundary tag");
        mesh.boundary_edges.push_back({a, b, tag});
    }
    long nc = 0;
    if (is >> nc) {
        for (long c = 0; c < nc; ++c) {
            const int a = index("curved edge vertex"), b = index("curved edge vertex");
            const double x = next_value<double>(is, "curved midpoint x");
            const double y = next_value<double>(is, "curved midpoint y");
            mesh.curved_midpoints[edge_key(a, b)] = Point(x, y);
        }
    }
    mesh.h_max = longest_edge(mesh);
    validate_mesh(mesh);
    return mesh;
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open '" + path + "' for writing");
    write_mesh(os, mesh);
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open mesh file '" + path + "'");
    return read_mesh(is);
}

DomainSpec read_polygon_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open polygon file '" + path + "'");
    std::vector<Point> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x >> y)) {
            throw ParseError("polygon file line " + std::to_string(lineno) + ": expected 'x y'");
        }
        pts.emplace_back(x, y);
    }
    return DomainSpec::polygon(std::move(pts));
}

} // namespace sll
