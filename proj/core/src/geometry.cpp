#include "sll/geometry.hpp"

#include "sll/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace sll {

namespace {

constexpr double kPi = std::numbers::pi;

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    auto orient = [](const Point& a, const Point& b, const Point& c) {
        const double v = signed_area(a, b, c);
        return (v > 0.0) - (v < 0.0);
    };
    auto on_segment = [](const Point& a, const Point& b, const Point& p) {
        return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
               std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
    };
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

double polygon_signed_area(const std::vector<Point>& v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

void orient_ccw(Mesh& mesh) {
    for (auto& t : mesh.triangles) {
        if (signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) < 0.0) {
            std::swap(t[1], t[2]);
        }
    }
}

Point project_to_circle(const Point& p, double radius) { return p * (radius / p.norm()); }

Point quadratic_curve(const Point& a, const Point& m, const Point& b, double s) {
    return a * ((1.0 - s) * (1.0 - 2.0 * s)) + m * (4.0 * s * (1.0 - s)) + b * (s * (2.0 * s - 1.0));
}

// Structured union-jack grid on [0,1]^2. N is forced even so the mesh has the
// full symmetry group of the square.
Mesh square_mesh(double h) {
    int n = static_cast<int>(std::ceil(1.0 / h - 1e-12));
    if (n % 2 != 0) ++n;
    Mesh mesh;
    const int stride = n + 1;
    auto id = [stride](int i, int j) { return j * stride + i; };
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            mesh.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
            if ((i + j) % 2 == 0) {
                mesh.triangles.push_back({v00, v10, v11});
                mesh.triangles.push_back({v00, v11, v01});
            } else {
                mesh.triangles.push_back({v00, v10, v01});
                mesh.triangles.push_back({v10, v11, v01});
            }
        }
    }
    for (int i = 0; i < n; ++i) mesh.boundary_edges.push_back({id(i, 0), id(i + 1, 0), 0});
    for (int j = 0; j < n; ++j) mesh.boundary_edges.push_back({id(n, j), id(n, j + 1), 0});
    for (int i = n; i > 0; --i) mesh.boundary_edges.push_back({id(i, n), id(i - 1, n), 0});
    for (int j = n; j > 0; --j) mesh.boundary_edges.push_back({id(0, j), id(0, j - 1), 0});
    return mesh;
}

// Polar mesh: ring r (r = 1..L) carries 8r vertices at radius r/L; each of
// the 8 sectors is triangulated identically, so the mesh is invariant under
// rotation by pi/4.
Mesh disk_mesh(double h) {
    constexpr int kSectors = 8;
    const int rings = std::max(1, static_cast<int>(std::ceil(1.0 / h - 1e-12)));
    Mesh mesh;
    mesh.vertices.emplace_back(0.0, 0.0);
    std::vector<int> ring_start{0};
    for (int r = 1; r <= rings; ++r) {
        ring_start.push_back(mesh.num_vertices());
        const int count = kSectors * r;
        const double radius = static_cast<double>(r) / rings;
        for (int j = 0; j < count; ++j) {
            const double theta = 2.0 * kPi * j / count;
            if (r == rings) {
                mesh.vertices.emplace_back(std::cos(theta), std::sin(theta));
            } else {
                mesh.vertices.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
            }
        }
    }
    auto ring_vertex = [&](int r, int j) {
        if (r == 0) return 0;
        const int count = kSectors * r;
        return ring_start[r] + ((j % count) + count) % count;
    };
    for (int r = 1; r <= rings; ++r) {
        const int inner = r - 1;
        for (int s = 0; s < kSectors; ++s) {
            int a = 0, b = 0; // local positions within the sector on inner/outer ring
            while (a < inner || b < r) {
                bool advance_outer;
                if (a == inner) {
                    advance_outer = true;
                } else if (b == r) {
                    advance_outer = false;
                } else {
                    const double next_inner = static_cast<double>(a + 1) / inner;
                    const double next_outer = static_cast<double>(b + 1) / r;
                    advance_outer = next_outer <= next_inner;
                }
                const int vi = ring_vertex(inner, s * inner + a);
                const int vo = ring_vertex(r, s * r + b);
                if (advance_outer) {
                    mesh.triangles.push_back({vi, vo, ring_vertex(r, s * r + b + 1)});
                    ++b;
                } else {
                    mesh.triangles.push_back({vi, vo, ring_vertex(inner, s * inner + a + 1)});
                    ++a;
                }
            }
        }
    }
    const int outer = kSectors * rings;
    for (int j = 0; j < outer; ++j) {
        const int a = ring_vertex(rings, j);
        const int b = ring_vertex(rings, j + 1);
        mesh.boundary_edges.push_back({a, b, 0});
        mesh.curved_midpoints[edge_key(a, b)] =
            project_to_circle(0.5 * (mesh.vertices[a] + mesh.vertices[b]), 1.0);
    }
    return mesh;
}

Mesh annulus_mesh(double r0, double h) {
    const int layers = std::max(1, static_cast<int>(std::ceil((1.0 - r0) / h - 1e-12)));
    const int per_ring = 8 * std::max(1, static_cast<int>(std::ceil(2.0 * kPi / (8.0 * h) - 1e-12)));
    Mesh mesh;
    for (int l = 0; l <= layers; ++l) {
        const double radius = (l == layers) ? 1.0 : (l == 0 ? r0 : r0 + (1.0 - r0) * l / layers);
        for (int j = 0; j < per_ring; ++j) {
            const double theta = 2.0 * kPi * j / per_ring;
            mesh.vertices.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
        }
    }
    auto id = [per_ring](int l, int j) { return l * per_ring + ((j % per_ring) + per_ring) % per_ring; };
    for (int l = 0; l < layers; ++l) {
        for (int j = 0; j < per_ring; ++j) {
            const int a = id(l, j), b = id(l, j + 1), c = id(l + 1, j), d = id(l + 1, j + 1);
            mesh.triangles.push_back({a, b, d});
            mesh.triangles.push_back({a, d, c});
        }
    }
    for (int j = 0; j < per_ring; ++j) {
        const int a = id(layers, j), b = id(layers, j + 1);
        mesh.boundary_edges.push_back({a, b, 0});
        mesh.curved_midpoints[edge_key(a, b)] =
            project_to_circle(0.5 * (mesh.vertices[a] + mesh.vertices[b]), 1.0);
    }
    for (int j = 0; j < per_ring; ++j) {
        const int a = id(0, j + 1), b = id(0, j); // clockwise: domain on the left
        mesh.boundary_edges.push_back({a, b, 1});
        mesh.curved_midpoints[edge_key(a, b)] =
            project_to_circle(0.5 * (mesh.vertices[a] + mesh.vertices[b]), r0);
    }
    return mesh;
}

bool point_in_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
    return signed_area(a, b, p) >= 0.0 && signed_area(b, c, p) >= 0.0 && signed_area(c, a, p) >= 0.0;
}

// Ear clipping of a simple counterclockwise polygon.
Mesh polygon_mesh(const std::vector<Point>& poly) {
    Mesh mesh;
    mesh.vertices = poly;
    const int n = static_cast<int>(poly.size());
    std::vector<int> ring(n);
    for (int i = 0; i < n; ++i) ring[i] = i;
    while (ring.size() > 3) {
        const int m = static_cast<int>(ring.size());
        int best = -1;
        double best_quality = -1.0;
        for (int i = 0; i < m; ++i) {
            const int ia = ring[(i + m - 1) % m], ib = ring[i], ic = ring[(i + 1) % m];
            const Point &a = poly[ia], &b = poly[ib], &c = poly[ic];
            const double area = signed_area(a, b, c);
            if (area <= 0.0) continue;
            bool contains = false;
            for (int j = 0; j < m && !contains; ++j) {
                const int v = ring[j];
                if (v == ia || v == ib || v == ic) continue;
                contains = point_in_triangle(poly[v], a, b, c);
            }
            if (contains) continue;
            // Prefer well-shaped ears.
            const double perim2 = (b - a).squaredNorm() + (c - b).squaredNorm() + (a - c).squaredNorm();
            const double quality = area / perim2;
            if (quality > best_quality) {
                best_quality = quality;
                best = i;
            }
        }
        if (best < 0) throw InvalidArgument("polygon triangulation failed: no ear found");
        const int m2 = static_cast<int>(ring.size());
        mesh.triangles.push_back({ring[(best + m2 - 1) % m2], ring[best], ring[(best + 1) % m2]});
        ring.erase(ring.begin() + best);
    }
    mesh.triangles.push_back({ring[0], ring[1], ring[2]});
    for (int i = 0; i < n; ++i) mesh.boundary_edges.push_back({i, (i + 1) % n, 0});
    return mesh;
}

} // namespace

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

DomainSpec DomainSpec::unit_square() {
    DomainSpec d;
    d.kind = DomainKind::unit_square;
    d.analytic_area = 1.0;
    d.analytic_perimeter = 4.0;
    d.boundary_curvature_integral = 2.0 * kPi;
    d.curvature_distributional = true;
    return d;
}

DomainSpec DomainSpec::unit_disk() {
    DomainSpec d;
    d.kind = DomainKind::unit_disk;
    d.analytic_area = kPi;
    d.analytic_perimeter = 2.0 * kPi;
    d.boundary_curvature_integral = 2.0 * kPi;
    d.curvature_distributional = false;
    return d;
}

DomainSpec DomainSpec::annulus(double inner_radius) {
    SLL_REQUIRE(inner_radius > 0.0 && inner_radius < 1.0, "annulus inner radius must lie in (0,1)");
    DomainSpec d;
    d.kind = DomainKind::annulus;
    d.inner_radius = inner_radius;
    d.analytic_area = kPi * (1.0 - inner_radius * inner_radius);
    d.analytic_perimeter = 2.0 * kPi * (1.0 + inner_radius);
    // Outer circle contributes +2pi, the inner one (curving away from the domain) -2pi.
    d.boundary_curvature_integral = 0.0;
    d.curvature_distributional = false;
    return d;
}

DomainSpec DomainSpec::polygon(std::vector<Point> vertices) {
    SLL_REQUIRE(vertices.size() >= 3, "polygon needs at least 3 vertices");
    const int n = static_cast<int>(vertices.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])) {
                throw InvalidArgument("polygon is self-intersecting");
            }
        }
    }
    const double area = polygon_signed_area(vertices);
    SLL_REQUIRE(area > 0.0, "polygon vertices must be counterclockwise with positive area");
    DomainSpec d;
    d.kind = DomainKind::polygon;
    d.analytic_area = area;
    double perimeter = 0.0;
    for (int i = 0; i < n; ++i) perimeter += (vertices[(i + 1) % n] - vertices[i]).norm();
    d.analytic_perimeter = perimeter;
    d.boundary_curvature_integral = 2.0 * kPi;
    d.curvature_distributional = true;
    d.vertices = std::move(vertices);
    return d;
}

std::string DomainSpec::name() const {
    switch (kind) {
    case DomainKind::unit_square: return "square";
    case DomainKind::unit_disk: return "disk";
    case DomainKind::annulus: {
        std::ostringstream os;
        os << "annulus:" << inner_radius;
        return os.str();
    }
    case DomainKind::polygon: return "polygon";
    }
    return "unknown";
}

int MeshTopology::edge_index(int a, int b) const {
    auto it = lookup.find(edge_key(a, b));
    if (it == lookup.end()) throw InvalidArgument("edge not present in mesh");
    return it->second;
}

MeshTopology build_topology(const Mesh& mesh) {
    MeshTopology topo;
    topo.triangle_edges.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const EdgeKey key = edge_key(tri[i], tri[(i + 1) % 3]);
            auto [it, inserted] = topo.lookup.emplace(key, topo.num_edges());
            if (inserted) {
                topo.edges.push_back(key);
                topo.edge_triangles.push_back({static_cast<int>(t), -1});
            } else {
                auto& et = topo.edge_triangles[it->second];
                if (et[1] != -1) throw InvalidArgument("non-manifold edge in mesh");
                et[1] = static_cast<int>(t);
            }
            topo.triangle_edges[t][i] = it->second;
        }
    }
    topo.boundary_edge.assign(topo.edges.size(), false);
    topo.edge_tag.assign(topo.edges.size(), -1);
    topo.boundary_vertex.assign(mesh.vertices.size(), false);
    for (const auto& be : mesh.boundary_edges) {
        const int e = topo.edge_index(be.a, be.b);
        topo.boundary_edge[e] = true;
        topo.edge_tag[e] = be.tag;
        topo.boundary_vertex[be.a] = true;
        topo.boundary_vertex[be.b] = true;
    }
    return topo;
}

double longest_edge(const Mesh& mesh) {
    double h = 0.0;
    for (const auto& t : mesh.triangles) {
        for (int i = 0; i < 3; ++i) {
            h = std::max(h, (mesh.vertices[t[i]] - mesh.vertices[t[(i + 1) % 3]]).norm());
        }
    }
    return h;
}

Point edge_node(const Mesh& mesh, int a, int b) {
    if (!mesh.curved_midpoints.empty()) {
        auto it = mesh.curved_midpoints.find(edge_key(a, b));
        if (it != mesh.curved_midpoints.end()) return it->second;
    }
    return 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
}

Mesh generate_mesh(const DomainSpec& spec, double h_target) {
    SLL_REQUIRE(h_target > 0.0 && h_target <= 1.0, "h_target must lie in (0, 1]");
    Mesh mesh;
    switch (spec.kind) {
    case DomainKind::unit_square: mesh = square_mesh(h_target); break;
    case DomainKind::unit_disk: mesh = disk_mesh(h_target); break;
    case DomainKind::annulus: mesh = annulus_mesh(spec.inner_radius, h_target); break;
    case DomainKind::polygon: {
        // Re-validate: a DomainSpec may have been edited after construction.
        const DomainSpec checked = DomainSpec::polygon(spec.vertices);
        mesh = polygon_mesh(checked.vertices);
        mesh.domain = checked;
        orient_ccw(mesh);
        mesh.h_max = longest_edge(mesh);
        while (mesh.h_max > 1.5 * h_target) mesh = refine_uniform(mesh);
        validate_mesh(mesh);
        return mesh;
    }
    }
    orient_ccw(mesh);
    mesh.domain = spec;
    mesh.h_max = longest_edge(mesh);
    validate_mesh(mesh);
    return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
    SLL_REQUIRE(!mesh.triangles.empty(), "cannot refine an empty mesh");
    const MeshTopology topo = build_topology(mesh);
    Mesh out;
    out.domain = mesh.domain;
    out.vertices = mesh.vertices;
    const int nv = mesh.num_vertices();
    for (const auto& e : topo.edges) out.vertices.push_back(edge_node(mesh, e.first, e.second));

    out.triangles.reserve(4 * mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& v = mesh.triangles[t];
        const auto& te = topo.triangle_edges[t];
        const int m01 = nv + te[0], m12 = nv + te[1], m20 = nv + te[2];
        out.triangles.push_back({v[0], m01, m20});
        out.triangles.push_back({m01, v[1], m12});
        out.triangles.push_back({m20, m12, v[2]});
        out.triangles.push_back({m01, m12, m20});
    }

    const bool circular = mesh.domain && mesh.domain->has_curved_boundary();
    for (const auto& be : mesh.boundary_edges) {
        const int mid = nv + topo.edge_index(be.a, be.b);
        out.boundary_edges.push_back({be.a, mid, be.tag});
        out.boundary_edges.push_back({mid, be.b, be.tag});
        auto it = mesh.curved_midpoints.find(edge_key(be.a, be.b));
        if (it == mesh.curved_midpoints.end()) continue;
        const Point& a = mesh.vertices[be.a];
        const Point& b = mesh.vertices[be.b];
        const Point& m = it->second;
        Point q1, q2;
        if (circular) {
            const double radius = 0.5 * (a.norm() + b.norm());
            q1 = project_to_circle(0.5 * (a + m), radius);
            q2 = project_to_circle(0.5 * (m + b), radius);
        } else {
            q1 = quadratic_curve(a, m, b, 0.25);
            q2 = quadratic_curve(a, m, b, 0.75);
        }
        out.curved_midpoints[edge_key(be.a, mid)] = q1;
        out.curved_midpoints[edge_key(mid, be.b)] = q2;
    }
    orient_ccw(out);
    out.h_max = longest_edge(out);
    return out;
}

MeshQuantities mesh_quantities(const Mesh& mesh) {
    // Gauss-Legendre, 5 points on [0,1]: exact for the quadratic-map Jacobian
    // determinant and accurate for the arc-length integrand.
    static constexpr std::array<double, 5> gx = {0.046910077030668, 0.230765344947158, 0.5,
                                                 0.769234655052842, 0.953089922969332};
    static constexpr std::array<double, 5> gw = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                                                 0.239314335249683, 0.118463442528095};
    MeshQuantities q;
    const bool curved = mesh.has_curved_edges();
    for (const auto& t : mesh.triangles) {
        const Point& a = mesh.vertices[t[0]];
        const Point& b = mesh.vertices[t[1]];
        const Point& c = mesh.vertices[t[2]];
        double area = signed_area(a, b, c);
        if (curved) {
            // Curved edge adds the area between the chord and the quadratic arc:
            // (2/3) * chord x sagitta, signed outward.
            for (int i = 0; i < 3; ++i) {
                const int ia = t[i], ib = t[(i + 1) % 3];
                auto it = mesh.curved_midpoints.find(edge_key(ia, ib));
                if (it == mesh.curved_midpoints.end()) continue;
                const Point& pa = mesh.vertices[ia];
                const Point& pb = mesh.vertices[ib];
                const Point bulge = it->second - 0.5 * (pa + pb);
                const Point chord = pb - pa;
                // Outward normal of a ccw edge is (dy, -dx).
                const double cross = chord.x() * bulge.y() - chord.y() * bulge.x();
                area -= (2.0 / 3.0) * cross;
            }
        }
        q.area += area;
    }
    for (const auto& be : mesh.boundary_edges) {
        const Point& a = mesh.vertices[be.a];
        const Point& b = mesh.vertices[be.b];
        auto it = curved ? mesh.curved_midpoints.find(edge_key(be.a, be.b)) : mesh.curved_midpoints.end();
        if (it == mesh.curved_midpoints.end()) {
            q.perimeter += (b - a).norm();
            continue;
        }
        const Point& m = it->second;
        double len = 0.0;
        for (int g = 0; g < 5; ++g) {
            const double s = gx[g];
            const Point d = a * (4.0 * s - 3.0) + m * (4.0 - 8.0 * s) + b * (4.0 * s - 1.0);
            len += gw[g] * d.norm();
        }
        q.perimeter += len;
    }
    return q;
}

int euler_characteristic(const Mesh& mesh) {
    std::set<EdgeKey> edges;
    for (const auto& t : mesh.triangles) {
        for (int i = 0; i < 3; ++i) edges.insert(edge_key(t[i], t[(i + 1) % 3]));
    }
    return mesh.num_vertices() - static_cast<int>(edges.size()) + mesh.num_triangles();
}

void validate_mesh(const Mesh& mesh) {
    SLL_REQUIRE(!mesh.triangles.empty(), "mesh has no triangles");
    for (const auto& t : mesh.triangles) {
        for (int i : t) SLL_REQUIRE(i >= 0 && i < mesh.num_vertices(), "triangle index out of range");
        SLL_REQUIRE(signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) > 0.0,
                    "triangle with non-positive signed area");
    }
    const MeshTopology topo = build_topology(mesh);
    // Every boundary edge belongs to exactly one triangle and every edge with a
    // single triangle is a boundary edge.
    int open_edges = 0;
    for (int e = 0; e < topo.num_edges(); ++e) {
        const bool single = topo.edge_triangles[e][1] == -1;
        open_edges += single ? 1 : 0;
        SLL_REQUIRE(single == topo.boundary_edge[e], "boundary edge list does not match mesh topology");
    }
    SLL_REQUIRE(open_edges == static_cast<int>(mesh.boundary_edges.size()), "duplicate boundary edges");
    // Closed loops: every boundary vertex has in-degree = out-degree = 1.
    std::map<int, int> out_deg, in_deg;
    for (const auto& be : mesh.boundary_edges) {
        ++out_deg[be.a];
        ++in_deg[be.b];
    }
    for (const auto& [v, d] : out_deg) {
        SLL_REQUIRE(d == 1 && in_deg[v] == 1, "boundary edges do not form closed loops");
    }
    SLL_REQUIRE(in_deg.size() == out_deg.size(), "boundary edges do not form closed loops");
}

Mesh mesh_for_level(const DomainSpec& spec, int level) {
    SLL_REQUIRE(level >= 0 && level <= 8, "refinement level must lie in [0, 8]");
    Mesh mesh = generate_mesh(spec, 0.5);
    for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
    return mesh;
}

} // namespace sll
