#pragma once

#include <Eigen/Core>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sll {

using Point = Eigen::Vector2d;

enum class DomainKind { unit_square, unit_disk, annulus, polygon };

/// Geometric description of a flat 2D domain together with the analytic
/// quantities entering the heat-trace coefficients.
struct DomainSpec {
    DomainKind kind = DomainKind::unit_square;
    double inner_radius = 0.0;        // annulus only
    std::vector<Point> vertices;      // polygon only, counterclockwise
    double analytic_area = 1.0;
    double analytic_perimeter = 4.0;
    /// Integral of the boundary curvature over the boundary. For polygons this
    /// is the sum of exterior angles (2*pi), a distributional value.
    double boundary_curvature_integral = 2.0 * 3.14159265358979323846;
    bool curvature_distributional = true;

    static DomainSpec unit_square();
    static DomainSpec unit_disk();
    static DomainSpec annulus(double inner_radius);
    static DomainSpec polygon(std::vector<Point> vertices);

    [[nodiscard]] bool simply_connected() const { return kind != DomainKind::annulus; }
    [[nodiscard]] bool has_curved_boundary() const {
        return kind == DomainKind::unit_disk || kind == DomainKind::annulus;
    }
    [[nodiscard]] std::string name() const;
};

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    int tag = 0; // 0 = outer component, 1 = inner component
};

using EdgeKey = std::pair<int, int>; // (min, max) vertex pair

inline EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

/// Conforming triangulation. Boundary edges are oriented with the domain on
/// their left; curved boundary edges carry the true-boundary midpoint.
struct Mesh {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::map<EdgeKey, Point> curved_midpoints;
    double h_max = 0.0;
    std::optional<DomainSpec> domain;

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices.size()); }
    [[nodiscard]] int num_triangles() const { return static_cast<int>(triangles.size()); }
    [[nodiscard]] bool has_curved_edges() const { return !curved_midpoints.empty(); }
};

/// Edge numbering and incidence derived from a mesh. Local edge i of a
/// triangle joins local vertices i and (i+1)%3.
struct MeshTopology {
    std::vector<EdgeKey> edges;
    std::vector<std::array<int, 3>> triangle_edges;
    std::vector<std::array<int, 2>> edge_triangles; // second entry -1 on the boundary
    std::vector<bool> boundary_edge;
    std::vector<bool> boundary_vertex;
    std::vector<int> edge_tag; // -1 for interior edges

    std::map<EdgeKey, int> lookup;

    [[nodiscard]] int num_edges() const { return static_cast<int>(edges.size()); }
    /// Global edge id of (a,b) in either orientation; throws if absent.
    [[nodiscard]] int edge_index(int a, int b) const;
};

MeshTopology build_topology(const Mesh& mesh);

struct MeshQuantities {
    double area = 0.0;
    double perimeter = 0.0;
};

Mesh generate_mesh(const DomainSpec& spec, double h_target);
Mesh refine_uniform(const Mesh& mesh);
/// Areas and boundary lengths; curved edges use the quadratic boundary geometry.
MeshQuantities mesh_quantities(const Mesh& mesh);

/// Throws InvalidArgument if any structural invariant is violated.
void validate_mesh(const Mesh& mesh);
int euler_characteristic(const Mesh& mesh);
double signed_area(const Point& a, const Point& b, const Point& c);
double longest_edge(const Mesh& mesh);

/// Physical location of the P2 geometry node on edge (a,b): the curved
/// midpoint when the edge is curved, the chord midpoint otherwise.
Point edge_node(const Mesh& mesh, int a, int b);

/// Base mesh (h = 0.5) refined `level` times.
Mesh mesh_for_level(const DomainSpec& spec, int level);

} // namespace sll
