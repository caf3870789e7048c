#pragma once

#include "sll/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace sll {

/// Quadrature point on the reference triangle {xi, eta >= 0, xi + eta <= 1};
/// weights sum to the reference area 1/2.
struct QuadPoint {
    double xi;
    double eta;
    double weight;
};

std::span<const QuadPoint> triangle_rule_degree2();
std::span<const QuadPoint> triangle_rule_degree4();

using Grad = Eigen::Vector2d;

// Reference P2 basis: vertices 0,1,2 at (0,0),(1,0),(0,1); edge nodes 3,4,5
// at the midpoints of edges (0,1), (1,2), (2,0).
std::array<double, 6> p2_shape(double xi, double eta);
std::array<Grad, 6> p2_shape_grad(double xi, double eta);
std::array<double, 3> p1_shape(double xi, double eta);
std::array<Grad, 3> p1_shape_grad();

/// Six geometry nodes of a (possibly curved) quadratic triangle.
struct ElementGeometry {
    std::array<Point, 6> nodes;
    bool curved = false;
};

ElementGeometry element_geometry(const Mesh& mesh, int triangle);

/// Quantities at one quadrature point in physical coordinates.
struct P2Point {
    std::array<double, 6> shape;
    std::array<Grad, 6> grad;
    std::array<double, 3> p1;
    std::array<Grad, 3> p1_grad;
    Point x;
    double weight; // quadrature weight times |det J|
};

/// Evaluates P2 (isoparametric on curved elements) and P1 shape data at the
/// points of `rule`. Throws NumericalError on a degenerate Jacobian.
std::vector<P2Point> evaluate_p2(const ElementGeometry& geom, std::span<const QuadPoint> rule);

/// Morley element on a straight triangle. Degrees of freedom: the three vertex
/// values followed by the normal derivatives at the edge midpoints, taken
/// along the supplied unit normals (edge i joins vertices i and i+1).
class MorleyElement {
public:
    MorleyElement(const std::array<Point, 3>& vertices, const std::array<Eigen::Vector2d, 3>& normals);

    [[nodiscard]] double value(int k, const Point& x) const;
    [[nodiscard]] Grad gradient(int k, const Point& x) const;
    [[nodiscard]] Eigen::Matrix2d hessian(int k) const;
    [[nodiscard]] double area() const { return area_; }
    [[nodiscard]] const std::array<Point, 3>& vertices() const { return vertices_; }

private:
    std::array<Point, 3> vertices_;
    Point centroid_;
    double scale_;
    double area_;
    Eigen::Matrix<double, 6, 6> coef_; // column k: monomial coefficients of basis k
};

/// Global unit normal attached to an edge: the directed edge (min -> max)
/// rotated clockwise.
Eigen::Vector2d edge_reference_normal(const Point& a_min, const Point& b_max);

} // namespace sll
