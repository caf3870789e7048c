#include "sll/elements.hpp"

#include "sll/error.hpp"

#include <Eigen/LU>

#include <cmath>

namespace sll {

namespace {

constexpr double kA1 = 0.445948490915964886318329253883;
constexpr double kW1 = 0.223381589678011465944624280882;
constexpr double kA2 = 0.091576213509770743459571463402;
constexpr double kW2 = 0.109951743655321867388708619118;

constexpr std::array<QuadPoint, 6> kDegree4 = {{
    {kA1, kA1, 0.5 * kW1},
    {1.0 - 2.0 * kA1, kA1, 0.5 * kW1},
    {kA1, 1.0 - 2.0 * kA1, 0.5 * kW1},
    {kA2, kA2, 0.5 * kW2},
    {1.0 - 2.0 * kA2, kA2, 0.5 * kW2},
    {kA2, 1.0 - 2.0 * kA2, 0.5 * kW2},
}};

constexpr std::array<QuadPoint, 3> kDegree2 = {{
    {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0},
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
}};

} // namespace

std::span<const QuadPoint> triangle_rule_degree2() { return kDegree2; }
std::span<const QuadPoint> triangle_rule_degree4() { return kDegree4; }

std::array<double, 6> p2_shape(double xi, double eta) {
    const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
    return {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
            4.0 * l0 * l1,         4.0 * l1 * l2,         4.0 * l2 * l0};
}

std::array<Grad, 6> p2_shape_grad(double xi, double eta) {
    const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
    const Grad g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);
    return {(4.0 * l0 - 1.0) * g0, (4.0 * l1 - 1.0) * g1, (4.0 * l2 - 1.0) * g2,
            4.0 * (l0 * g1 + l1 * g0), 4.0 * (l1 * g2 + l2 * g1), 4.0 * (l2 * g0 + l0 * g2)};
}

std::array<double, 3> p1_shape(double xi, double eta) { return {1.0 - xi - eta, xi, eta}; }

std::array<Grad, 3> p1_shape_grad() { return {Grad(-1.0, -1.0), Grad(1.0, 0.0), Grad(0.0, 1.0)}; }

ElementGeometry element_geometry(const Mesh& mesh, int triangle) {
    const auto& t = mesh.triangles[triangle];
    ElementGeometry g;
    for (int i = 0; i < 3; ++i) g.nodes[i] = mesh.vertices[t[i]];
    for (int i = 0; i < 3; ++i) {
        const int a = t[i], b = t[(i + 1) % 3];
        g.nodes[3 + i] = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
        if (mesh.has_curved_edges()) {
            auto it = mesh.curved_midpoints.find(edge_key(a, b));
            if (it != mesh.curved_midpoints.end()) {
                g.nodes[3 + i] = it->second;
                g.curved = true;
            }
        }
    }
    return g;
}

std::vector<P2Point> evaluate_p2(const ElementGeometry& geom, std::span<const QuadPoint> rule) {
    std::vector<P2Point> out;
    out.reserve(rule.size());
    const auto p1g = p1_shape_grad();
    Eigen::Matrix2d jac_affine;
    if (!geom.curved) {
        jac_affine.col(0) = geom.nodes[1] - geom.nodes[0];
        jac_affine.col(1) = geom.nodes[2] - geom.nodes[0];
    }
    for (const auto& q : rule) {
        P2Point p;
        p.shape = p2_shape(q.xi, q.eta);
        const auto ref = p2_shape_grad(q.xi, q.eta);
        Eigen::Matrix2d jac;
        p.x.setZero();
        if (geom.curved) {
            jac.setZero();
            for (int k = 0; k < 6; ++k) {
                jac += geom.nodes[k] * ref[k].transpose();
                p.x += p.shape[k] * geom.nodes[k];
            }
        } else {
            jac = jac_affine;
            const auto l = p1_shape(q.xi, q.eta);
            p.x = l[0] * geom.nodes[0] + l[1] * geom.nodes[1] + l[2] * geom.nodes[2];
        }
        const double det = jac.determinant();
        if (!(det > 0.0)) throw NumericalError("degenerate or inverted element Jacobian");
        const Eigen::Matrix2d inv_t = jac.inverse().transpose();
        for (int k = 0; k < 6; ++k) p.grad[k] = inv_t * ref[k];
        p.p1 = p1_shape(q.xi, q.eta);
        for (int k = 0; k < 3; ++k) p.p1_grad[k] = inv_t * p1g[k];
        p.weight = q.weight * det;
        out.push_back(p);
    }
    return out;
}

Eigen::Vector2d edge_reference_normal(const Point& a_min, const Point& b_max) {
    const Eigen::Vector2d d = (b_max - a_min).normalized();
    return {d.y(), -d.x()};
}

MorleyElement::MorleyElement(const std::array<Point, 3>& vertices, const std::array<Eigen::Vector2d, 3>& normals)
    : vertices_(vertices) {
    centroid_ = (vertices[0] + vertices[1] + vertices[2]) / 3.0;
    scale_ = std::max({(vertices[1] - vertices[0]).norm(), (vertices[2] - vertices[1]).norm(),
                       (vertices[0] - vertices[2]).norm()});
    area_ = signed_area(vertices[0], vertices[1], vertices[2]);
    SLL_REQUIRE(area_ > 0.0, "Morley element needs a counterclockwise triangle");

    // Rows: functionals; columns: monomials 1, s, t, s^2, st, t^2 in scaled
    // coordinates (s, t) = (x - centroid) / scale.
    Eigen::Matrix<double, 6, 6> c;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d s = (vertices[i] - centroid_) / scale_;
        c.row(i) << 1.0, s.x(), s.y(), s.x() * s.x(), s.x() * s.y(), s.y() * s.y();
    }
    for (int e = 0; e < 3; ++e) {
        const Point mid = 0.5 * (vertices[e] + vertices[(e + 1) % 3]);
        const Eigen::Vector2d s = (mid - centroid_) / scale_;
        const Eigen::Vector2d n = normals[e];
        // d/dx = (1/scale) d/ds
        const double ds[6] = {0.0, 1.0, 0.0, 2.0 * s.x(), s.y(), 0.0};
        const double dt[6] = {0.0, 0.0, 1.0, 0.0, s.x(), 2.0 * s.y()};
        for (int m = 0; m < 6; ++m) c(3 + e, m) = (n.x() * ds[m] + n.y() * dt[m]) / scale_;
    }
    coef_ = c.inverse();
}

double MorleyElement::value(int k, const Point& x) const {
    const Eigen::Vector2d s = (x - centroid_) / scale_;
    const auto& a = coef_.col(k);
    return a(0) + a(1) * s.x() + a(2) * s.y() + a(3) * s.x() * s.x() + a(4) * s.x() * s.y() +
           a(5) * s.y() * s.y();
}

Grad MorleyElement::gradient(int k, const Point& x) const {
    const Eigen::Vector2d s = (x - centroid_) / scale_;
    const auto& a = coef_.col(k);
    return Grad(a(1) + 2.0 * a(3) * s.x() + a(4) * s.y(), a(2) + a(4) * s.x() + 2.0 * a(5) * s.y()) / scale_;
}

Eigen::Matrix2d MorleyElement::hessian(int k) const {
    const auto& a = coef_.col(k);
    Eigen::Matrix2d h;
    h << 2.0 * a(3), a(4), a(4), 2.0 * a(5);
    return h / (scale_ * scale_);
}

} // namespace sll
