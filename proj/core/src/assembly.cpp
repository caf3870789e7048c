#include "sll/assembly.hpp"

#include "sll/elements.hpp"
#include "sll/error.hpp"

#include <algorithm>
#include <thread>

namespace sll {

namespace {

struct ElementOutput {
    std::vector<Triplet> a; // lower triangle only
    std::vector<Triplet> m; // lower triangle only
    std::vector<Triplet> b; // rectangular constraint block
    std::vector<double> lumped;
};

// Runs `kernel(t, out)` over all triangles. Workers own contiguous triangle
// ranges and their outputs are concatenated in triangle order, so the summed
// matrices do not depend on the worker count.
template <typename Kernel>
ElementOutput for_each_triangle(int num_triangles, int workers, Kernel&& kernel) {
    workers = std::clamp(workers, 1, std::max(1, num_triangles));
    std::vector<ElementOutput> parts(workers);
    auto run = [&](int w) {
        const int begin = static_cast<int>(static_cast<long>(num_triangles) * w / workers);
        const int end = static_cast<int>(static_cast<long>(num_triangles) * (w + 1) / workers);
        for (int t = begin; t < end; ++t) kernel(t, parts[w]);
    };
    if (workers == 1) {
        run(0);
        return std::move(parts[0]);
    }
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& th : threads) th.join();
    ElementOutput out;
    for (auto& p : parts) {
        out.a.insert(out.a.end(), p.a.begin(), p.a.end());
        out.m.insert(out.m.end(), p.m.begin(), p.m.end());
        out.b.insert(out.b.end(), p.b.begin(), p.b.end());
    }
    return out;
}

void push_lower(std::vector<Triplet>& out, int row, int col, double v) {
    if (row >= col) out.emplace_back(row, col, v);
}

DofMap p2_dof_map(const Mesh& mesh, const MeshTopology& topo, int components, ElementKind kind) {
    DofMap map;
    map.element = kind;
    map.num_vertices = mesh.num_vertices();
    map.num_edges = topo.num_edges();
    map.num_nodes = map.num_vertices + map.num_edges;
    map.components = components;
    return map;
}

std::array<int, 6> p2_local_nodes(const Mesh& mesh, const MeshTopology& topo, int t) {
    const auto& tri = mesh.triangles[t];
    const auto& te = topo.triangle_edges[t];
    const int nv = mesh.num_vertices();
    return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

std::vector<int> p2_boundary_dofs(const Mesh& mesh, const MeshTopology& topo, const DofMap& map) {
    std::vector<int> dofs;
    for (int c = 0; c < map.components; ++c) {
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            if (topo.boundary_vertex[v]) dofs.push_back(map.index(c, v));
        }
        for (int e = 0; e < topo.num_edges(); ++e) {
            if (topo.boundary_edge[e]) dofs.push_back(map.index(c, mesh.num_vertices() + e));
        }
    }
    std::sort(dofs.begin(), dofs.end());
    return dofs;
}

// Vector P2 bilinear form
//   grad_coef * (grad u : grad v) + transpose_coef * (grad u : grad v^T)
//     + div_coef * (div u)(div v)
// together with the vector mass matrix and, optionally, the Taylor-Hood
// divergence block against P1 pressures.
struct VectorForm {
    double grad_coef = 0.0;
    double transpose_coef = 0.0;
    double div_coef = 0.0;
};

ElementOutput assemble_vector_p2(const Mesh& mesh, const MeshTopology& topo, const DofMap& map,
                                 const VectorForm& form, bool with_constraint, int workers) {
    const auto rule = triangle_rule_degree4();
    return for_each_triangle(mesh.num_triangles(), workers, [&](int t, ElementOutput& out) {
        const auto geom = element_geometry(mesh, t);
        const auto pts = evaluate_p2(geom, rule);
        const auto nodes = p2_local_nodes(mesh, topo, t);
        Eigen::Matrix<double, 12, 12> ke = Eigen::Matrix<double, 12, 12>::Zero();
        Eigen::Matrix<double, 12, 12> me = Eigen::Matrix<double, 12, 12>::Zero();
        Eigen::Matrix<double, 3, 12> be = Eigen::Matrix<double, 3, 12>::Zero();
        for (const auto& p : pts) {
            for (int c = 0; c < 2; ++c) {
                for (int i = 0; i < 6; ++i) {
                    const int r = c * 6 + i;
                    const Grad& gi = p.grad[i];
                    for (int d = 0; d < 2; ++d) {
                        for (int j = 0; j < 6; ++j) {
                            const int s = d * 6 + j;
                            const Grad& gj = p.grad[j];
                            double v = form.transpose_coef * gi[d] * gj[c] + form.div_coef * gi[c] * gj[d];
                            if (c == d) v += form.grad_coef * gi.dot(gj);
                            ke(r, s) += p.weight * v;
                            if (c == d) me(r, s) += p.weight * p.shape[i] * p.shape[j];
                        }
                    }
                    if (with_constraint) {
                        for (int q = 0; q < 3; ++q) be(q, r) += p.weight * p.p1[q] * gi[c];
                    }
                }
            }
        }
        for (int r = 0; r < 12; ++r) {
            const int gr = map.index(r / 6, nodes[r % 6]);
            for (int s = 0; s < 12; ++s) {
                const int gs = map.index(s / 6, nodes[s % 6]);
                push_lower(out.a, gr, gs, ke(r, s));
                push_lower(out.m, gr, gs, me(r, s));
            }
        }
        if (with_constraint) {
            const auto& tri = mesh.triangles[t];
            for (int q = 0; q < 3; ++q) {
                for (int r = 0; r < 12; ++r) {
                    out.b.emplace_back(tri[q], map.index(r / 6, nodes[r % 6]), be(q, r));
                }
            }
        }
    });
}

// Lumped P1 mass: integral of each vertex hat function on the isoparametric mesh.
Eigen::VectorXd lumped_p1_mass(const Mesh& mesh) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(mesh.num_vertices());
    const auto rule = triangle_rule_degree4();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto pts = evaluate_p2(element_geometry(mesh, t), rule);
        for (const auto& p : pts) {
            for (int q = 0; q < 3; ++q) d(mesh.triangles[t][q]) += p.weight * p.p1[q];
        }
    }
    return d;
}

SparseMatrix build_rectangular(int rows, int cols, const std::vector<Triplet>& t) {
    SparseMatrix b(rows, cols);
    b.setFromTriplets(t.begin(), t.end());
    b.makeCompressed();
    return b;
}

} // namespace

std::vector<int> AssembledSystem::free_dofs() const {
    std::vector<int> free;
    free.reserve(dof_map.size());
    std::size_t c = 0;
    for (int i = 0; i < dof_map.size(); ++i) {
        while (c < constrained_dofs.size() && constrained_dofs[c] < i) ++c;
        if (c < constrained_dofs.size() && constrained_dofs[c] == i) continue;
        free.push_back(i);
    }
    return free;
}

ReducedSystem reduce(const AssembledSystem& system) {
    ReducedSystem r;
    r.free_dofs = system.free_dofs();
    r.stiffness = system.stiffness.restrict_to(r.free_dofs);
    r.mass = system.mass.restrict_to(r.free_dofs);
    if (system.constraint) {
        const SparseMatrix& b = *system.constraint;
        std::vector<Triplet> t;
        std::vector<int> map(system.dof_map.size(), -1);
        for (std::size_t i = 0; i < r.free_dofs.size(); ++i) map[r.free_dofs[i]] = static_cast<int>(i);
        for (int j = 0; j < b.outerSize(); ++j) {
            if (map[j] < 0) continue;
            for (SparseMatrix::InnerIterator it(b, j); it; ++it) t.emplace_back(it.row(), map[j], it.value());
        }
        r.constraint = build_rectangular(static_cast<int>(b.rows()), static_cast<int>(r.free_dofs.size()), t);
    }
    return r;
}

bool uses_projected_divergence(double lambda, double mu, DivergenceMode mode) {
    switch (mode) {
    case DivergenceMode::plain: return false;
    case DivergenceMode::projected: return true;
    case DivergenceMode::automatic: return lambda > kProjectedDivThreshold * mu;
    }
    return false;
}

AssembledSystem assemble_lame(const Mesh& mesh, double lambda, double mu, BoundaryCondition bc,
                              DivergenceMode mode, AssemblyOptions opts) {
    SLL_REQUIRE(mu > 0.0, "Lame assembly requires mu > 0");
    SLL_REQUIRE(lambda + 2.0 * mu > 0.0, "Lame assembly requires lambda + 2 mu > 0");
    SLL_REQUIRE(bc == BoundaryCondition::dirichlet || bc == BoundaryCondition::traction,
                "Lame boundary condition must be dirichlet or traction");
    SLL_REQUIRE(!mesh.triangles.empty(), "empty mesh");
    const MeshTopology topo = build_topology(mesh);
    AssembledSystem sys;
    sys.element = ElementKind::vector_P2;
    sys.dof_map = p2_dof_map(mesh, topo, 2, ElementKind::vector_P2);
    const bool projected = uses_projected_divergence(lambda, mu, mode);
    // 2 mu Def u : Def v = mu grad u : grad v + mu grad u : grad v^T
    VectorForm form{mu, mu, projected ? 0.0 : lambda};
    ElementOutput out = assemble_vector_p2(mesh, topo, sys.dof_map, form, projected, opts.workers);
    SparseSymMatrix a = SparseSymMatrix::from_triplets(sys.dof_map.size(), out.a);
    if (projected) {
        const SparseMatrix b = build_rectangular(mesh.num_vertices(), sys.dof_map.size(), out.b);
        const Eigen::VectorXd d = lumped_p1_mass(mesh);
        const SparseMatrix scaled = d.cwiseInverse().asDiagonal() * b;
        SparseMatrix penalty = SparseMatrix(b.transpose()) * scaled;
        penalty *= lambda;
        a = a + SparseSymMatrix::from_lower(penalty);
    }
    sys.stiffness = std::move(a);
    sys.mass = SparseSymMatrix::from_triplets(sys.dof_map.size(), out.m);
    if (bc == BoundaryCondition::dirichlet) sys.constrained_dofs = p2_boundary_dofs(mesh, topo, sys.dof_map);
    return sys;
}

AssembledSystem assemble_laplace_vector(const Mesh& mesh, double mu, BoundaryCondition bc, AssemblyOptions opts) {
    SLL_REQUIRE(mu > 0.0, "vector Laplace assembly requires mu > 0");
    SLL_REQUIRE(bc == BoundaryCondition::dirichlet || bc == BoundaryCondition::traction,
                "vector Laplace boundary condition must be dirichlet or traction");
    SLL_REQUIRE(!mesh.triangles.empty(), "empty mesh");
    const MeshTopology topo = build_topology(mesh);
    AssembledSystem sys;
    sys.element = ElementKind::vector_P2;
    sys.dof_map = p2_dof_map(mesh, topo, 2, ElementKind::vector_P2);
    // Dirichlet: mu grad u : grad v. Traction: mu [2 Def u : Def v - div u div v].
    const VectorForm form = bc == BoundaryCondition::dirichlet ? VectorForm{mu, 0.0, 0.0} : VectorForm{mu, mu, -mu};
    ElementOutput out = assemble_vector_p2(mesh, topo, sys.dof_map, form, false, opts.workers);
    sys.stiffness = SparseSymMatrix::from_triplets(sys.dof_map.size(), out.a);
    sys.mass = SparseSymMatrix::from_triplets(sys.dof_map.size(), out.m);
    if (bc == BoundaryCondition::dirichlet) sys.constrained_dofs = p2_boundary_dofs(mesh, topo, sys.dof_map);
    return sys;
}

AssembledSystem assemble_scalar_laplace(const Mesh& mesh, double mu, BoundaryCondition bc, ElementKind element,
                                        AssemblyOptions opts) {
    SLL_REQUIRE(mu > 0.0, "scalar Laplace assembly requires mu > 0");
    SLL_REQUIRE(bc == BoundaryCondition::dirichlet || bc == BoundaryCondition::neumann,
                "scalar Laplace boundary condition must be dirichlet or neumann");
    SLL_REQUIRE(element == ElementKind::P1 || element == ElementKind::P2, "scalar element must be P1 or P2");
    SLL_REQUIRE(!mesh.triangles.empty(), "empty mesh");
    const MeshTopology topo = build_topology(mesh);
    AssembledSystem sys;
    sys.element = element;
    if (element == ElementKind::P2) {
        sys.dof_map = p2_dof_map(mesh, topo, 1, ElementKind::P2);
    } else {
        sys.dof_map.element = ElementKind::P1;
        sys.dof_map.num_vertices = mesh.num_vertices();
        sys.dof_map.num_edges = topo.num_edges();
        sys.dof_map.num_nodes = mesh.num_vertices();
        sys.dof_map.components = 1;
    }
    ElementOutput out;
    if (element == ElementKind::P2) {
        const auto rule = triangle_rule_degree4();
        out = for_each_triangle(mesh.num_triangles(), opts.workers, [&](int t, ElementOutput& o) {
            const auto pts = evaluate_p2(element_geometry(mesh, t), rule);
            const auto nodes = p2_local_nodes(mesh, topo, t);
            Eigen::Matrix<double, 6, 6> ke = Eigen::Matrix<double, 6, 6>::Zero();
            Eigen::Matrix<double, 6, 6> me = Eigen::Matrix<double, 6, 6>::Zero();
            for (const auto& p : pts) {
                for (int i = 0; i < 6; ++i) {
                    for (int j = 0; j < 6; ++j) {
                        ke(i, j) += p.weight * mu * p.grad[i].dot(p.grad[j]);
                        me(i, j) += p.weight * p.shape[i] * p.shape[j];
                    }
                }
            }
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) {
                    push_lower(o.a, nodes[i], nodes[j], ke(i, j));
                    push_lower(o.m, nodes[i], nodes[j], me(i, j));
                }
            }
        });
    } else {
        out = for_each_triangle(mesh.num_triangles(), opts.workers, [&](int t, ElementOutput& o) {
            const auto& tri = mesh.triangles[t];
            const Point& a = mesh.vertices[tri[0]];
            const Point& b = mesh.vertices[tri[1]];
            const Point& c = mesh.vertices[tri[2]];
            const double area = signed_area(a, b, c);
            // Gradients of barycentric coordinates: rotate the opposite edge.
            const std::array<Grad, 3> g = {Grad(b.y() - c.y(), c.x() - b.x()) / (2.0 * area),
                                           Grad(c.y() - a.y(), a.x() - c.x()) / (2.0 * area),
                                           Grad(a.y() - b.y(), b.x() - a.x()) / (2.0 * area)};
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    push_lower(o.a, tri[i], tri[j], mu * area * g[i].dot(g[j]));
                    push_lower(o.m, tri[i], tri[j], area * (i == j ? 2.0 : 1.0) / 12.0);
                }
            }
        });
    }
    sys.stiffness = SparseSymMatrix::from_triplets(sys.dof_map.size(), out.a);
    sys.mass = SparseSymMatrix::from_triplets(sys.dof_map.size(), out.m);
    if (bc == BoundaryCondition::dirichlet) {
        if (element == ElementKind::P2) {
            sys.constrained_dofs = p2_boundary_dofs(mesh, topo, sys.dof_map);
        } else {
            for (int v = 0; v < mesh.num_vertices(); ++v) {
                if (topo.boundary_vertex[v]) sys.constrained_dofs.push_back(v);
            }
        }
    }
    return sys;
}

AssembledSystem assemble_stokes_taylor_hood(const Mesh& mesh, double mu, BoundaryCondition bc, AssemblyOptions opts) {
    SLL_REQUIRE(mu > 0.0, "Stokes assembly requires mu > 0");
    SLL_REQUIRE(bc == BoundaryCondition::dirichlet || bc == BoundaryCondition::cauchy_force,
                "Stokes boundary condition must be dirichlet or cauchy_force");
    SLL_REQUIRE(!mesh.triangles.empty(), "empty mesh");
    const MeshTopology topo = build_topology(mesh);
    AssembledSystem sys;
    sys.element = ElementKind::taylor_hood;
    sys.dof_map = p2_dof_map(mesh, topo, 2, ElementKind::taylor_hood);
    sys.dof_map.num_pressure = mesh.num_vertices();
    ElementOutput out = assemble_vector_p2(mesh, topo, sys.dof_map, VectorForm{mu, mu, 0.0}, true, opts.workers);
    sys.stiffness = SparseSymMatrix::from_triplets(sys.dof_map.size(), out.a);
    sys.mass = SparseSymMatrix::from_triplets(sys.dof_map.size(), out.m);
    sys.constraint = build_rectangular(mesh.num_vertices(), sys.dof_map.size(), out.b);
    if (bc == BoundaryCondition::dirichlet) sys.constrained_dofs = p2_boundary_dofs(mesh, topo, sys.dof_map);
    return sys;
}

MorleySystem assemble_biharmonic_morley(const Mesh& mesh, AssemblyOptions opts) {
    SLL_REQUIRE(!mesh.triangles.empty(), "empty mesh");
    const MeshTopology topo = build_topology(mesh);
    const int nv = mesh.num_vertices();
    MorleySystem sys;
    sys.dof_map.element = ElementKind::morley;
    sys.dof_map.num_vertices = nv;
    sys.dof_map.num_edges = topo.num_edges();
    sys.dof_map.num_nodes = nv + topo.num_edges();
    sys.dof_map.components = 1;

    const auto rule2 = triangle_rule_degree2();
    const auto rule4 = triangle_rule_degree4();
    ElementOutput out = for_each_triangle(mesh.num_triangles(), opts.workers, [&](int t, ElementOutput& o) {
        const auto& tri = mesh.triangles[t];
        std::array<Point, 3> v = {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
        std::array<Eigen::Vector2d, 3> normals;
        std::array<int, 6> dofs;
        for (int e = 0; e < 3; ++e) {
            const EdgeKey key = topo.edges[topo.triangle_edges[t][e]];
            normals[e] = edge_reference_normal(mesh.vertices[key.first], mesh.vertices[key.second]);
            dofs[e] = tri[e];
            dofs[3 + e] = nv + topo.triangle_edges[t][e];
        }
        const MorleyElement el(v, normals);
        std::array<Eigen::Matrix2d, 6> hess;
        for (int k = 0; k < 6; ++k) hess[k] = el.hessian(k);
        auto map_point = [&](const QuadPoint& q) {
            return Point(v[0] + q.xi * (v[1] - v[0]) + q.eta * (v[2] - v[0]));
        };
        Eigen::Matrix<double, 6, 6> kb = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 6> kg = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 6> km = Eigen::Matrix<double, 6, 6>::Zero();
        const double jac = 2.0 * el.area();
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) kb(i, j) = el.area() * (hess[i].cwiseProduct(hess[j])).sum();
        }
        for (const auto& q : rule2) {
            const Point x = map_point(q);
            std::array<Grad, 6> g;
            for (int k = 0; k < 6; ++k) g[k] = el.gradient(k, x);
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) kg(i, j) += q.weight * jac * g[i].dot(g[j]);
            }
        }
        for (const auto& q : rule4) {
            const Point x = map_point(q);
            std::array<double, 6> val;
            for (int k = 0; k < 6; ++k) val[k] = el.value(k, x);
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) km(i, j) += q.weight * jac * val[i] * val[j];
            }
        }
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                push_lower(o.a, dofs[i], dofs[j], kb(i, j));
                push_lower(o.b, dofs[i], dofs[j], kg(i, j));
                push_lower(o.m, dofs[i], dofs[j], km(i, j));
            }
        }
    });
    const int n = sys.dof_map.size();
    sys.bending = SparseSymMatrix::from_triplets(n, out.a);
    sys.geometric = SparseSymMatrix::from_triplets(n, out.b);
    sys.mass = SparseSymMatrix::from_triplets(n, out.m);
    for (int vtx = 0; vtx < nv; ++vtx) {
        if (topo.boundary_vertex[vtx]) sys.constrained_dofs.push_back(vtx);
    }
    for (int e = 0; e < topo.num_edges(); ++e) {
        if (topo.boundary_edge[e]) sys.constrained_dofs.push_back(nv + e);
    }
    return sys;
}

std::vector<Point> p2_node_coordinates(const Mesh& mesh, const MeshTopology& topo) {
    std::vector<Point> nodes = mesh.vertices;
    nodes.reserve(mesh.vertices.size() + topo.edges.size());
    for (const auto& e : topo.edges) nodes.push_back(edge_node(mesh, e.first, e.second));
    return nodes;
}

Eigen::VectorXd interpolate_vector_p2(const Mesh& mesh, const std::function<Eigen::Vector2d(const Point&)>& f) {
    const MeshTopology topo = build_topology(mesh);
    const auto nodes = p2_node_coordinates(mesh, topo);
    const int nn = static_cast<int>(nodes.size());
    Eigen::VectorXd u(2 * nn);
    for (int i = 0; i < nn; ++i) {
        const Eigen::Vector2d val = f(nodes[i]);
        u(i) = val.x();
        u(nn + i) = val.y();
    }
    return u;
}

Eigen::VectorXd interpolate_scalar(const Mesh& mesh, ElementKind element, const std::function<double(const Point&)>& f) {
    SLL_REQUIRE(element == ElementKind::P1 || element == ElementKind::P2, "scalar interpolation needs P1 or P2");
    if (element == ElementKind::P1) {
        Eigen::VectorXd u(mesh.num_vertices());
        for (int i = 0; i < mesh.num_vertices(); ++i) u(i) = f(mesh.vertices[i]);
        return u;
    }
    const MeshTopology topo = build_topology(mesh);
    const auto nodes = p2_node_coordinates(mesh, topo);
    Eigen::VectorXd u(static_cast<int>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) u(static_cast<int>(i)) = f(nodes[i]);
    return u;
}

Eigen::VectorXd interpolate_morley(const Mesh& mesh, const std::function<double(const Point&)>& f,
                                   const std::function<Eigen::Vector2d(const Point&)>& grad) {
    const MeshTopology topo = build_topology(mesh);
    const int nv = mesh.num_vertices();
    Eigen::VectorXd u(nv + topo.num_edges());
    for (int i = 0; i < nv; ++i) u(i) = f(mesh.vertices[i]);
    for (int e = 0; e < topo.num_edges(); ++e) {
        const Point& a = mesh.vertices[topo.edges[e].first];
        const Point& b = mesh.vertices[topo.edges[e].second];
        u(nv + e) = grad(0.5 * (a + b)).dot(edge_reference_normal(a, b));
    }
    return u;
}

} // namespace sll
