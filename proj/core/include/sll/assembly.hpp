#pragma once

#include "sll/geometry.hpp"
#include "sll/sparse.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace sll {

enum class ElementKind { P1, P2, vector_P2, taylor_hood, morley };
enum class BoundaryCondition { dirichlet, traction, neumann, cauchy_force };

/// How the lambda (div u)(div v) term of the Lame form is assembled.
/// `projected` replaces div u by its lumped-L2 projection onto continuous P1,
/// the Taylor-Hood pressure space; `automatic` selects it for lambda > 100 mu.
enum class DivergenceMode { plain, projected, automatic };

inline constexpr double kProjectedDivThreshold = 100.0;

struct DofMap {
    ElementKind element = ElementKind::P2;
    int num_vertices = 0;
    int num_edges = 0;
    int num_nodes = 0;  // scalar nodes per component
    int components = 1;
    int num_pressure = 0;

    [[nodiscard]] int index(int component, int node) const { return component * num_nodes + node; }
    [[nodiscard]] int size() const { return components * num_nodes; }
};

/// Result of one assembly. For Taylor-Hood, `constraint` holds the
/// num_pressure x size() block B with B(q, u) = integral of q div u.
struct AssembledSystem {
    SparseSymMatrix stiffness;
    SparseSymMatrix mass;
    std::optional<SparseMatrix> constraint;
    DofMap dof_map;
    std::vector<int> constrained_dofs; // ascending
    ElementKind element = ElementKind::P2;

    [[nodiscard]] std::vector<int> free_dofs() const;
};

/// System with constrained dofs eliminated (rows and columns removed).
struct ReducedSystem {
    SparseSymMatrix stiffness;
    SparseSymMatrix mass;
    std::optional<SparseMatrix> constraint;
    std::vector<int> free_dofs;
};

ReducedSystem reduce(const AssembledSystem& system);

/// Morley matrices for fourth-order problems: bending = int D2u:D2v,
/// geometric = int grad u . grad v, mass = int u v.
struct MorleySystem {
    SparseSymMatrix bending;
    SparseSymMatrix geometric;
    SparseSymMatrix mass;
    DofMap dof_map;                    // vertices first, then edge normal derivatives
    std::vector<int> constrained_dofs; // clamped: boundary vertices and boundary edges
};

struct AssemblyOptions {
    int workers = 1;
};

AssembledSystem assemble_lame(const Mesh& mesh, double lambda, double mu, BoundaryCondition bc,
                              DivergenceMode mode = DivergenceMode::automatic, AssemblyOptions opts = {});
AssembledSystem assemble_laplace_vector(const Mesh& mesh, double mu, BoundaryCondition bc,
                                        AssemblyOptions opts = {});
AssembledSystem assemble_scalar_laplace(const Mesh& mesh, double mu, BoundaryCondition bc, ElementKind element,
                                        AssemblyOptions opts = {});
AssembledSystem assemble_stokes_taylor_hood(const Mesh& mesh, double mu, BoundaryCondition bc,
                                            AssemblyOptions opts = {});
MorleySystem assemble_biharmonic_morley(const Mesh& mesh, AssemblyOptions opts = {});

bool uses_projected_divergence(double lambda, double mu, DivergenceMode mode);

// Nodal interpolation helpers (P2 nodes sit at vertices and at the geometric
// edge nodes, curved midpoints included).
std::vector<Point> p2_node_coordinates(const Mesh& mesh, const MeshTopology& topo);
Eigen::VectorXd interpolate_vector_p2(const Mesh& mesh, const std::function<Eigen::Vector2d(const Point&)>& f);
Eigen::VectorXd interpolate_scalar(const Mesh& mesh, ElementKind element, const std::function<double(const Point&)>& f);
/// Morley interpolant: vertex values and edge-midpoint normal derivatives.
Eigen::VectorXd interpolate_morley(const Mesh& mesh, const std::function<double(const Point&)>& f,
                                   const std::function<Eigen::Vector2d(const Point&)>& grad);

} // namespace sll
