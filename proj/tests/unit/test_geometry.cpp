#include "sll/error.hpp"
#include "sll/geometry.hpp"
#include "sll/mesh_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace sll;

namespace {

void expect_valid(const Mesh& mesh, int euler) {
    EXPECT_NO_THROW(validate_mesh(mesh));
    EXPECT_EQ(euler_characteristic(mesh), euler);
    for (const auto& t : mesh.triangles) {
        EXPECT_GT(signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]), 0.0);
    }
}

} // namespace

TEST(GenerateMesh, SquareCoarseCounts) {
    const Mesh mesh = generate_mesh(DomainSpec::unit_square(), 0.5);
    EXPECT_EQ(mesh.num_vertices(), 9);
    EXPECT_EQ(mesh.num_triangles(), 8);
    EXPECT_EQ(mesh.boundary_edges.size(), 8u);
    expect_valid(mesh, 1);
}

TEST(GenerateMesh, DiskBoundaryOnCircle) {
    const Mesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.5);
    expect_valid(mesh, 1);
    const MeshTopology topo = build_topology(mesh);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (topo.boundary_vertex[v]) EXPECT_NEAR(mesh.vertices[v].norm(), 1.0, 1e-12);
    }
    EXPECT_EQ(mesh.curved_midpoints.size(), mesh.boundary_edges.size());
    for (const auto& [key, mid] : mesh.curved_midpoints) EXPECT_NEAR(mid.norm(), 1.0, 1e-12);
}

TEST(GenerateMesh, AnnulusEulerCharacteristicZero) {
    const Mesh mesh = generate_mesh(DomainSpec::annulus(0.5), 0.25);
    expect_valid(mesh, 0);
    int inner = 0;
    for (const auto& e : mesh.boundary_edges) inner += e.tag == 1;
    EXPECT_GT(inner, 0);
}

TEST(GenerateMesh, SizeBound) {
    for (double h : {1.0, 0.5, 0.3, 0.1}) {
        EXPECT_LE(generate_mesh(DomainSpec::unit_square(), h).h_max, 1.5 * h);
        EXPECT_LE(generate_mesh(DomainSpec::unit_disk(), h).h_max, 1.5 * h);
        EXPECT_LE(generate_mesh(DomainSpec::annulus(0.4), h).h_max, 1.5 * h);
    }
}

TEST(GenerateMesh, RejectsBadInput) {
    EXPECT_THROW(generate_mesh(DomainSpec::unit_square(), 0.0), InvalidArgument);
    EXPECT_THROW(generate_mesh(DomainSpec::unit_square(), 1.5), InvalidArgument);
    const std::vector<Point> bowtie = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    EXPECT_THROW(generate_mesh(DomainSpec::polygon(bowtie), 0.3), InvalidArgument);
}

TEST(GenerateMesh, PolygonLShape) {
    const std::vector<Point> l = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    const DomainSpec spec = DomainSpec::polygon(l);
    EXPECT_DOUBLE_EQ(spec.analytic_area, 3.0);
    EXPECT_DOUBLE_EQ(spec.analytic_perimeter, 8.0);
    const Mesh mesh = generate_mesh(spec, 0.4);
    expect_valid(mesh, 1);
    EXPECT_LE(mesh.h_max, 0.6);
    const auto q = mesh_quantities(mesh);
    EXPECT_NEAR(q.area, 3.0, 1e-12);
    EXPECT_NEAR(q.perimeter, 8.0, 1e-12);
}

TEST(RefineUniform, CountsAndTopology) {
    const Mesh coarse = generate_mesh(DomainSpec::unit_square(), 0.5);
    const Mesh fine = refine_uniform(coarse);
    EXPECT_EQ(fine.num_triangles(), 32);
    EXPECT_EQ(fine.boundary_edges.size(), 2 * coarse.boundary_edges.size());
    expect_valid(fine, 1);

    const Mesh annulus = generate_mesh(DomainSpec::annulus(0.5), 0.4);
    const Mesh annulus_fine = refine_uniform(annulus);
    EXPECT_EQ(annulus_fine.boundary_edges.size(), 2 * annulus.boundary_edges.size());
    expect_valid(annulus_fine, 0);
}

TEST(RefineUniform, PreservesStraightArea) {
    const std::vector<Point> tri = {{0, 0}, {3, 0}, {0.5, 2}};
    Mesh mesh = generate_mesh(DomainSpec::polygon(tri), 0.7);
    const double before = mesh_quantities(mesh).area;
    for (int i = 0; i < 2; ++i) mesh = refine_uniform(mesh);
    EXPECT_NEAR(mesh_quantities(mesh).area, before, 1e-12 * before);
}

TEST(RefineUniform, DiskReprojectsMidpoints) {
    Mesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.5);
    double previous_chord = 0.0;
    for (int level = 0; level < 4; ++level) {
        for (const auto& [key, mid] : mesh.curved_midpoints) EXPECT_NEAR(mid.norm(), 1.0, 1e-12);
        double chord = 0.0;
        for (const auto& e : mesh.boundary_edges) chord += (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
        EXPECT_GT(chord, previous_chord);
        EXPECT_LT(chord, 2.0 * std::numbers::pi);
        previous_chord = chord;
        mesh = refine_uniform(mesh);
    }
}

TEST(MeshQuantities, SquareExact) {
    for (double h : {0.5, 0.2, 0.1}) {
        const auto q = mesh_quantities(generate_mesh(DomainSpec::unit_square(), h));
        EXPECT_NEAR(q.area, 1.0, 1e-12);
        EXPECT_NEAR(q.perimeter, 4.0, 1e-12);
    }
}

TEST(MeshQuantities, DiskCurvedAndStraight) {
    Mesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.1);
    double straight = 0.0;
    for (const auto& t : mesh.triangles) {
        straight += signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    }
    EXPECT_NEAR(straight, std::numbers::pi, 0.01 * std::numbers::pi);
    const auto q = mesh_quantities(mesh);
    EXPECT_NEAR(q.perimeter, 2.0 * std::numbers::pi, 1e-3 * 2.0 * std::numbers::pi);
    EXPECT_NEAR(q.area, std::numbers::pi, 1e-3 * std::numbers::pi);
}

TEST(DomainSpec, AnalyticQuantities) {
    const auto a = DomainSpec::annulus(0.3);
    EXPECT_NEAR(a.analytic_area, std::numbers::pi * (1 - 0.09), 1e-14);
    EXPECT_NEAR(a.analytic_perimeter, 2 * std::numbers::pi * 1.3, 1e-14);
    EXPECT_DOUBLE_EQ(a.boundary_curvature_integral, 0.0);
    EXPECT_NEAR(DomainSpec::unit_disk().boundary_curvature_integral, 2 * std::numbers::pi, 1e-15);
    EXPECT_THROW(DomainSpec::annulus(1.0), InvalidArgument);
}

TEST(MeshIo, RoundTrip) {
    const Mesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.4);
    std::stringstream ss;
    write_mesh(ss, mesh);
    const Mesh back = read_mesh(ss);
    ASSERT_EQ(back.num_vertices(), mesh.num_vertices());
    ASSERT_EQ(back.num_triangles(), mesh.num_triangles());
    ASSERT_EQ(back.boundary_edges.size(), mesh.boundary_edges.size());
    EXPECT_EQ(back.curved_midpoints.size(), mesh.curved_midpoints.size());
    for (int i = 0; i < mesh.num_vertices(); ++i) EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
    EXPECT_EQ(back.triangles, mesh.triangles);
    for (const auto& [key, mid] : mesh.curved_midpoints) EXPECT_EQ(back.curved_midpoints.at(key), mid);
}

TEST(MeshIo, RejectsBadMagic) {
    std::stringstream ss("NOTAMESH\n0 0 0\n");
    EXPECT_THROW(read_mesh(ss), ParseError);
}

TEST(MeshForLevel, SquareAndDiskGrowth) {
    EXPECT_EQ(mesh_for_level(DomainSpec::unit_square(), 2).num_triangles(), 8 * 16);
    const Mesh d0 = mesh_for_level(DomainSpec::unit_disk(), 0);
    const Mesh d1 = mesh_for_level(DomainSpec::unit_disk(), 1);
    EXPECT_EQ(d1.num_triangles(), 4 * d0.num_triangles());
    expect_valid(d1, 1);
}
