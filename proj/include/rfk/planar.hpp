#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rfk/common.hpp"
#include "rfk/geometry.hpp"
#include "rfk/radial.hpp"
#include "rfk/report.hpp"

namespace rfk::planar {

enum class VertexTag { Interior, Outer, Inner };

struct Mesh {
    std::vector<std::array<double, 2>> vertices;
    /// Counter-clockwise vertex triples.
    std::vector<std::array<int, 3>> triangles;
    std::vector<VertexTag> tags;

    std::size_t size() const { return vertices.size(); }
    double max_edge() const;
    double min_signed_area() const;
    double area() const;
};

/// Ring mesh of a ball or (eccentric) annulus. Every ring is an exact circle;
/// the boundary rings lie on the two boundary circles. `topology_shift`
/// sizes the ring count as if the hole were offset by that amount, so that
/// meshes of shifted domains share their connectivity.
Mesh mesh_annulus(const geometry::DomainSpec& domain, double target_h, double topology_shift = 0.0);
/// (n+1)^2 grid on [0,1]^2 split along one diagonal; boundary tagged Outer.
Mesh mesh_unit_square(std::size_t n);

/// Vertex count, `x y tag` lines, triangle count, `i j k` lines.
std::string mesh_to_text(const Mesh& mesh);
Mesh mesh_from_text(const std::string& text);

struct DirichletSet {
    bool outer = false;
    bool inner = false;
};

enum class EigenMode { First, SecondNeumann };

struct Eigenpair2D {
    double eigenvalue = 0.0;
    /// One value per vertex; exactly 0 on Dirichlet vertices; sup |u| = 1.
    std::vector<double> values;
    DirichletSet dirichlet;
    EigenMode mode = EigenMode::First;
    double p = 2.0;
    std::string method;
    /// |K u - lambda M u| / |lambda M u| (p = 2 only).
    double residual = 0.0;
    double last_change = 0.0;
    std::size_t iterations = 0;
    /// Discrete Rayleigh quotients, one per accepted iterate.
    std::vector<double> history;
    /// Minimum over free vertices divided by the maximum (First mode).
    double min_ratio = 0.0;
    /// |sum M u| / |M| |u| for SecondNeumann.
    double constant_overlap = 0.0;
};

enum class LinearSolver { Cholesky, Pcg };

struct OracleOptions {
    /// Relative eigenvalue change that ends inverse iteration.
    double tol = 1e-10;
    /// Relative residual |K u - lambda M u| / |lambda M u| also required.
    double residual_tol = 1e-6;
    std::size_t max_iterations = 2000;
    LinearSolver solver = LinearSolver::Cholesky;
    /// Jacobi-PCG relative tolerance (LinearSolver::Pcg).
    double cg_tol = 1e-12;
};

/// Inverse iteration on the P1 pencil (K, M). SecondNeumann requires an
/// empty Dirichlet set and deflates against constants. The Cholesky and PCG
/// solvers produce the same iterates up to the CG tolerance.
Eigenpair2D p2_eig(const Mesh& mesh, DirichletSet dirichlet, EigenMode mode = EigenMode::First,
                   const OracleOptions& options = {});

struct DescentOptions {
    /// Relative quotient decrease below which a step counts as stalled.
    double tol = 1e-11;
    std::size_t max_iterations = 5000;
    /// Seed for the 1e-8 escape perturbation applied after a stall.
    std::uint64_t seed = 1;
};

/// Minimises J(u) / |u|_p^p, J = sum |T| |grad u|^p, from the all-ones vector
/// by Sobolev-preconditioned gradient steps with Armijo backtracking.
Eigenpair2D plap_eig_descent(const Mesh& mesh, DirichletSet dirichlet, double p, const DescentOptions& options = {});

/// Discrete quotient used by the descent (edge-midpoint rule for |u|^p).
double discrete_rayleigh(const Mesh& mesh, std::span<const double> values, double p);

/// CSV `vertex,value`.
std::string eigenpair_csv(const Eigenpair2D& pair);
nlohmann::json to_json(const Eigenpair2D& pair);

/// First eigenvalue on a 2D spherical domain by the mesh oracle; p = 2 uses
/// p2_eig, other p the descent.
Eigenpair2D oracle_first(const geometry::DomainSpec& domain, DirichletSet dirichlet, double p, double h,
                         double topology_shift = 0.0);

enum class NodalKind { Mu2, Nu2, Tau2 };
std::string to_string(NodalKind kind);
NodalKind nodal_kind_from_string(const std::string& name);

struct NodalCandidate {
    NodalKind which = NodalKind::Mu2;
    double candidate_value = 0.0;
    double split_radius = 0.0;
    /// First eigenvalues of the two concentric pieces, re-solved.
    double inner_value = 0.0;
    double outer_value = 0.0;
    double R0 = 0.0;
    double R1 = 0.0;
    radial::RadialProblem problem;
    radial::BoundaryCondition inner_piece_inner, inner_piece_outer;
    radial::BoundaryCondition outer_piece_inner, outer_piece_outer;
    /// Normalisation of the radial eigenfunction in force.
    std::string normalization;
};

/// Second radial eigenvalue of the ball or concentric annulus whose nodal set
/// is the sphere of radius split_radius, with the split re-verified.
NodalCandidate nodal_radial_candidate(const geometry::DomainSpec& domain, const ProblemParams& params,
                                      NodalKind which);

struct NodalOptions {
    double mesh_h = 0.04;
    /// Relative tolerance on the comparison with the candidate.
    double tolerance = 1e-6;
};

/// Compares the two pieces of the split moved by `shift` along e_1 with the
/// candidate. Holds iff the pair rules out the concentric nodal sphere.
VerificationReport nodal_counterexample(const geometry::DomainSpec& domain, const ProblemParams& params, double shift,
                                        NodalKind which, const NodalOptions& options = {});

} // namespace rfk::planar
