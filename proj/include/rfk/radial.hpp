#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rfk/common.hpp"

namespace rfk::radial {

enum class BcKind { Dirichlet, Neumann, Robin };

struct BoundaryCondition {
    BcKind kind = BcKind::Neumann;
    /// Elasticity constant; Robin only.
    double k = 0.0;

    static BoundaryCondition dirichlet() { return {BcKind::Dirichlet, 0.0}; }
    static BoundaryCondition neumann() { return {BcKind::Neumann, 0.0}; }
    static BoundaryCondition robin(double k) { return {BcKind::Robin, k}; }
};

std::string to_string(const BoundaryCondition& bc);
BoundaryCondition bc_from_string(const std::string& name, double k = 0.0);

enum class Mode { FirstEigen, SecondRadial };

struct RadialProblem {
    ProblemParams params{2, 2.0};
    double R0 = 0.0;
    double R1 = 1.0;
    BoundaryCondition inner = BoundaryCondition::neumann();
    BoundaryCondition outer = BoundaryCondition::dirichlet();
    Mode mode = Mode::FirstEigen;

    /// Throws InvalidInput when R0 < 0, R1 <= R0, Robin k <= 0, or R0 = 0
    /// with a non-Neumann inner condition in dimension >= 2.
    void validate() const;
    double length() const { return R1 - R0; }
    bool is_ball() const { return R0 == 0.0 && params.dim() >= 2; }
};

struct SolverOptions {
    /// Relative width of the final eigenvalue bracket.
    double tol = 1e-10;
    double lambda_start = 1e-6;
    double scan_ratio = 1.3;
    double lambda_max = 1e6;
    /// Samples of the uniform output grid (odd, for Simpson).
    std::size_t output_nodes = 4097;
};

struct ShootResult {
    /// Residual of the condition at R1.
    double end_residual = 0.0;
    /// Interior sign changes of phi (a zero within 1e-6 (R1 - R0) of a
    /// Dirichlet R1 is not counted).
    int zero_count = 0;
    std::vector<double> zeros;
    /// Accepted integrator nodes: r, phi, w = r^{N-1}|phi'|^{p-2}phi'.
    std::vector<double> r, phi, w;
    std::size_t steps = 0;
};

/// Integrates the first-order system from R0 (or from 1e-8 R1 for a ball)
/// to R1. Throws NumericalFailure on step underflow, naming the offending r.
ShootResult shoot(const RadialProblem& problem, double lambda, bool keep_trajectory = false);

struct RadialEigenpair {
    double eigenvalue = 0.0;
    /// Uniform output grid on [R0, R1] with phi, phi' samples; sup |phi| = 1.
    std::vector<double> r, phi, dphi;
    int zero_count = 0;
    /// Interior zero of the second radial mode.
    std::optional<double> nodal_radius;
    std::size_t scan_steps = 0;
    std::size_t bisection_steps = 0;
    double tolerance = 0.0;
    /// Integrator nodes, normalised like phi; used for interpolation.
    std::vector<double> node_r, node_phi, node_w;
    int dim = 2;
    double p = 2.0;

    /// Cubic Hermite interpolation on the integrator nodes; clamps outside.
    double phi_at(double r) const;
    double dphi_at(double r) const;
};

/// Eigenpair closest to the bottom of the spectrum with zero_count 0.
/// Neumann-Neumann returns lambda = 0 with phi = 1 immediately.
RadialEigenpair solve_first_radial(const RadialProblem& problem, const SolverOptions& options = {});
/// Smallest eigenvalue whose eigenfunction has exactly one interior zero.
RadialEigenpair solve_second_radial(const RadialProblem& problem, const SolverOptions& options = {});
/// Dispatches on problem.mode.
RadialEigenpair solve_radial(const RadialProblem& problem, const SolverOptions& options = {});

/// (int r^{N-1}|phi'|^p + Robin terms k R^{N-1}|phi(R)|^p) / int r^{N-1}|phi|^p.
double rayleigh_radial(const RadialEigenpair& pair, const RadialProblem& problem);

nlohmann::json to_json(const RadialProblem& problem);
nlohmann::json to_json(const RadialEigenpair& pair, const RadialProblem& problem);
/// CSV with header `r,phi,dphi`.
std::string eigenpair_csv(const RadialEigenpair& pair);

} // namespace rfk::radial
