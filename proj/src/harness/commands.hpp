#pragma once

#include "internal.hpp"
#include "rfk/planar.hpp"
#include "rfk/radial.hpp"
#include "rfk/transplant.hpp"

namespace rfk::harness::detail {

ProblemParams problem_params(const ExperimentConfig& config);
radial::SolverOptions solver_options(const ExperimentConfig& config);
transplant::VerifyOptions verify_options(const ExperimentConfig& config);
geometry::ParallelProfile build_profile(const geometry::DomainSpec& domain, geometry::Side side,
                                        const ExperimentConfig& config);
planar::DirichletSet dirichlet_set(const std::string& name);
/// p2_eig at p = 2, descent otherwise.
planar::Eigenpair2D oracle_eigenpair(const planar::Mesh& mesh, const ExperimentConfig& config);

} // namespace rfk::harness::detail
