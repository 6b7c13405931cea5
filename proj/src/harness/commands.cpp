#include "commands.hpp"

#include "rfk/io.hpp"
#include "rfk/planar.hpp"
#include "rfk/radial.hpp"
#include "rfk/transplant.hpp"

namespace rfk::harness::detail {

using geometry::Side;

ProblemParams problem_params(const ExperimentConfig& c) { return ProblemParams(c.N, c.p); }

radial::SolverOptions solver_options(const ExperimentConfig& c) {
    radial::SolverOptions opt;
    opt.tol = c.radial_tol;
    opt.output_nodes = c.radial_nodes;
    return opt;
}

transplant::VerifyOptions verify_options(const ExperimentConfig& c) {
    transplant::VerifyOptions opt;
    opt.profile_grid = c.profile_grid;
    opt.polygon_grid = c.polygon_grid;
    opt.field_resolution = c.field_resolution;
    opt.lower_anchor = c.lower_anchor;
    opt.solver = solver_options(c);
    return opt;
}

geometry::ParallelProfile build_profile(const geometry::DomainSpec& d, Side side, const ExperimentConfig& c) {
    const std::string method = c.profile_method.empty() ? (d.is_polygon() ? "polygon" : "exact") : c.profile_method;
    if (method == "exact") return geometry::parallel_profile_exact(d, side, problem_params(c), c.profile_grid);
    if (method == "polygon") return geometry::parallel_profile_polygon(d, side, c.polygon_grid, c.field_resolution);
    if (method == "mc") {
        geometry::MonteCarloOptions opt;
        opt.grid_size = c.profile_grid;
        opt.samples = c.samples;
        opt.seed = c.seed;
        opt.threads = c.jobs;
        return geometry::parallel_profile_mc(d, side, opt);
    }
    throw InvalidInput("unknown profile method '" + method + "' (exact, mc, polygon)");
}

planar::DirichletSet dirichlet_set(const std::string& name) {
    if (name == "outer") return {true, false};
    if (name == "inner") return {false, true};
    if (name == "both") return {true, true};
    if (name == "none") return {false, false};
    throw InvalidInput("unknown Dirichlet set '" + name + "' (outer, inner, both, none)");
}

planar::Eigenpair2D oracle_eigenpair(const planar::Mesh& mesh, const ExperimentConfig& c) {
    const planar::DirichletSet set = dirichlet_set(c.dirichlet);
    planar::EigenMode mode = planar::EigenMode::First;
    if (c.eigen_mode == "second_neumann")
        mode = planar::EigenMode::SecondNeumann;
    else if (c.eigen_mode != "first")
        throw InvalidInput("unknown eigen mode '" + c.eigen_mode + "' (first, second_neumann)");
    if (c.p == 2.0) {
        planar::OracleOptions opt;
        if (c.solver == "pcg")
            opt.solver = planar::LinearSolver::Pcg;
        else if (c.solver != "cholesky")
            throw InvalidInput("unknown solver '" + c.solver + "' (cholesky, pcg)");
        return planar::p2_eig(mesh, set, mode, opt);
    }
    if (mode != planar::EigenMode::First) throw InvalidInput("second_neumann needs p = 2");
    planar::DescentOptions opt;
    opt.seed = c.seed;
    return planar::plap_eig_descent(mesh, set, c.p, opt);
}

void run_radial(const ExperimentConfig& c, Sink& sink) {
    radial::RadialProblem pr;
    pr.params = problem_params(c);
    pr.R0 = c.R0;
    pr.R1 = c.R1;
    pr.inner = radial::bc_from_string(c.inner_bc, c.k);
    pr.outer = radial::bc_from_string(c.outer_bc, c.k);
    if (c.mode == "second")
        pr.mode = radial::Mode::SecondRadial;
    else if (c.mode != "first")
        throw InvalidInput("unknown radial mode '" + c.mode + "' (first, second)");
    const radial::RadialEigenpair pair = radial::solve_radial(pr, solver_options(c));
    sink.write_json("radial.json", with_settings(radial::to_json(pair, pr), c));
    sink.write("radial.csv", radial::eigenpair_csv(pair));
    sink.note("radial: lambda = " + io::fmt(pair.eigenvalue));
}

void run_profile(const ExperimentConfig& c, Sink& sink) {
    const geometry::DomainSpec d = make_domain(c);
    for (Side side : sides(c)) {
        const auto prof = build_profile(d, side, c);
        const std::string stem = "profile_" + geometry::to_string(side);
        sink.write(stem + ".csv", geometry::profile_csv(prof));
        sink.write_json(stem + ".json", with_settings(geometry::profile_metadata(prof), c));
        sink.note(stem + ": " + std::to_string(prof.size()) + " nodes, delta_Omega = " + io::fmt(prof.delta_omega));
    }
}

void run_maps(const ExperimentConfig& c, Sink& sink) {
    const geometry::DomainSpec d = make_domain(c);
    for (Side side : sides(c)) {
        const auto maps = transplant::build_maps(build_profile(d, side, c), problem_params(c));
        const std::string stem = "maps_" + geometry::to_string(side);
        sink.write(stem + ".csv", transplant::maps_csv(maps));
        sink.write_json(stem + ".json", with_settings(transplant::maps_metadata(maps), c));
        sink.note(stem + ": " + std::to_string(maps.delta.size()) + " knots");
    }
}

namespace {

void emit_report(Sink& sink, const std::string& stem, const VerificationReport& rep, const ExperimentConfig& c) {
    sink.write_json(stem + ".json", with_settings(to_json(rep, true), c));
    sink.verdict(stem, rep);
}

void verify_transplant(const ExperimentConfig& c, Sink& sink, const std::string& check, Side side) {
    const auto out = transplant::verify_rfk_detailed(make_domain(c), problem_params(c), side, verify_options(c));
    emit_report(sink, "verify_" + check + "_" + geometry::to_string(side), out.report, c);
}

} // namespace

void run_verify(const ExperimentConfig& c, Sink& sink) {
    if (c.command.size() < 2) throw InvalidInput("verify needs a check name");
    const std::string& check = c.command[1];
    if (check == "theorem1") return verify_transplant(c, sink, check, Side::FromOuter);
    if (check == "theorem2") return verify_transplant(c, sink, check, Side::FromInner);
    if (check == "theorem3") {
        if (c.N != 2) throw InvalidInput("theorem3 is planar (N = 2)");
        for (Side side : {Side::FromOuter, Side::FromInner}) verify_transplant(c, sink, check, side);
        return;
    }
    const geometry::DomainSpec d = make_domain(c);
    const ProblemParams pp = problem_params(c);
    if (check == "nagy") {
        for (Side side : sides(c))
            emit_report(sink, "verify_nagy_" + geometry::to_string(side), geometry::check_nagy(build_profile(d, side, c), pp),
                        c);
        return;
    }
    if (check == "iso") {
        emit_report(sink, "verify_iso_outer", geometry::check_isoperimetric(build_profile(d, Side::FromOuter, c), pp), c);
        return;
    }
    if (check == "lemmas") {
        for (Side side : sides(c)) {
            const auto maps = transplant::build_maps(build_profile(d, side, c), pp);
            emit_report(sink, "verify_lemmas_" + geometry::to_string(side), transplant::check_map_lemmas(maps), c);
        }
        return;
    }
    throw InvalidInput("unknown check '" + check + "'");
}

void run_oracle2d(const ExperimentConfig& c, Sink& sink) {
    const planar::Mesh mesh = planar::mesh_annulus(make_domain(c), c.h);
    const planar::Eigenpair2D pair = oracle_eigenpair(mesh, c);
    nlohmann::json j = planar::to_json(pair);
    j["mesh"] = {{"h", c.h}, {"vertices", mesh.size()}, {"triangles", mesh.triangles.size()},
                 {"max_edge", mesh.max_edge()}};
    sink.write_json("oracle.json", with_settings(j, c));
    sink.write("oracle_values.csv", planar::eigenpair_csv(pair));
    sink.write("mesh.txt", planar::mesh_to_text(mesh));
    sink.note("oracle2d: eigenvalue = " + io::fmt(pair.eigenvalue) + " on " + std::to_string(mesh.size()) +
              " vertices");
}

void run_nodal(const ExperimentConfig& c, Sink& sink) {
    if (c.command.size() < 2) throw InvalidInput("nodal needs candidate or counterexample");
    const planar::NodalKind which = planar::nodal_kind_from_string(c.which);
    const geometry::DomainSpec d = make_domain(c);
    if (c.command[1] == "candidate") {
        const planar::NodalCandidate cand = planar::nodal_radial_candidate(d, problem_params(c), which);
        nlohmann::json j;
        j["schema"] = 1;
        j["which"] = planar::to_string(which);
        j["candidate_value"] = cand.candidate_value;
        j["split_radius"] = cand.split_radius;
        j["inner_value"] = cand.inner_value;
        j["outer_value"] = cand.outer_value;
        j["normalization"] = cand.normalization;
        j["problem"] = radial::to_json(cand.problem);
        sink.write_json("nodal_candidate.json", with_settings(j, c));
        sink.note("nodal candidate " + planar::to_string(which) + ": " + io::fmt(cand.candidate_value) + " at r* = " +
                  io::fmt(cand.split_radius));
        return;
    }
    if (c.command[1] != "counterexample") throw InvalidInput("nodal needs candidate or counterexample");
    planar::NodalOptions opt;
    opt.mesh_h = c.h;
    opt.tolerance = c.nodal_tolerance;
    emit_report(sink, "nodal_counterexample_" + planar::to_string(which),
                planar::nodal_counterexample(d, problem_params(c), c.shift, which, opt), c);
}

void run_elasticity(const ExperimentConfig& c, Sink& sink) {
    transplant::VerifyOptions opt = verify_options(c);
    opt.outer = radial::BoundaryCondition::robin(c.k);
    const auto out = transplant::verify_rfk_detailed(make_domain(c), problem_params(c), Side::FromOuter, opt);
    emit_report(sink, "elasticity", out.report, c);
}

} // namespace rfk::harness::detail
