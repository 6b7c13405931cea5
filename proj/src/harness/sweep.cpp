#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "commands.hpp"
#include "rfk/io.hpp"

namespace rfk::harness {

namespace {

using geometry::Side;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PointResult {
    std::vector<double> row;
    /// Empty for quantities without a verdict.
    std::optional<VerificationReport> report;
};

void set_axis(ExperimentConfig& c, const std::string& axis, double value) {
    if (axis == "e")
        c.e = value;
    else if (axis == "p")
        c.p = value;
    else if (axis == "R0")
        c.R0 = value;
    else if (axis == "R1")
        c.R1 = value;
    else if (axis == "k")
        c.k = value;
    else if (axis == "shift")
        c.shift = value;
    else if (axis == "h")
        c.h = value;
    else
        throw InvalidInput("unknown sweep axis '" + axis + "' (e, p, R0, R1, k, shift, h)");
}

double oracle_value(const ExperimentConfig& c, const geometry::DomainSpec& d, const char* dirichlet) {
    if (c.N != 2 || d.is_polygon()) return kNaN;
    ExperimentConfig oc = c;
    oc.dirichlet = dirichlet;
    oc.eigen_mode = "first";
    return detail::oracle_eigenpair(planar::mesh_annulus(d, c.h), oc).eigenvalue;
}

PointResult evaluate(const std::string& quantity, const ExperimentConfig& c) {
    PointResult out;
    const ProblemParams pp = detail::problem_params(c);
    if (quantity == "nu1" || quantity == "tau1") {
        const geometry::DomainSpec d = make_domain(c);
        const bool outer = quantity == "nu1";
        const auto res = transplant::verify_rfk_detailed(d, pp, outer ? Side::FromOuter : Side::FromInner,
                                                         detail::verify_options(c));
        out.row = {oracle_value(c, d, outer ? "outer" : "inner"), res.transplant.quotient, res.transplant.reference};
        out.report = res.report;
        return out;
    }
    if (quantity == "elasticity") {
        transplant::VerifyOptions opt = detail::verify_options(c);
        opt.outer = radial::BoundaryCondition::robin(c.k);
        const auto res = transplant::verify_rfk_detailed(make_domain(c), pp, Side::FromOuter, opt);
        out.row = {res.transplant.quotient, res.transplant.reference, res.transplant.margin};
        out.report = res.report;
        return out;
    }
    if (quantity == "radial") {
        radial::RadialProblem pr;
        pr.params = pp;
        pr.R0 = c.R0;
        pr.R1 = c.R1;
        pr.inner = radial::bc_from_string(c.inner_bc, c.k);
        pr.outer = radial::bc_from_string(c.outer_bc, c.k);
        if (c.mode == "second") pr.mode = radial::Mode::SecondRadial;
        out.row = {radial::solve_radial(pr, detail::solver_options(c)).eigenvalue};
        return out;
    }
    if (quantity == "nodal") {
        planar::NodalOptions opt;
        opt.mesh_h = c.h;
        opt.tolerance = c.nodal_tolerance;
        const VerificationReport rep =
            planar::nodal_counterexample(make_domain(c), pp, c.shift, planar::nodal_kind_from_string(c.which), opt);
        out.row = {rep.meta["candidate_value"].get<double>(), rep.meta["max_pair"].get<double>(), rep.worst_margin};
        out.report = rep;
        return out;
    }
    if (quantity == "iso") {
        const geometry::DomainSpec d = make_domain(c);
        const VerificationReport rep = geometry::check_isoperimetric(detail::build_profile(d, Side::FromOuter, c), pp);
        out.row = {rep.worst_margin};
        out.report = rep;
        return out;
    }
    throw InvalidInput("unknown sweep quantity '" + quantity + "'");
}

std::string point_name(const std::string& quantity, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    return "points/" + quantity + "_" + buf + ".json";
}

std::string cell(const nlohmann::json& v) { return v.is_number() ? io::fmt(v.get<double>()) : std::string("nan"); }

} // namespace

std::string sweep_header(const std::string& quantity, const std::string& axis) {
    if (quantity == "nu1") return axis + ",nu1_oracle,transplant_quotient,reference";
    if (quantity == "tau1") return axis + ",tau1_oracle,transplant_quotient,reference";
    if (quantity == "elasticity") return axis + ",transplant_quotient,reference,margin";
    if (quantity == "radial") return axis + ",eigenvalue";
    if (quantity == "nodal") return axis + ",candidate,max_pair,margin";
    if (quantity == "iso") return axis + ",worst_margin";
    throw InvalidInput("unknown sweep quantity '" + quantity + "'");
}

namespace detail {

void run_sweep(const ExperimentConfig& c, Sink& sink) {
    if (c.command.size() < 2) throw InvalidInput("sweep needs a quantity");
    const std::string quantity = c.command[1];
    const std::string header = sweep_header(quantity, c.axis);
    if (c.steps < 1) throw InvalidInput("sweep needs steps >= 1");
    if (c.steps == 1 && c.from != c.to) throw InvalidInput("a single-step sweep needs from = to");
    if (c.jobs < 1) throw InvalidInput("jobs must be >= 1");
    std::vector<double> axis(c.steps);
    for (std::size_t i = 0; i < c.steps; ++i)
        axis[i] = i + 1 == c.steps ? c.to : c.from + (c.to - c.from) * static_cast<double>(i) / (c.steps - 1);
    {
        ExperimentConfig probe = c;
        set_axis(probe, c.axis, axis[0]);
    }

    std::vector<std::exception_ptr> errors(c.steps);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < c.steps; i = next++) {
            try {
                ExperimentConfig pc = c;
                set_axis(pc, c.axis, axis[i]);
                const PointResult r = evaluate(quantity, pc);
                nlohmann::json j;
                j["schema"] = 1;
                j["index"] = i;
                j["axis"] = c.axis;
                j["value"] = axis[i];
                j["row"] = r.row;
                if (r.report) {
                    j["verdict"] = to_string(r.report->verdict);
                    j["worst_margin"] = r.report->worst_margin;
                    j["tolerance"] = r.report->tolerance;
                }
                sink.write_json(point_name(quantity, i), with_settings(j, pc));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min(c.jobs, c.steps);
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Merge in axis order from the per-point files.
    std::string csv = header + "\n";
    for (std::size_t i = 0; i < c.steps; ++i) {
        const nlohmann::json j = nlohmann::json::parse(sink.read(point_name(quantity, i)));
        csv += io::fmt(j["value"].get<double>());
        for (const auto& v : j["row"]) csv += "," + cell(v);
        csv += "\n";
        if (j.contains("verdict")) {
            VerificationReport rep;
            rep.verdict = j["verdict"] == "Violated" ? Verdict::Violated
                          : j["verdict"] == "HoldsWithEquality" ? Verdict::HoldsWithEquality
                                                                : Verdict::Holds;
            rep.worst_margin = j["worst_margin"].get<double>();
            rep.tolerance = j["tolerance"].get<double>();
            sink.verdict(quantity + " " + c.axis + "=" + io::fmt(j["value"].get<double>()), rep);
        }
    }
    sink.write("sweep_" + quantity + ".csv", csv);
}

} // namespace detail

} // namespace rfk::harness
