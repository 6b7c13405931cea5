// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles/bessel.hpp"
#include "oracles/fd_radial.hpp"
#include "rfk/harness.hpp"
#include "rfk/planar.hpp"
#include "rfk/polygon.hpp"
#include "rfk/radial.hpp"
#include "rfk/transplant.hpp"

using namespace rfk;
using namespace rfk::geometry;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) detail << "; ";
            detail << (pass ? "failed: " : "") << what;
            pass = false;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& ex) {
        out.require(false, std::string("exception: ") + ex.what());
    }
    const double t = seconds_since(t0);
    out.require(t < budget_s, "runtime " + std::to_string(t) + " s over budget");
    if (!out.pass) ++failures;
    std::printf("criterion %2d %s  %-34s %7.2f s (budget %g s)  %s\n", id, out.pass ? "PASS" : "FAIL", name, t,
                budget_s, out.detail.str().c_str());
    std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

radial::RadialProblem problem(int dim, double p, double R0, double R1, radial::BoundaryCondition in,
                              radial::BoundaryCondition out) {
    radial::RadialProblem pr;
    pr.params = ProblemParams(dim, p);
    pr.R0 = R0;
    pr.R1 = R1;
    pr.inner = in;
    pr.outer = out;
    return pr;
}

oracle::FdEnd fd_end(const radial::BoundaryCondition& bc) {
    return bc.kind == radial::BcKind::Dirichlet ? oracle::FdEnd{oracle::End::Dirichlet, 0.0}
                                                : oracle::FdEnd{oracle::End::Neumann, 0.0};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "rfk_acceptance";
    return dir;
}

DomainSpec annulus(double R0, double R1, double e, int dim) {
    if (e == 0.0) return DomainSpec(ConcentricAnnulus{R0, R1}, dim);
    return DomainSpec(EccentricAnnulus{R0, R1, e}, dim);
}

std::string data(const char* name) { return std::string(RFK_TEST_DATA_DIR) + "/" + name; }

const auto D = radial::BoundaryCondition::dirichlet();
const auto Nm = radial::BoundaryCondition::neumann();

// Random eccentric annuli; each run writes one iso report per annulus.
std::vector<std::string> iso_batch(const fs::path& root, Outcome& out) {
    std::mt19937_64 rng(20241015);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::string> digests;
    for (int i = 0; i < 50; ++i) {
        harness::ExperimentConfig c;
        c.command = {"verify", "iso"};
        c.N = i % 2 == 0 ? 2 : 3;
        c.R1 = 1.0 + 2.0 * unit(rng);
        c.R0 = c.R1 * (0.1 + 0.6 * unit(rng));
        const double room = c.R1 - c.R0;
        // Every fifth annulus is concentric.
        c.e = i % 5 == 0 ? 0.0 : room * (0.05 + 0.9 * unit(rng));
        c.profile_grid = 1024;
        c.seed = 7;
        c.output_dir = (root / ("annulus_" + std::to_string(i))).string();
        const harness::RunResult r = harness::run(c);
        out.require(r.exit_code == 0, "annulus " + std::to_string(i) + " exit " + std::to_string(r.exit_code));
        const auto rep = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "verify_iso_outer.json"));
        double lo = 0.0;
        for (double m : rep["margins"]) lo = std::min(lo, m);
        out.require(lo >= -1e-10, "annulus " + std::to_string(i) + " margin " + std::to_string(lo));
        const bool equality = rep["verdict"] == "HoldsWithEquality";
        out.require(equality == (c.e == 0.0), "annulus " + std::to_string(i) + " equality does not match e = 0");
        for (const auto& f : r.files) digests.push_back(f.path + ":" + f.sha256);
        digests.push_back(harness::sha256_hex(slurp(r.manifest_path)));
    }
    return digests;
}

// Outer transplant sweep through the harness; returns file digests.
std::vector<std::string> theorem1_batch(const fs::path& root, Outcome& out) {
    std::vector<std::string> digests;
    int idx = 0;
    for (double p : {1.5, 2.0, 3.0})
        for (double e : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            harness::ExperimentConfig c;
            c.command = {"verify", "theorem1"};
            c.R0 = 0.5;
            c.R1 = 2.0;
            c.e = e;
            c.N = 3;
            c.p = p;
            c.output_dir = (root / ("point_" + std::to_string(idx++))).string();
            const harness::RunResult r = harness::run(c);
            const std::string tag = "p=" + std::to_string(p) + " e=" + std::to_string(e);
            out.require(r.exit_code == 0, tag + " exit " + std::to_string(r.exit_code) + " " + r.error);
            if (r.exit_code != 0) continue;
            const auto rep = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "verify_theorem1_outer.json"));
            const auto& tr = rep["meta"]["transplant"];
            const double margin = tr["margins"]["margin"].get<double>();
            const double ref = tr["reference"].get<double>();
            if (e == 0.0)
                out.require(std::abs(margin) <= 1e-8 * ref, tag + " concentric margin " + std::to_string(margin));
            else
                out.require(margin > 0.0 && rep["verdict"] == "Holds", tag + " margin " + std::to_string(margin));
            for (const auto& f : r.files) digests.push_back(f.path + ":" + f.sha256);
            digests.push_back(harness::sha256_hex(slurp(r.manifest_path)));
        }
    return digests;
}

} // namespace

int main() {
    const fs::path root = work_dir();
    fs::remove_all(root);
    fs::create_directories(root);

    criterion(1, "radial solver exactness", 4.0, [](Outcome& out) {
        const auto t0 = std::chrono::steady_clock::now();
        const double ball = radial::solve_first_radial(problem(3, 2.0, 0.0, 1.0, Nm, D)).eigenvalue;
        out.require(rel(ball, pi * pi) <= 1e-6, "ball N=3 " + std::to_string(ball));
        out.require(seconds_since(t0) < 1.0, "ball runtime");
        for (double p : {1.5, 2.0, 3.0}) {
            const auto t1 = std::chrono::steady_clock::now();
            const double pi_p = 2.0 * pi / (p * std::sin(pi / p));
            const double exact = (p - 1.0) * std::pow(pi_p, p);
            const double got = radial::solve_first_radial(problem(1, p, 0.0, 1.0, D, D)).eigenvalue;
            out.require(rel(got, exact) <= 1e-6, "N=1 p=" + std::to_string(p));
            out.require(seconds_since(t1) < 1.0, "N=1 runtime");
        }
    });

    criterion(2, "oracle agreement", 30.0, [](Outcome& out) {
        const radial::BoundaryCondition patterns[4][2] = {{Nm, D}, {D, Nm}, {D, D}, {Nm, Nm}};
        for (int dim : {2, 3})
            for (const auto& bc : patterns) {
                const auto pr = problem(dim, 2.0, 1.0, 2.0, bc[0], bc[1]);
                const double shoot = radial::solve_first_radial(pr).eigenvalue;
                const double fd = oracle::fd_eigenvalue({dim, 1.0, 2.0, fd_end(bc[0]), fd_end(bc[1])}, 0);
                const std::string tag = "N=" + std::to_string(dim) + " " + radial::to_string(bc[0]) + "/" +
                                        radial::to_string(bc[1]);
                // The Neumann-Neumann eigenvalue is 0 and is compared absolutely.
                const bool nn = bc[0].kind == radial::BcKind::Neumann && bc[1].kind == radial::BcKind::Neumann;
                out.require(nn ? std::abs(shoot - fd) <= 1e-6 : rel(shoot, fd) <= 1e-6, tag + " shooting vs FD");
                if (dim != 2) continue;
                const planar::Mesh mesh = planar::mesh_annulus(DomainSpec(ConcentricAnnulus{1.0, 2.0}, 2), 0.02);
                const planar::DirichletSet set{bc[1].kind == radial::BcKind::Dirichlet,
                                               bc[0].kind == radial::BcKind::Dirichlet};
                const double mesh_value = planar::p2_eig(mesh, set).eigenvalue;
                out.require(nn ? std::abs(mesh_value - shoot) <= 1e-6 : rel(mesh_value, shoot) <= 5e-3,
                            tag + " mesh vs shooting");
            }
    });

    std::vector<std::string> iso_first, t1_first;
    criterion(3, "isoperimetric lemma", 10.0, [&](Outcome& out) { iso_first = iso_batch(root / "c3_a", out); });

    criterion(4, "Nagy inequality on polygons", 60.0, [](Outcome& out) {
        const ProblemParams pp(2, 2.0);
        for (const char* name : {"square.txt", "lshape.txt", "square_hole.txt", "steiner.txt"}) {
            const DomainSpec d(polygon::read_file(data(name)), 2);
            for (Side side : {Side::FromOuter, Side::FromInner}) {
                if (side == Side::FromInner && !d.has_hole()) continue;
                const auto rep = check_nagy(parallel_profile_polygon(d, side), pp);
                out.require(rep.holds() && rep.tolerance <= 0.02, std::string(name) + " " + to_string(side));
            }
        }
        const DomainSpec steiner(polygon::read_file(data("steiner.txt")), 2);
        const auto eq = check_nagy(parallel_profile_polygon(steiner, Side::FromInner), pp);
        out.require(eq.verdict == Verdict::HoldsWithEquality, "Steiner case is not an equality");
    });

    criterion(5, "outer transplant certification", 300.0, [&](Outcome& out) {
        t1_first = theorem1_batch(root / "c5_a", out);
        for (double e : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const DomainSpec d = annulus(0.5, 2.0, e, 2);
            const auto res = transplant::verify_rfk(d, ProblemParams(2, 2.0), Side::FromOuter);
            const double q = res.meta["quotient"].get<double>();
            const double oracle = planar::oracle_first(d, {true, false}, 2.0, 0.02).eigenvalue;
            out.require(oracle <= q * (1.0 + 5e-3), "2D oracle above quotient at e=" + std::to_string(e));
        }
    });

    criterion(6, "inner transplant certification", 300.0, [](Outcome& out) {
        for (double p : {1.5, 2.0, 3.0})
            for (double e : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const auto o = transplant::verify_rfk_detailed(annulus(0.5, 2.0, e, 3), ProblemParams(3, p),
                                                               Side::FromInner);
                const auto& tr = o.transplant;
                const std::string tag = "p=" + std::to_string(p) + " e=" + std::to_string(e);
                if (e == 0.0)
                    out.require(std::abs(tr.margin) <= 1e-8 * tr.reference, tag + " concentric margin");
                else
                    out.require(tr.margin > 0.0 && o.report.verdict == Verdict::Holds, tag + " not strict");
                out.require(tr.quotient <= tr.reference * (1.0 + 1e-8), tag + " quotient above reference");
            }
    });

    criterion(7, "planar domain certification", 120.0, [&](Outcome& out) {
        for (double p : {2.0, 3.0}) {
            harness::ExperimentConfig c;
            c.command = {"verify", "theorem3"};
            c.polygon = data("circle_hole.txt");
            c.p = p;
            c.output_dir = (root / ("c7_p" + std::to_string(static_cast<int>(p)))).string();
            const harness::RunResult r = harness::run(c);
            out.require(r.exit_code == 0, "p=" + std::to_string(p) + " exit " + std::to_string(r.exit_code));
            out.require(r.files.size() == 2, "expected one report per side");
        }
    });

    criterion(8, "monotonicity of nu1 in e", 180.0, [&](Outcome& out) {
        harness::ExperimentConfig c;
        c.command = {"sweep", "nu1"};
        c.axis = "e";
        c.from = 0.0;
        c.to = 1.2;
        c.steps = 7;
        c.N = 2;
        c.p = 2.0;
        c.h = 0.02;
        c.jobs = 4;
        c.output_dir = (root / "c8").string();
        const harness::RunResult r = harness::run(c);
        out.require(r.exit_code == 0, "sweep exit " + std::to_string(r.exit_code));
        std::istringstream csv(slurp(fs::path(c.output_dir) / "sweep_nu1.csv"));
        std::string line;
        std::getline(csv, line);
        std::vector<double> e, nu;
        while (std::getline(csv, line)) {
            std::istringstream ls(line);
            std::string a, b;
            std::getline(ls, a, ',');
            std::getline(ls, b, ',');
            e.push_back(std::stod(a));
            nu.push_back(std::stod(b));
        }
        out.require(nu.size() == 7, "sweep rows");
        // Discretisation tolerance: change under halving h.
        std::vector<double> tol(nu.size());
        for (std::size_t i = 0; i < nu.size(); ++i) {
            const double fine = planar::oracle_first(annulus(0.5, 2.0, e[i], 2), {true, false}, 2.0, 0.01).eigenvalue;
            tol[i] = std::abs(nu[i] - fine);
        }
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < nu.size(); ++i) {
            const double gap = nu[i - 1] - nu[i];
            const double need = 3.0 * std::max(tol[i - 1], tol[i]);
            worst = std::min(worst, gap / need);
            out.require(gap > need, "gap at e=" + std::to_string(e[i]));
        }
        out.detail << "min gap / (3 tol) = " << worst;
    });

    criterion(9, "nodal counterexamples", 180.0, [&](Outcome& out) {
        const DomainSpec disk(Ball{1.0}, 2);
        const ProblemParams pp(2, 2.0);
        const double j11 = oracle::bessel_zero(1.0);
        const auto cand = planar::nodal_radial_candidate(disk, pp, planar::NodalKind::Mu2);
        out.require(rel(cand.candidate_value, j11 * j11) <= 1e-6, "mu2 candidate vs Bessel");
        const double jp = oracle::bessel_prime_zero(1.0);
        const auto mu2 =
            planar::p2_eig(planar::mesh_annulus(disk, 0.02), {}, planar::EigenMode::SecondNeumann).eigenvalue;
        out.require(rel(mu2, jp * jp) <= 5e-3, "oracle mu2 vs Bessel");
        out.require(cand.candidate_value > mu2, "candidate does not exceed mu2");
        for (double s : {0.05, 0.1})
            out.require(planar::nodal_counterexample(disk, pp, s, planar::NodalKind::Mu2).verdict == Verdict::Holds,
                        "disk mu2 s=" + std::to_string(s));
        const DomainSpec ann(ConcentricAnnulus{1.0, 2.0}, 2);
        for (auto k : {planar::NodalKind::Nu2, planar::NodalKind::Tau2})
            for (double s : {0.05, 0.1})
                out.require(planar::nodal_counterexample(ann, pp, s, k).verdict == Verdict::Holds,
                            planar::to_string(k) + " s=" + std::to_string(s));
    });

    criterion(10, "elasticity remark", 120.0, [](Outcome& out) {
        const ProblemParams pp(3, 2.0);
        for (double e : {0.5, 1.0}) {
            const DomainSpec d = annulus(0.5, 2.0, e, 3);
            for (double k : {0.1, 1.0, 10.0}) {
                transplant::VerifyOptions opt;
                opt.outer = radial::BoundaryCondition::robin(k);
                const auto o = transplant::verify_rfk_detailed(d, pp, Side::FromOuter, opt);
                out.require(o.report.verdict == Verdict::Holds &&
                                o.transplant.quotient <= o.transplant.reference * (1.0 + 1e-8),
                            "k=" + std::to_string(k) + " e=" + std::to_string(e));
            }
            transplant::VerifyOptions stiff;
            stiff.outer = radial::BoundaryCondition::robin(1e6);
            const auto r = transplant::verify_rfk_detailed(d, pp, Side::FromOuter, stiff);
            const auto dir = transplant::verify_rfk_detailed(d, pp, Side::FromOuter);
            out.require(rel(r.transplant.reference, dir.transplant.reference) <= 1e-3, "k=1e6 reference limit");
            out.require(rel(r.transplant.quotient, dir.transplant.quotient) <= 1e-3, "k=1e6 quotient limit");
        }
    });

    criterion(11, "determinism", 320.0, [&](Outcome& out) {
        Outcome scratch;
        const auto iso_again = iso_batch(root / "c3_b", scratch);
        const auto t1_again = theorem1_batch(root / "c5_b", scratch);
        out.require(!iso_first.empty() && iso_first == iso_again, "criterion 3 outputs differ");
        out.require(!t1_first.empty() && t1_first == t1_again, "criterion 5 outputs differ");
        out.detail << iso_again.size() + t1_again.size() << " digests compared";
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures;
}
