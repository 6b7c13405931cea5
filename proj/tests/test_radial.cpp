#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles/bessel.hpp"
#include "oracles/fd_radial.hpp"
#include "rfk/radial.hpp"

using namespace rfk;
using namespace rfk::radial;
using std::numbers::pi;

namespace {

RadialProblem make(int dim, double p, double R0, double R1, BoundaryCondition in, BoundaryCondition out,
                   Mode mode = Mode::FirstEigen) {
    RadialProblem pr;
    pr.params = ProblemParams(dim, p);
    pr.R0 = R0;
    pr.R1 = R1;
    pr.inner = in;
    pr.outer = out;
    pr.mode = mode;
    return pr;
}

oracle::FdEnd fd_end(const BoundaryCondition& bc) {
    switch (bc.kind) {
    case BcKind::Dirichlet: return {oracle::End::Dirichlet, 0.0};
    case BcKind::Neumann: return {oracle::End::Neumann, 0.0};
    case BcKind::Robin: return {oracle::End::Robin, bc.k};
    }
    return {};
}

double fd(const RadialProblem& pr, std::size_t k) {
    return oracle::fd_eigenvalue({pr.params.dim(), pr.R0, pr.R1, fd_end(pr.inner), fd_end(pr.outer)}, k);
}

double pi_p(double p) { return 2.0 * pi / (p * std::sin(pi / p)); }

const auto D = BoundaryCondition::dirichlet();
const auto Nm = BoundaryCondition::neumann();

} // namespace

TEST_CASE("boundary condition parsing and validation") {
    CHECK(bc_from_string("robin", 2.0).k == 2.0);
    CHECK(to_string(bc_from_string("D")) == "dirichlet");
    CHECK_THROWS_AS(bc_from_string("mixed"), InvalidInput);
    CHECK_THROWS_AS(make(2, 2, 0.0, 1.0, D, D).validate(), InvalidInput);
    CHECK_THROWS_AS(make(2, 2, 1.0, 1.0, Nm, D).validate(), InvalidInput);
    CHECK_THROWS_AS(make(2, 2, 1.0, 2.0, Nm, BoundaryCondition::robin(0.0)).validate(), InvalidInput);
    CHECK_THROWS_AS(shoot(make(2, 2, 1, 2, Nm, D), -1.0), InvalidInput);
}

TEST_CASE("shooting examples") {
    auto sine = shoot(make(1, 2, 0, 1, D, D), pi * pi);
    CHECK(std::abs(sine.end_residual) < 1e-9);
    CHECK(sine.zero_count == 0);

    auto flat = shoot(make(2, 2, 1, 2, Nm, Nm), 0.0, true);
    CHECK(flat.end_residual == 0.0);
    for (double v : flat.phi) CHECK(v == 1.0);

    auto ball = shoot(make(3, 2, 0, 1, Nm, D), 9.0);
    CHECK(ball.end_residual > 0.0);
    // The FD oracle puts the first eigenvalue above 9, so phi(1) > 0 there.
    CHECK(fd(make(3, 2, 0, 1, Nm, D), 0) > 9.0);
}

TEST_CASE("ball and one-dimensional closed forms") {
    const auto t0 = std::chrono::steady_clock::now();
    auto ball = solve_first_radial(make(3, 2, 0, 1, Nm, D));
    CHECK(ball.eigenvalue == doctest::Approx(pi * pi).epsilon(1e-6));
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
    // sin(pi r)/(pi r), normalised to phi(0) = 1.
    CHECK(ball.phi_at(0.5) == doctest::Approx(std::sin(pi * 0.5) / (pi * 0.5)).epsilon(1e-6));

    for (double p : {1.5, 2.0, 3.0}) {
        auto one = solve_first_radial(make(1, p, 0, 1, D, D));
        CHECK(one.eigenvalue == doctest::Approx((p - 1.0) * std::pow(pi_p(p), p)).epsilon(1e-6));
    }
    auto second = solve_second_radial(make(1, 2, 0, 1, D, D));
    CHECK(second.eigenvalue == doctest::Approx(4 * pi * pi).epsilon(1e-6));
    REQUIRE(second.nodal_radius);
    CHECK(*second.nodal_radius == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("finite-difference cross-oracle for all end patterns") {
    const BoundaryCondition patterns[4][2] = {{Nm, D}, {D, Nm}, {D, D}, {Nm, Nm}};
    for (int dim : {2, 3}) {
        for (const auto& bc : patterns) {
            const auto pr = make(dim, 2, 1, 2, bc[0], bc[1]);
            const double lam = solve_first_radial(pr).eigenvalue;
            const double ref = fd(pr, 0);
            CAPTURE(dim);
            CAPTURE(to_string(bc[0]));
            CAPTURE(to_string(bc[1]));
            if (bc[0].kind == BcKind::Neumann && bc[1].kind == BcKind::Neumann)
                CHECK(std::abs(lam - ref) < 1e-6);
            else
                CHECK(lam == doctest::Approx(ref).epsilon(1e-6));
        }
        auto rob = make(dim, 2, 1, 2, BoundaryCondition::robin(1.5), D);
        CHECK(solve_first_radial(rob).eigenvalue == doctest::Approx(fd(rob, 0)).epsilon(1e-6));
        auto nu2 = make(dim, 2, 1, 2, Nm, D, Mode::SecondRadial);
        CHECK(solve_second_radial(nu2).eigenvalue == doctest::Approx(fd(nu2, 1)).epsilon(1e-6));
    }
}

TEST_CASE("Bessel zeros for the disk") {
    const double j01 = oracle::bessel_zero(0.0);
    const double j11 = oracle::bessel_zero(1.0);
    CHECK(j01 == doctest::Approx(2.4048).epsilon(1e-4));
    CHECK(j11 == doctest::Approx(3.8317).epsilon(1e-4));
    CHECK(oracle::bessel_prime_zero(1.0) == doctest::Approx(1.8412).epsilon(1e-4));

    auto first = solve_first_radial(make(2, 2, 0, 1, Nm, D));
    CHECK(first.eigenvalue == doctest::Approx(j01 * j01).epsilon(1e-6));

    // Radial Neumann overtone: J0'(k) = -J1(k) = 0.
    auto over = solve_second_radial(make(2, 2, 0, 1, Nm, Nm));
    CHECK(over.eigenvalue == doctest::Approx(j11 * j11).epsilon(1e-6));
    REQUIRE(over.nodal_radius);
    CHECK(*over.nodal_radius == doctest::Approx(j01 / j11).epsilon(1e-6));

    // Restricting to the nodal ball reproduces the same eigenvalue.
    auto piece = solve_first_radial(make(2, 2, 0, *over.nodal_radius, Nm, D));
    CHECK(piece.eigenvalue == doctest::Approx(over.eigenvalue).epsilon(1e-8));
}

TEST_CASE("split consistency on an annulus at p = 3") {
    auto pr = make(2, 3, 1, 2, Nm, D, Mode::SecondRadial);
    auto two = solve_second_radial(pr);
    REQUIRE(two.nodal_radius);
    const double rs = *two.nodal_radius;
    auto inner = solve_first_radial(make(2, 3, 1, rs, Nm, D));
    auto outer = solve_first_radial(make(2, 3, rs, 2, D, D));
    CHECK(inner.eigenvalue == doctest::Approx(two.eigenvalue).epsilon(1e-8));
    CHECK(outer.eigenvalue == doctest::Approx(two.eigenvalue).epsilon(1e-8));
}

TEST_CASE("Rayleigh quotient consistency") {
    for (double p : {1.5, 2.0, 3.0}) {
        for (const auto& pr : {make(2, p, 1, 2, Nm, D), make(3, p, 0, 1, Nm, D), make(2, p, 1, 2, D, Nm),
                               make(3, p, 1, 2, Nm, BoundaryCondition::robin(2.0))}) {
            auto pair = solve_first_radial(pr);
            CAPTURE(p);
            CHECK(rayleigh_radial(pair, pr) == doctest::Approx(pair.eigenvalue).epsilon(1e-6));
        }
    }
    auto nn = make(2, 2, 1, 2, Nm, Nm);
    auto flat = solve_first_radial(nn);
    CHECK(flat.eigenvalue == 0.0);
    CHECK(rayleigh_radial(flat, nn) == 0.0);
}

TEST_CASE("scaling law") {
    for (double p : {1.5, 2.0, 3.0}) {
        for (const auto& pr : {make(2, p, 1, 2, Nm, D), make(3, p, 1, 2, D, Nm), make(3, p, 0, 1, Nm, D)}) {
            const double base = solve_first_radial(pr).eigenvalue;
            for (double c : {0.5, 2.0}) {
                auto scaled = pr;
                scaled.R0 *= c;
                scaled.R1 *= c;
                CHECK(solve_first_radial(scaled).eigenvalue ==
                      doctest::Approx(base * std::pow(c, -p)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("domain monotonicity and positivity") {
    for (double p : {2.0, 3.0}) {
        double prev = INFINITY;
        for (double R1 : {1.5, 1.75, 2.0, 2.5}) {
            auto pair = solve_first_radial(make(3, p, 1, R1, Nm, D));
            CHECK(pair.eigenvalue < prev - 1e-8);
            prev = pair.eigenvalue;
            double lowest = INFINITY;
            for (std::size_t i = 1; i + 1 < pair.phi.size(); ++i) lowest = std::min(lowest, pair.phi[i]);
            CHECK(lowest > 0.0);
            double peak = 0.0;
            for (double v : pair.phi) peak = std::max(peak, std::abs(v));
            CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("Robin limits") {
    for (int dim : {2, 3}) {
        const double dir = solve_first_radial(make(dim, 2, 1, 2, Nm, D)).eigenvalue;
        const double stiff = solve_first_radial(make(dim, 2, 1, 2, Nm, BoundaryCondition::robin(1e6))).eigenvalue;
        CHECK(stiff == doctest::Approx(dir).epsilon(1e-3));
        const double soft = solve_first_radial(make(dim, 2, 1, 2, Nm, BoundaryCondition::robin(1e-6))).eigenvalue;
        CHECK(soft < 1e-4);
        CHECK(soft > 0.0);
    }
}

TEST_CASE("bracketing failure carries a scan trace") {
    SolverOptions opt;
    opt.lambda_max = 1.0;
    try {
        solve_first_radial(make(3, 2, 0, 1, Nm, D), opt);
        FAIL("expected failure");
    } catch (const NumericalFailure& e) {
        CHECK(std::string(e.what()).find("scan trace") != std::string::npos);
    }
}

TEST_CASE("serialisation") {
    auto pr = make(2, 2, 1, 2, Nm, D, Mode::SecondRadial);
    auto pair = solve_radial(pr);
    auto j = to_json(pair, pr);
    CHECK(j["schema"] == 1);
    CHECK(j["problem"]["outer"] == "dirichlet");
    CHECK(j.contains("nodal_radius"));
    const std::string csv = eigenpair_csv(pair);
    CHECK(csv.rfind("r,phi,dphi\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == pair.r.size() + 1);
}
