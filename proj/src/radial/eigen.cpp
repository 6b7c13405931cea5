#include <algorithm>
#include <cmath>
#include <sstream>

#include "rfk/io.hpp"
#include "rfk/numerics.hpp"
#include "rfk/radial.hpp"

namespace rfk::radial {

namespace {

using numerics::abs_pow;
using numerics::signed_pow;

double weight(int dim, double r) {
    double x = 1.0;
    for (int i = 1; i < dim; ++i) x *= r;
    return x;
}

double flux_to_slope(int dim, double p, double r, double w) {
    if (w == 0.0) return 0.0;
    const double wr = weight(dim, r);
    if (wr == 0.0) return 0.0;
    return signed_pow(w / wr, 1.0 / (p - 1.0));
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Eigenpair assembled from a converged trajectory.
RadialEigenpair build_pair(const RadialProblem& pr, double lambda, const ShootResult& traj,
                           const SolverOptions& opt) {
    RadialEigenpair pair;
    pair.eigenvalue = lambda;
    pair.dim = pr.params.dim();
    pair.p = pr.params.p();
    pair.zero_count = traj.zero_count;
    pair.tolerance = opt.tol;
    pair.node_r = traj.r;
    pair.node_phi = traj.phi;
    pair.node_w = traj.w;

    double peak = 0.0;
    for (double v : traj.phi) peak = std::max(peak, std::abs(v));
    if (!(peak > 0.0)) throw NumericalFailure("eigenfunction vanished identically");
    int orient = 1;
    for (double v : traj.phi)
        if (std::abs(v) > 1e-3 * peak) {
            orient = sign_of(v);
            break;
        }
    const double c = orient / peak;
    const double cw = orient * std::pow(1.0 / peak, pr.params.p() - 1.0);
    for (auto& v : pair.node_phi) v *= c;
    for (auto& v : pair.node_w) v *= cw;

    std::size_t m = opt.output_nodes;
    if (m < 3) m = 3;
    if (m % 2 == 0) ++m;
    pair.r = numerics::linspace(pr.R0, pr.R1, m);
    pair.phi.resize(m);
    pair.dphi.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        pair.phi[i] = pair.phi_at(pair.r[i]);
        pair.dphi[i] = pair.dphi_at(pair.r[i]);
    }
    // Re-normalise so the dense samples also peak at 1.
    double dense_peak = 0.0;
    for (double v : pair.phi) dense_peak = std::max(dense_peak, std::abs(v));
    if (dense_peak > 1.0) {
        const double s = 1.0 / dense_peak;
        const double sw = std::pow(s, pr.params.p() - 1.0);
        for (auto& v : pair.node_phi) v *= s;
        for (auto& v : pair.node_w) v *= sw;
        for (auto& v : pair.phi) v *= s;
        for (auto& v : pair.dphi) v *= s;
    }

    if (pr.mode == Mode::SecondRadial || pair.zero_count > 0) {
        // Nodal radius: root of the Hermite interpolant in the first
        // interval where phi changes sign.
        for (std::size_t i = 1; i < pair.node_r.size(); ++i) {
            const double a = pair.node_phi[i - 1];
            const double b = pair.node_phi[i];
            if (a == 0.0 || sign_of(a) == sign_of(b) || b == 0.0) continue;
            double lo = pair.node_r[i - 1];
            double hi = pair.node_r[i];
            for (int it = 0; it < 200 && hi - lo > 1e-15 * pr.R1; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (sign_of(pair.phi_at(mid)) == sign_of(a))
                    lo = mid;
                else
                    hi = mid;
            }
            pair.nodal_radius = 0.5 * (lo + hi);
            break;
        }
    }
    return pair;
}

RadialEigenpair constant_pair(const RadialProblem& pr, const SolverOptions& opt) {
    ShootResult traj;
    traj.r = {pr.R0, pr.R1};
    traj.phi = {1.0, 1.0};
    traj.w = {0.0, 0.0};
    return build_pair(pr, 0.0, traj, opt);
}

RadialEigenpair solve_mode(const RadialProblem& pr, const SolverOptions& opt, int target_zeros) {
    pr.validate();
    if (!(opt.scan_ratio > 1.0) || !(opt.lambda_start > 0.0) || !(opt.lambda_max > opt.lambda_start))
        throw InvalidInput("bad eigenvalue scan settings");
    std::ostringstream trace;
    double lam = opt.lambda_start;
    ShootResult prev = shoot(pr, lam);
    trace << lam << ":" << prev.end_residual << " ";
    std::size_t scans = 1;
    while (true) {
        const double next_lam = lam * opt.scan_ratio;
        if (next_lam > opt.lambda_max) {
            throw NumericalFailure("no eigenvalue bracket below lambda_max = " + io::fmt(opt.lambda_max) +
                                   "; scan trace (lambda:residual) " + trace.str().substr(0, 2000));
        }
        const ShootResult cur = shoot(pr, next_lam);
        ++scans;
        trace << next_lam << ":" << cur.end_residual << " ";
        if (sign_of(cur.end_residual) != sign_of(prev.end_residual) || cur.end_residual == 0.0) {
            double lo = lam;
            double hi = next_lam;
            const int s_lo = sign_of(prev.end_residual);
            std::size_t bis = 0;
            while (hi - lo > opt.tol * hi) {
                const double mid = 0.5 * (lo + hi);
                const double res = shoot(pr, mid).end_residual;
                ++bis;
                if (res == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (sign_of(res) == s_lo)
                    lo = mid;
                else
                    hi = mid;
            }
            const double lambda = 0.5 * (lo + hi);
            const ShootResult traj = shoot(pr, lambda, true);
            if (traj.zero_count == target_zeros) {
                RadialEigenpair pair = build_pair(pr, lambda, traj, opt);
                pair.scan_steps = scans;
                pair.bisection_steps = bis;
                return pair;
            }
            if (traj.zero_count > target_zeros)
                throw NumericalFailure("eigenvalue scan skipped the requested mode (found " +
                                       std::to_string(traj.zero_count) + " interior zeros at lambda = " +
                                       io::fmt(lambda) + ")");
        }
        lam = next_lam;
        prev = cur;
    }
}

} // namespace

double RadialEigenpair::phi_at(double r) const {
    if (node_r.empty()) throw InvalidInput("empty eigenpair");
    if (r <= node_r.front()) return node_phi.front();
    if (r >= node_r.back()) return node_phi.back();
    const auto it = std::upper_bound(node_r.begin(), node_r.end(), r);
    const std::size_t j = static_cast<std::size_t>(it - node_r.begin());
    const std::size_t i = j - 1;
    const double d0 = flux_to_slope(dim, p, node_r[i], node_w[i]);
    const double d1 = flux_to_slope(dim, p, node_r[j], node_w[j]);
    return numerics::hermite(node_r[i], node_r[j], node_phi[i], node_phi[j], d0, d1, r);
}

double RadialEigenpair::dphi_at(double r) const {
    if (node_r.empty()) throw InvalidInput("empty eigenpair");
    if (r <= node_r.front()) return flux_to_slope(dim, p, node_r.front(), node_w.front());
    if (r >= node_r.back()) return flux_to_slope(dim, p, node_r.back(), node_w.back());
    const auto it = std::upper_bound(node_r.begin(), node_r.end(), r);
    const std::size_t j = static_cast<std::size_t>(it - node_r.begin());
    const std::size_t i = j - 1;
    // w' = -lambda r^{N-1} |phi|^{p-2} phi
    const double dw0 = -eigenvalue * weight(dim, node_r[i]) * signed_pow(node_phi[i], p - 1.0);
    const double dw1 = -eigenvalue * weight(dim, node_r[j]) * signed_pow(node_phi[j], p - 1.0);
    const double w = numerics::hermite(node_r[i], node_r[j], node_w[i], node_w[j], dw0, dw1, r);
    return flux_to_slope(dim, p, r, w);
}

RadialEigenpair solve_first_radial(const RadialProblem& problem, const SolverOptions& options) {
    problem.validate();
    RadialProblem pr = problem;
    pr.mode = Mode::FirstEigen;
    if (pr.inner.kind == BcKind::Neumann && pr.outer.kind == BcKind::Neumann) return constant_pair(pr, options);
    return solve_mode(pr, options, 0);
}

RadialEigenpair solve_second_radial(const RadialProblem& problem, const SolverOptions& options) {
    RadialProblem pr = problem;
    pr.mode = Mode::SecondRadial;
    return solve_mode(pr, options, 1);
}

RadialEigenpair solve_radial(const RadialProblem& problem, const SolverOptions& options) {
    return problem.mode == Mode::FirstEigen ? solve_first_radial(problem, options)
                                            : solve_second_radial(problem, options);
}

double rayleigh_radial(const RadialEigenpair& pair, const RadialProblem& pr) {
    const std::size_t m = pair.r.size();
    if (m < 3 || m % 2 == 0) throw InvalidInput("eigenpair grid must have an odd number >= 3 of samples");
    const int n = pr.params.dim();
    const double p = pr.params.p();
    std::vector<double> num(m), den(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double wr = weight(n, pair.r[i]);
        num[i] = wr * abs_pow(pair.dphi[i], p);
        den[i] = wr * abs_pow(pair.phi[i], p);
    }
    const double h = pair.r[1] - pair.r[0];
    double top = numerics::simpson_uniform(num, h);
    if (pr.inner.kind == BcKind::Robin) top += pr.inner.k * weight(n, pr.R0) * abs_pow(pair.phi.front(), p);
    if (pr.outer.kind == BcKind::Robin) top += pr.outer.k * weight(n, pr.R1) * abs_pow(pair.phi.back(), p);
    const double bottom = numerics::simpson_uniform(den, h);
    if (!(bottom > 0.0)) throw InvalidInput("zero function has no Rayleigh quotient");
    return top / bottom;
}

nlohmann::json to_json(const RadialProblem& pr) {
    nlohmann::json j;
    j["dim"] = pr.params.dim();
    j["p"] = pr.params.p();
    j["R0"] = pr.R0;
    j["R1"] = pr.R1;
    j["inner"] = to_string(pr.inner);
    j["outer"] = to_string(pr.outer);
    if (pr.inner.kind == BcKind::Robin) j["inner_k"] = pr.inner.k;
    if (pr.outer.kind == BcKind::Robin) j["outer_k"] = pr.outer.k;
    j["mode"] = pr.mode == Mode::FirstEigen ? "first" : "second_radial";
    return j;
}

nlohmann::json to_json(const RadialEigenpair& pair, const RadialProblem& pr) {
    nlohmann::json j;
    j["schema"] = 1;
    j["eigenvalue"] = pair.eigenvalue;
    j["problem"] = to_json(pr);
    j["tolerance"] = pair.tolerance;
    j["zero_count"] = pair.zero_count;
    j["scan_steps"] = pair.scan_steps;
    j["bisection_steps"] = pair.bisection_steps;
    j["integrator_nodes"] = pair.node_r.size();
    j["output_nodes"] = pair.r.size();
    if (pair.nodal_radius) j["nodal_radius"] = *pair.nodal_radius;
    return j;
}

std::string eigenpair_csv(const RadialEigenpair& pair) {
    std::ostringstream out;
    out << "r,phi,dphi\n";
    for (std::size_t i = 0; i < pair.r.size(); ++i)
        out << io::fmt(pair.r[i]) << ',' << io::fmt(pair.phi[i]) << ',' << io::fmt(pair.dphi[i]) << '\n';
    return out.str();
}

} // namespace rfk::radial
