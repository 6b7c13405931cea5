#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "rfk/io.hpp"
#include "rfk/kernels.hpp"
#include "rfk/numerics.hpp"
#include "rfk/planar.hpp"

namespace rfk::planar {

namespace {

using numerics::abs_pow;

struct Csr {
    std::vector<int> row_ptr;
    std::vector<int> cols;
    std::vector<double> vals;
    std::size_t rows() const { return row_ptr.empty() ? 0 : row_ptr.size() - 1; }
    kernels::CsrView view() const { return {row_ptr, cols, vals}; }
};

// Per-triangle data: area and basis gradients.
struct Element {
    std::array<int, 3> v;
    double area;
    std::array<double, 3> gx, gy;
};

struct System {
    std::vector<int> dof;  // vertex -> free index or -1
    std::vector<int> vert; // free index -> vertex
    std::vector<Element> elements;
    Csr K, M;
};

bool is_dirichlet(VertexTag t, DirichletSet d) {
    return (t == VertexTag::Outer && d.outer) || (t == VertexTag::Inner && d.inner);
}

System assemble(const Mesh& mesh, DirichletSet d) {
    if (mesh.tags.size() != mesh.vertices.size()) throw InvalidInput("mesh tags do not match vertices");
    System sys;
    sys.dof.assign(mesh.size(), -1);
    for (std::size_t i = 0; i < mesh.size(); ++i)
        if (!is_dirichlet(mesh.tags[i], d)) {
            sys.dof[i] = static_cast<int>(sys.vert.size());
            sys.vert.push_back(static_cast<int>(i));
        }
    if (sys.vert.empty()) throw InvalidInput("every vertex is constrained");
    struct Entry {
        int r, c;
        double k, m;
    };
    std::vector<Entry> entries;
    entries.reserve(mesh.triangles.size() * 9);
    for (const auto& t : mesh.triangles) {
        Element el{};
        el.v = t;
        const auto& a = mesh.vertices[static_cast<std::size_t>(t[0])];
        const auto& b = mesh.vertices[static_cast<std::size_t>(t[1])];
        const auto& c = mesh.vertices[static_cast<std::size_t>(t[2])];
        const double a2 = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if (!(a2 > 0.0)) throw InvalidInput("mesh has a degenerate or inverted triangle");
        el.area = 0.5 * a2;
        const std::array<std::array<double, 2>, 3> p{a, b, c};
        for (int i = 0; i < 3; ++i) {
            const auto& pj = p[static_cast<std::size_t>((i + 1) % 3)];
            const auto& pk = p[static_cast<std::size_t>((i + 2) % 3)];
            el.gx[static_cast<std::size_t>(i)] = (pj[1] - pk[1]) / a2;
            el.gy[static_cast<std::size_t>(i)] = (pk[0] - pj[0]) / a2;
        }
        for (std::size_t i = 0; i < 3; ++i) {
            const int ri = sys.dof[static_cast<std::size_t>(t[i])];
            if (ri < 0) continue;
            for (std::size_t j = 0; j < 3; ++j) {
                const int cj = sys.dof[static_cast<std::size_t>(t[j])];
                if (cj < 0) continue;
                const double k = el.area * (el.gx[i] * el.gx[j] + el.gy[i] * el.gy[j]);
                const double m = el.area / 12.0 * (i == j ? 2.0 : 1.0);
                entries.push_back({ri, cj, k, m});
            }
        }
        sys.elements.push_back(el);
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return x.r != y.r ? x.r < y.r : x.c < y.c;
    });
    const std::size_t n = sys.vert.size();
    for (Csr* A : {&sys.K, &sys.M}) A->row_ptr.assign(n + 1, 0);
    for (std::size_t e = 0; e < entries.size();) {
        std::size_t f = e;
        double k = 0.0;
        double m = 0.0;
        while (f < entries.size() && entries[f].r == entries[e].r && entries[f].c == entries[e].c) {
            k += entries[f].k;
            m += entries[f].m;
            ++f;
        }
        sys.K.cols.push_back(entries[e].c);
        sys.K.vals.push_back(k);
        sys.M.cols.push_back(entries[e].c);
        sys.M.vals.push_back(m);
        sys.K.row_ptr[static_cast<std::size_t>(entries[e].r) + 1]++;
        e = f;
    }
    for (std::size_t i = 0; i < n; ++i) sys.K.row_ptr[i + 1] += sys.K.row_ptr[i];
    sys.M.row_ptr = sys.K.row_ptr;
    return sys;
}

std::vector<double> product(const Csr& A, const std::vector<double>& x) {
    std::vector<double> y(A.rows());
    kernels::spmv(A.view(), x, y);
    return y;
}

std::vector<double> diagonal(const Csr& A) {
    std::vector<double> d(A.rows(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            if (static_cast<std::size_t>(A.cols[static_cast<std::size_t>(k)]) == i) d[i] = A.vals[static_cast<std::size_t>(k)];
    return d;
}

// Jacobi-preconditioned conjugate gradients; x holds the initial guess.
std::size_t pcg(const Csr& A, const std::vector<double>& b, std::vector<double>& x, double tol) {
    const std::size_t n = b.size();
    std::vector<double> inv = diagonal(A);
    for (auto& v : inv) v = 1.0 / v;
    std::vector<double> r = product(A, x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double bnorm = std::sqrt(kernels::dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0;
    }
    std::vector<double> z(n), p(n), q(n);
    kernels::multiply(inv, r, z);
    p = z;
    double rz = kernels::dot(r, z);
    const std::size_t cap = 20 * n + 100;
    for (std::size_t it = 0; it < cap; ++it) {
        if (std::sqrt(kernels::dot(r, r)) <= tol * bnorm) return it;
        kernels::spmv(A.view(), p, q);
        const double alpha = rz / kernels::dot(p, q);
        kernels::axpy(alpha, p, x);
        kernels::axpy(-alpha, q, r);
        kernels::multiply(inv, r, z);
        const double rz_new = kernels::dot(r, z);
        kernels::xpay(z, rz_new / rz, p);
        rz = rz_new;
    }
    throw NumericalFailure("conjugate gradients did not converge");
}

double quad(const Csr& A, const std::vector<double>& x) { return kernels::dot(x, product(A, x)); }

Eigen::SparseMatrix<double> to_eigen(const Csr& A) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(A.vals.size());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            trip.emplace_back(static_cast<int>(i), A.cols[static_cast<std::size_t>(k)],
                              A.vals[static_cast<std::size_t>(k)]);
    const auto n = static_cast<Eigen::Index>(A.rows());
    Eigen::SparseMatrix<double> out(n, n);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

double relative_residual(const System& sys, const std::vector<double>& x, double lambda) {
    const std::vector<double> kx = product(sys.K, x);
    const std::vector<double> mx = product(sys.M, x);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = kx[i] - lambda * mx[i];
        num += r * r;
        den += lambda * lambda * mx[i] * mx[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<double> expand(const System& sys, std::size_t nv, const std::vector<double>& x) {
    std::vector<double> full(nv, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) full[static_cast<std::size_t>(sys.vert[i])] = x[i];
    return full;
}

void normalise_sup(std::vector<double>& v, bool make_positive) {
    double peak = 0.0;
    double sum = 0.0;
    for (double x : v) {
        peak = std::max(peak, std::abs(x));
        sum += x;
    }
    if (!(peak > 0.0)) throw NumericalFailure("eigenvector vanished");
    const double s = (make_positive && sum < 0.0 ? -1.0 : 1.0) / peak;
    for (auto& x : v) x *= s;
}

void fill_diagnostics(Eigenpair2D& out, const System& sys, const std::vector<double>& x) {
    out.residual = relative_residual(sys, x, out.eigenvalue);
    const std::vector<double> mx = product(sys.M, x);
    double mass = 0.0;
    double total = 0.0;
    for (double v : mx) mass += v;
    const std::vector<double> ones(x.size(), 1.0);
    total = quad(sys.M, ones);
    out.constant_overlap = std::abs(mass) / std::sqrt(total * kernels::dot(x, mx));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out.min_ratio = hi != 0.0 ? lo / hi : 0.0;
}

// Free-vertex values padded with zeros on Dirichlet vertices.
struct DescentProblem {
    const System& sys;
    std::size_t nv;
    double p;

    void values(const std::vector<double>& x, std::vector<double>& full) const {
        std::fill(full.begin(), full.end(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) full[static_cast<std::size_t>(sys.vert[i])] = x[i];
    }
    // J and the edge-midpoint p-norm.
    std::pair<double, double> energy(const std::vector<double>& full) const {
        double J = 0.0;
        double N = 0.0;
        for (const auto& el : sys.elements) {
            const double u0 = full[static_cast<std::size_t>(el.v[0])];
            const double u1 = full[static_cast<std::size_t>(el.v[1])];
            const double u2 = full[static_cast<std::size_t>(el.v[2])];
            const double gx = el.gx[0] * u0 + el.gx[1] * u1 + el.gx[2] * u2;
            const double gy = el.gy[0] * u0 + el.gy[1] * u1 + el.gy[2] * u2;
            J += el.area * abs_pow(std::hypot(gx, gy), p);
            N += el.area / 3.0 *
                 (abs_pow(0.5 * (u0 + u1), p) + abs_pow(0.5 * (u1 + u2), p) + abs_pow(0.5 * (u2 + u0), p));
        }
        return {J, N};
    }
    // Gradient of J / N with respect to the free values.
    std::vector<double> gradient(const std::vector<double>& full, double J, double N) const {
        std::vector<double> gfull(nv, 0.0);
        const double Q = J / N;
        for (const auto& el : sys.elements) {
            std::array<double, 3> u{};
            for (std::size_t k = 0; k < 3; ++k) u[k] = full[static_cast<std::size_t>(el.v[k])];
            const double gx = el.gx[0] * u[0] + el.gx[1] * u[1] + el.gx[2] * u[2];
            const double gy = el.gy[0] * u[0] + el.gy[1] * u[1] + el.gy[2] * u[2];
            const double norm = std::hypot(gx, gy);
            // p |g|^{p-2} g, zero when g = 0.
            const double c = norm > 0.0 ? p * abs_pow(norm, p - 2.0) : 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                const double mk = 0.5 * (u[k] + u[(k + 1) % 3]);
                const double dm = p * numerics::signed_pow(mk, p - 1.0) * 0.5 * el.area / 3.0;
                gfull[static_cast<std::size_t>(el.v[k])] += el.area * c * (gx * el.gx[k] + gy * el.gy[k]);
                gfull[static_cast<std::size_t>(el.v[k])] -= Q * dm;
                gfull[static_cast<std::size_t>(el.v[(k + 1) % 3])] -= Q * dm;
            }
        }
        std::vector<double> g(sys.vert.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = gfull[static_cast<std::size_t>(sys.vert[i])] / N;
        return g;
    }
};

} // namespace

Eigenpair2D p2_eig(const Mesh& mesh, DirichletSet dirichlet, EigenMode mode, const OracleOptions& opt) {
    const bool any_dirichlet = dirichlet.inner || dirichlet.outer;
    if (mode == EigenMode::SecondNeumann && any_dirichlet) throw InvalidInput("SecondNeumann needs no Dirichlet set");
    Eigenpair2D out;
    out.dirichlet = dirichlet;
    out.mode = mode;
    out.p = 2.0;
    out.method = opt.solver == LinearSolver::Cholesky ? "p2_inverse_iteration" : "p2_inverse_iteration_pcg";
    const System sys = assemble(mesh, dirichlet);
    const std::size_t n = sys.vert.size();
    if (mode == EigenMode::First && !any_dirichlet) {
        out.eigenvalue = 0.0;
        out.values.assign(mesh.size(), 1.0);
        out.min_ratio = 1.0;
        out.history = {0.0};
        return out;
    }

    Csr A = sys.K;
    const std::vector<double> ones(n, 1.0);
    const std::vector<double> m1 = product(sys.M, ones);
    const double mass = kernels::dot(ones, m1);
    std::vector<double> x(n, 1.0);
    double shift = 0.0;
    if (mode == EigenMode::SecondNeumann) {
        // K + shift M is positive definite; constants are projected out.
        shift = 1.0 / mass;
        for (std::size_t k = 0; k < A.vals.size(); ++k) A.vals[k] += shift * sys.M.vals[k];
        for (std::size_t i = 0; i < n; ++i) {
            const auto& v = mesh.vertices[static_cast<std::size_t>(sys.vert[i])];
            x[i] = v[0] + 0.5 * v[1];
        }
    }
    const auto deflate = [&](std::vector<double>& v) {
        if (mode != EigenMode::SecondNeumann) return;
        const double c = kernels::dot(v, m1) / mass;
        kernels::axpy(-c, ones, v);
    };
    deflate(x);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol;
    if (opt.solver == LinearSolver::Cholesky) {
        chol.compute(to_eigen(A));
        if (chol.info() != Eigen::Success) throw NumericalFailure("stiffness factorisation failed");
    }
    std::vector<double> guess(n, 0.0);
    double lambda_old = std::numeric_limits<double>::infinity();
    double lambda = 0.0;
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        const std::vector<double> b = product(sys.M, x);
        std::vector<double> y = guess;
        if (opt.solver == LinearSolver::Cholesky) {
            const Eigen::VectorXd sol = chol.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(n)));
            y.assign(sol.data(), sol.data() + n);
        } else {
            pcg(A, b, y, opt.cg_tol);
        }
        deflate(y);
        const double yMy = quad(sys.M, y);
        lambda = quad(sys.K, y) / yMy;
        const double s = 1.0 / std::sqrt(yMy);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] * s;
        for (std::size_t i = 0; i < n; ++i) guess[i] = x[i] / (lambda + shift);
        out.history.push_back(lambda);
        out.iterations = it;
        out.last_change = std::abs(lambda - lambda_old) / lambda;
        lambda_old = lambda;
        if (out.last_change <= opt.tol) {
            out.residual = relative_residual(sys, x, lambda);
            if (out.residual <= opt.residual_tol) break;
        }
    }
    if (out.last_change > opt.tol || out.residual > opt.residual_tol) {
        std::ostringstream msg;
        msg << "inverse iteration stagnated: relative eigenvalue change " << out.last_change << ", residual "
            << out.residual << " after " << out.iterations << " iterations";
        throw NumericalFailure(msg.str());
    }
    out.eigenvalue = lambda;
    fill_diagnostics(out, sys, x);
    out.values = expand(sys, mesh.size(), x);
    normalise_sup(out.values, mode == EigenMode::First);
    if (mode == EigenMode::First) {
        double lo = std::numeric_limits<double>::infinity();
        for (int v : sys.vert) lo = std::min(lo, out.values[static_cast<std::size_t>(v)]);
        out.min_ratio = lo;
    }
    return out;
}

double discrete_rayleigh(const Mesh& mesh, std::span<const double> values, double p) {
    if (values.size() != mesh.size()) throw InvalidInput("one value per vertex expected");
    const System sys = assemble(mesh, {});
    const DescentProblem prob{sys, mesh.size(), p};
    const auto [J, N] = prob.energy(std::vector<double>(values.begin(), values.end()));
    if (!(N > 0.0)) throw InvalidInput("zero function has no Rayleigh quotient");
    return J / N;
}

Eigenpair2D plap_eig_descent(const Mesh& mesh, DirichletSet dirichlet, double p, const DescentOptions& opt) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("p must lie in (1, inf)");
    Eigenpair2D out;
    out.dirichlet = dirichlet;
    out.p = p;
    out.method = "sobolev_descent";
    if (!dirichlet.inner && !dirichlet.outer) {
        out.values.assign(mesh.size(), 1.0);
        out.min_ratio = 1.0;
        out.history = {0.0};
        return out;
    }
    const System sys = assemble(mesh, dirichlet);
    const std::size_t n = sys.vert.size();
    const DescentProblem prob{sys, mesh.size(), p};

    // Sobolev metric: the free-vertex stiffness matrix.
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(to_eigen(sys.K));
    if (chol.info() != Eigen::Success) throw NumericalFailure("stiffness factorisation failed");

    std::vector<double> x(n, 1.0);
    std::vector<double> full(mesh.size());
    prob.values(x, full);
    auto [J, N] = prob.energy(full);
    double Q = J / N;
    out.history.push_back(Q);
    double step = N / p;
    int quiet = 0;
    bool perturbed = false;
    std::mt19937_64 rng(opt.seed);
    std::vector<double> trial(n);
    double eta = 0.0;
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        out.iterations = it;
        const std::vector<double> g = prob.gradient(full, J, N);
        Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd d = -chol.solve(gv);
        const double slope = gv.dot(d);
        // Scale-free stationarity measure.
        eta = std::sqrt(std::max(-slope, 0.0) * N / std::max(J, 1e-300)) / p;
        double t = step * 2.0;
        bool accepted = false;
        double J_new = 0.0;
        double N_new = 0.0;
        while (t > 1e-16 * step) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * d[static_cast<Eigen::Index>(i)];
            prob.values(trial, full);
            std::tie(J_new, N_new) = prob.energy(full);
            if (N_new > 0.0 && J_new / N_new <= Q + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            prob.values(x, full);
            if (eta <= 1e-6) break;
            if (!perturbed) {
                // Escape a stall with a tiny seeded perturbation of the free values.
                std::uniform_real_distribution<double> unif(-1.0, 1.0);
                for (auto& v : x) v += 1e-8 * unif(rng);
                prob.values(x, full);
                std::tie(J, N) = prob.energy(full);
                Q = J / N;
                perturbed = true;
                continue;
            }
            std::ostringstream msg;
            msg << "descent stalled at quotient " << io::fmt(Q) << " after " << it << " iterations (stationarity "
                << eta << ")";
            throw NumericalFailure(msg.str());
        }
        step = t;
        // Sup-normalise; the quotient is scale invariant.
        double peak = 0.0;
        for (double v : trial) peak = std::max(peak, std::abs(v));
        for (std::size_t i = 0; i < n; ++i) x[i] = trial[i] / peak;
        const double scale_p = std::pow(peak, p);
        J = J_new / scale_p;
        N = N_new / scale_p;
        step /= peak;
        const double Q_new = J / N;
        const double drop = (Q - Q_new) / Q;
        Q = Q_new;
        out.history.push_back(Q);
        prob.values(x, full);
        quiet = drop < opt.tol ? quiet + 1 : 0;
        if (quiet >= 3) break;
    }
    if (quiet < 3 && eta > 1e-6) {
        std::ostringstream msg;
        msg << "descent did not converge: quotient " << io::fmt(Q) << ", stationarity " << eta;
        throw NumericalFailure(msg.str());
    }
    out.eigenvalue = Q;
    out.last_change = out.history.size() > 1 ? (out.history[out.history.size() - 2] - Q) / Q : 0.0;
    out.values = expand(sys, mesh.size(), x);
    normalise_sup(out.values, true);
    double lo = std::numeric_limits<double>::infinity();
    for (int v : sys.vert) lo = std::min(lo, out.values[static_cast<std::size_t>(v)]);
    out.min_ratio = lo;
    return out;
}

std::string eigenpair_csv(const Eigenpair2D& pair) {
    std::ostringstream out;
    out << "vertex,value\n";
    for (std::size_t i = 0; i < pair.values.size(); ++i) out << i << ',' << io::fmt(pair.values[i]) << '\n';
    return out.str();
}

nlohmann::json to_json(const Eigenpair2D& pair) {
    nlohmann::json j;
    j["schema"] = 1;
    j["eigenvalue"] = pair.eigenvalue;
    j["p"] = pair.p;
    j["method"] = pair.method;
    j["mode"] = pair.mode == EigenMode::First ? "first" : "second_neumann";
    j["dirichlet"] = {{"outer", pair.dirichlet.outer}, {"inner", pair.dirichlet.inner}};
    j["residual"] = pair.residual;
    j["last_change"] = pair.last_change;
    j["iterations"] = pair.iterations;
    j["min_ratio"] = pair.min_ratio;
    j["vertices"] = pair.values.size();
    if (pair.mode == EigenMode::SecondNeumann) j["constant_overlap"] = pair.constant_overlap;
    return j;
}

Eigenpair2D oracle_first(const geometry::DomainSpec& domain, DirichletSet dirichlet, double p, double h,
                         double topology_shift) {
    const Mesh mesh = mesh_annulus(domain, h, topology_shift);
    if (p == 2.0) return p2_eig(mesh, dirichlet);
    return plap_eig_descent(mesh, dirichlet, p);
}

} // namespace rfk::planar
