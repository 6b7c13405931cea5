#include <algorithm>
#include <cmath>
#include <thread>

#include "rfk/geometry.hpp"
#include "rfk/kernels.hpp"
#include "rfk/numerics.hpp"
#include "rfk/polygon.hpp"

namespace rfk::geometry {

namespace {

constexpr std::size_t kBlock = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct Sampler {
    const DomainSpec* domain;
    Side side;
    int dim;
    std::uint64_t seed;
    std::vector<double> lo_n, hi_n;
    polygon::SegmentArrays outer_segs, target_hole_segs;

    // Appends distances of the in-domain samples of block b to out.
    void run_block(std::size_t b, std::size_t count, std::vector<double>& out) const {
        const std::size_t first = b * kBlock;
        std::vector<double> coords(count * static_cast<std::size_t>(dim));
        for (std::size_t i = 0; i < count; ++i) {
            for (int d = 0; d < dim; ++d) {
                const std::uint64_t ctr = (first + i) * static_cast<std::uint64_t>(dim) + static_cast<std::uint64_t>(d);
                coords[static_cast<std::size_t>(d) * count + i] =
                    lo_n[static_cast<std::size_t>(d)] +
                    (hi_n[static_cast<std::size_t>(d)] - lo_n[static_cast<std::size_t>(d)]) * counter_uniform(seed, ctr);
            }
        }
        if (domain->is_polygon())
            polygon_block(coords, count, out);
        else
            sphere_block(coords, count, out);
    }

    void sphere_block(const std::vector<double>& coords, std::size_t count, std::vector<double>& out) const {
        const SphericalShape sh = domain->spherical();
        std::vector<double> origin(static_cast<std::size_t>(dim), 0.0);
        std::vector<double> centre(static_cast<std::size_t>(dim), 0.0);
        centre[0] = sh.e;
        std::vector<double> r2(count), h2(count);
        kernels::shifted_norm_sq(coords, static_cast<std::size_t>(dim), origin, r2);
        kernels::shifted_norm_sq(coords, static_cast<std::size_t>(dim), centre, h2);
        const double R1sq = sh.R1 * sh.R1;
        const double R0sq = sh.R0 * sh.R0;
        for (std::size_t i = 0; i < count; ++i) {
            if (!(r2[i] < R1sq) || !(h2[i] > R0sq)) continue;
            out.push_back(side == Side::FromOuter ? sh.R1 - std::sqrt(r2[i]) : std::sqrt(h2[i]) - sh.R0);
        }
    }

    void polygon_block(const std::vector<double>& coords, std::size_t count, std::vector<double>& out) const {
        const auto& poly = domain->polygon();
        std::span<const double> px(coords.data(), count);
        std::span<const double> py(coords.data() + count, count);
        const auto& target = side == Side::FromOuter ? outer_segs : target_hole_segs;
        kernels::SegmentSet set{target.ax, target.ay, target.dx, target.dy, target.inv_len2};
        std::vector<double> d2(count);
        kernels::segment_distance_sq(px, py, set, d2);
        for (std::size_t i = 0; i < count; ++i) {
            if (!polygon::contains(poly.outer, px[i], py[i])) continue;
            bool in_hole = false;
            for (const auto& h : poly.holes)
                if (polygon::contains(h, px[i], py[i])) {
                    in_hole = true;
                    break;
                }
            if (in_hole) continue;
            out.push_back(std::sqrt(d2[i]));
        }
    }
};

} // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632BE59BD9B4E019ULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

ParallelProfile parallel_profile_mc(const DomainSpec& domain, Side side, const MonteCarloOptions& options) {
    if (options.samples < 10000) throw InvalidInput("Monte Carlo profiles need at least 1e4 samples");
    if (options.grid_size < 3) throw InvalidInput("Monte Carlo grid_size must be >= 3");
    const Measures m = measures(domain);
    if (!(m.volume > 0.0)) throw InvalidInput("domain has zero volume");
    if (side == Side::FromInner && !domain.has_hole()) throw InvalidInput("inner parallels need a hole");

    const int dim = domain.dim();
    Sampler sampler{&domain, side, dim, options.seed, {}, {}, {}, {}};
    sampler.lo_n.assign(static_cast<std::size_t>(dim), 0.0);
    sampler.hi_n.assign(static_cast<std::size_t>(dim), 0.0);
    if (domain.is_polygon()) {
        const auto& poly = domain.polygon();
        double x0 = poly.outer[0][0], x1 = x0, y0 = poly.outer[0][1], y1 = y0;
        for (const auto& p : poly.outer) {
            x0 = std::min(x0, p[0]);
            x1 = std::max(x1, p[0]);
            y0 = std::min(y0, p[1]);
            y1 = std::max(y1, p[1]);
        }
        sampler.lo_n = {x0, y0};
        sampler.hi_n = {x1, y1};
        sampler.outer_segs.append(poly.outer);
        if (!poly.holes.empty()) sampler.target_hole_segs.append(poly.holes[0]);
    } else {
        const double R1 = domain.spherical().R1;
        for (int d = 0; d < dim; ++d) {
            sampler.lo_n[static_cast<std::size_t>(d)] = -R1;
            sampler.hi_n[static_cast<std::size_t>(d)] = R1;
        }
    }
    double box = 1.0;
    for (int d = 0; d < dim; ++d)
        box *= sampler.hi_n[static_cast<std::size_t>(d)] - sampler.lo_n[static_cast<std::size_t>(d)];

    const std::size_t n = options.samples;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> per_block(blocks);
    const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, blocks));
    auto worker = [&](std::size_t t) {
        for (std::size_t b = t; b < blocks; b += threads) {
            const std::size_t count = std::min(kBlock, n - b * kBlock);
            sampler.run_block(b, count, per_block[b]);
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    std::vector<double> dist;
    for (auto& blk : per_block) dist.insert(dist.end(), blk.begin(), blk.end());
    std::sort(dist.begin(), dist.end());
    if (dist.empty()) throw NumericalFailure("no Monte Carlo sample landed in the domain");

    ParallelProfile prof;
    prof.side = side;
    prof.dim = dim;
    prof.method = "monte_carlo";
    prof.seed = options.seed;
    prof.samples = n;
    prof.domain_volume = m.volume;
    prof.boundary_measure = side == Side::FromOuter ? m.outer_measure : m.designated_hole_measure;
    const ProblemParams geo(dim, 2.0);
    prof.reference_radius = geo.radius_for_measure(prof.boundary_measure);
    prof.delta_omega = dist.back();
    const double dmax = options.delta_max.value_or(prof.delta_omega);
    if (!(dmax > 0.0)) throw InvalidInput("delta_max must be positive");

    const std::size_t g = options.grid_size;
    prof.delta = numerics::linspace(0.0, dmax, g);
    const double step = prof.delta[1] - prof.delta[0];
    const double nn = static_cast<double>(n);
    auto count_below = [&](double d) {
        return static_cast<double>(std::upper_bound(dist.begin(), dist.end(), d) - dist.begin());
    };
    prof.s.resize(g);
    prof.v.resize(g);
    prof.S.resize(g);
    prof.V.resize(g);
    prof.s_stderr.resize(g);
    prof.v_stderr.resize(g);
    for (std::size_t i = 0; i < g; ++i) {
        const double d = prof.delta[i];
        const double k = count_below(d);
        const double q = k / nn;
        prof.v[i] = box * q;
        prof.v_stderr[i] = box * std::sqrt(q * (1.0 - q) / nn);
        const double lo = std::max(d - step, 0.0);
        const double hi = d + step;
        const double shell = (count_below(hi) - count_below(lo)) / nn;
        const double width = hi - lo;
        prof.s[i] = box * shell / width;
        prof.s_stderr[i] = box * std::sqrt(shell * (1.0 - shell) / nn) / width;
        prof.S[i] = reference_measure(side, geo, prof.reference_radius, d);
        prof.V[i] = reference_volume(side, geo, prof.reference_radius, d);
    }
    prof.quadrature_error = box / std::sqrt(nn);
    return prof;
}

} // namespace rfk::geometry
