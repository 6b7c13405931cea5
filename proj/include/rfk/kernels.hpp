#pragma once

// Data-parallel inner loops used by the solvers. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant selected at
// runtime. Results of the two variants agree to rounding (see test_kernels).

#include <cstddef>
#include <span>
#include <string_view>

namespace rfk::kernels {

enum class SimdLevel { Scalar, Avx2 };

bool level_supported(SimdLevel level);
SimdLevel active_level();
/// Forces a kernel variant. Throws InvalidInput if the CPU or build lacks it.
void set_level(SimdLevel level);
std::string_view level_name(SimdLevel level);

/// Restores the previous level on scope exit.
class ScopedLevel {
public:
    explicit ScopedLevel(SimdLevel level) : saved_(active_level()) { set_level(level); }
    ~ScopedLevel() { set_level(saved_); }
    ScopedLevel(const ScopedLevel&) = delete;
    ScopedLevel& operator=(const ScopedLevel&) = delete;

private:
    SimdLevel saved_;
};

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// y = x + alpha * y
void xpay(std::span<const double> x, double alpha, std::span<double> y);
/// out = a .* b
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);

struct CsrView {
    std::span<const int> row_ptr;
    std::span<const int> cols;
    std::span<const double> vals;
};
/// y = A x
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);

/// Segments in structure-of-arrays form: start (ax, ay), direction (dx, dy)
/// and 1/|d|^2 (zero for degenerate segments).
struct SegmentSet {
    std::span<const double> ax, ay, dx, dy, inv_len2;
    std::size_t size() const { return ax.size(); }
};
/// out[i] = min over segments of the squared distance from (px[i], py[i]).
void segment_distance_sq(std::span<const double> px, std::span<const double> py,
                         const SegmentSet& segments, std::span<double> out);

/// Points stored as `dim` contiguous blocks of `count` coordinates.
/// out[i] = |x_i - center|^2.
void shifted_norm_sq(std::span<const double> coords, std::size_t dim, std::span<const double> center,
                     std::span<double> out);

} // namespace rfk::kernels
