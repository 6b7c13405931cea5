#include "kernel_table.hpp"

#include "rfk/common.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace rfk::kernels {
namespace {

using detail::KernelTable;

#if defined(RFK_HAVE_AVX2)
const KernelTable* avx2_or_null() { return detail::avx2_table(); }
#else
const KernelTable* avx2_or_null() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(RFK_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

SimdLevel initial_level() {
    // RFK_SIMD=scalar pins the reference kernels (used for equivalence runs).
    if (const char* env = std::getenv("RFK_SIMD")) {
        if (std::string(env) == "scalar") return SimdLevel::Scalar;
    }
    return cpu_has_avx2() ? SimdLevel::Avx2 : SimdLevel::Scalar;
}

std::atomic<SimdLevel>& level_slot() {
    static std::atomic<SimdLevel> level{initial_level()};
    return level;
}

const KernelTable& table() {
    if (level_slot().load(std::memory_order_relaxed) == SimdLevel::Avx2) return *avx2_or_null();
    return detail::scalar_table();
}

void require_same_size(std::size_t a, std::size_t b) {
    if (a != b) throw InvalidInput("kernel operands differ in length");
}

} // namespace

bool level_supported(SimdLevel level) {
    if (level == SimdLevel::Scalar) return true;
    return avx2_or_null() != nullptr && cpu_has_avx2();
}

SimdLevel active_level() { return level_slot().load(); }

void set_level(SimdLevel level) {
    if (!level_supported(level)) throw InvalidInput("SIMD level not supported on this machine");
    level_slot().store(level);
}

std::string_view level_name(SimdLevel level) { return level == SimdLevel::Avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size());
    return table().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_size(x.size(), y.size());
    table().axpy(alpha, x.data(), y.data(), x.size());
}

void xpay(std::span<const double> x, double alpha, std::span<double> y) {
    require_same_size(x.size(), y.size());
    table().xpay(x.data(), alpha, y.data(), x.size());
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    require_same_size(a.size(), b.size());
    require_same_size(a.size(), out.size());
    table().multiply(a.data(), b.data(), out.data(), a.size());
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
    if (a.row_ptr.size() != y.size() + 1) throw InvalidInput("spmv: row count mismatch");
    table().spmv(a.row_ptr.data(), a.cols.data(), a.vals.data(), x.data(), y.data(), y.size());
}

void segment_distance_sq(std::span<const double> px, std::span<const double> py, const SegmentSet& segments,
                         std::span<double> out) {
    require_same_size(px.size(), py.size());
    require_same_size(px.size(), out.size());
    table().segment_distance_sq(px.data(), py.data(), px.size(), segments, out.data());
}

void shifted_norm_sq(std::span<const double> coords, std::size_t dim, std::span<const double> center,
                     std::span<double> out) {
    if (center.size() != dim || coords.size() != dim * out.size())
        throw InvalidInput("shifted_norm_sq: shape mismatch");
    table().shifted_norm_sq(coords.data(), dim, out.size(), center.data(), out.data());
}

} // namespace rfk::kernels
