#include "kernel_table.hpp"

#include <algorithm>
#include <limits>

namespace rfk::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpay_scalar(const double* x, double alpha, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

void multiply_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void spmv_scalar(const int* row_ptr, const int* cols, const double* vals, const double* x, double* y,
                 std::size_t rows) {
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

void segment_distance_sq_scalar(const double* px, const double* py, std::size_t n, const SegmentSet& seg,
                                double* out) {
    const std::size_t m = seg.size();
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            const double rx = px[i] - seg.ax[j];
            const double ry = py[i] - seg.ay[j];
            double t = (rx * seg.dx[j] + ry * seg.dy[j]) * seg.inv_len2[j];
            t = std::clamp(t, 0.0, 1.0);
            const double qx = rx - t * seg.dx[j];
            const double qy = ry - t * seg.dy[j];
            best = std::min(best, qx * qx + qy * qy);
        }
        out[i] = best;
    }
}

void shifted_norm_sq_scalar(const double* coords, std::size_t dim, std::size_t count, const double* center,
                            double* out) {
    std::fill(out, out + count, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
        const double* c = coords + d * count;
        for (std::size_t i = 0; i < count; ++i) {
            const double t = c[i] - center[d];
            out[i] += t * t;
        }
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{dot_scalar,  axpy_scalar,
                                   xpay_scalar, multiply_scalar,
                                   spmv_scalar, segment_distance_sq_scalar,
                                   shifted_norm_sq_scalar};
    return table;
}

} // namespace rfk::kernels::detail
