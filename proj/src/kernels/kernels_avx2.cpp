// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "kernel_table.hpp"

#include <immintrin.h>

#include <algorithm>
#include <limits>

namespace rfk::kernels::detail {
namespace {

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpay_avx2(const double* x, double alpha, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

void multiply_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void spmv_avx2(const int* row_ptr, const int* cols, const double* vals, const double* x, double* y,
               std::size_t rows) {
    for (std::size_t r = 0; r < rows; ++r) {
        int k = row_ptr[r];
        const int end = row_ptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
            const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
        }
        double s = hsum(acc);
        for (; k < end; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

void segment_distance_sq_avx2(const double* px, const double* py, std::size_t n, const SegmentSet& seg,
                              double* out) {
    const std::size_t m = seg.size();
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(px + i);
        const __m256d y = _mm256_loadu_pd(py + i);
        __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
        for (std::size_t j = 0; j < m; ++j) {
            const __m256d rx = _mm256_sub_pd(x, _mm256_set1_pd(seg.ax[j]));
            const __m256d ry = _mm256_sub_pd(y, _mm256_set1_pd(seg.ay[j]));
            const __m256d dx = _mm256_set1_pd(seg.dx[j]);
            const __m256d dy = _mm256_set1_pd(seg.dy[j]);
            __m256d t = _mm256_mul_pd(_mm256_fmadd_pd(rx, dx, _mm256_mul_pd(ry, dy)),
                                      _mm256_set1_pd(seg.inv_len2[j]));
            t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
            const __m256d qx = _mm256_fnmadd_pd(t, dx, rx);
            const __m256d qy = _mm256_fnmadd_pd(t, dy, ry);
            best = _mm256_min_pd(best, _mm256_fmadd_pd(qx, qx, _mm256_mul_pd(qy, qy)));
        }
        _mm256_storeu_pd(out + i, best);
    }
    if (i < n) scalar_table().segment_distance_sq(px + i, py + i, n - i, seg, out + i);
}

void shifted_norm_sq_avx2(const double* coords, std::size_t dim, std::size_t count, const double* center,
                          double* out) {
    std::fill(out, out + count, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
        const double* c = coords + d * count;
        const __m256d vc = _mm256_set1_pd(center[d]);
        std::size_t i = 0;
        for (; i + 4 <= count; i += 4) {
            const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(c + i), vc);
            _mm256_storeu_pd(out + i, _mm256_fmadd_pd(t, t, _mm256_loadu_pd(out + i)));
        }
        for (; i < count; ++i) {
            const double t = c[i] - center[d];
            out[i] += t * t;
        }
    }
}

} // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{dot_avx2,  axpy_avx2,
                                   xpay_avx2, multiply_avx2,
                                   spmv_avx2, segment_distance_sq_avx2,
                                   shifted_norm_sq_avx2};
    return &table;
}

} // namespace rfk::kernels::detail
