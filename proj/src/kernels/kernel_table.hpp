#pragma once

#include "rfk/kernels.hpp"

namespace rfk::kernels::detail {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*xpay)(const double*, double, double*, std::size_t);
    void (*multiply)(const double*, const double*, double*, std::size_t);
    void (*spmv)(const int*, const int*, const double*, const double*, double*, std::size_t);
    void (*segment_distance_sq)(const double*, const double*, std::size_t, const SegmentSet&, double*);
    void (*shifted_norm_sq)(const double*, std::size_t, std::size_t, const double*, double*);
};

const KernelTable& scalar_table();
/// nullptr when the AVX2 translation unit was not built.
const KernelTable* avx2_table();

} // namespace rfk::kernels::detail
