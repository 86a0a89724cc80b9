// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <cstddef>

namespace nbcav::kernels::detail {

struct KernelTable {
  double (*weightedDot)(const double* a, const double* b, const double* w, std::size_t n);
  void (*accumulateLorentzian)(const double* x, std::size_t n, double center, double halfWidth,
                               double weight, double* out);
  void (*resonantBracket)(const double* x, std::size_t n, double scale, double cRe, double cIm,
                          double* outRe, double* outIm);
};

const KernelTable& scalarTable();
#if defined(NBCAV_HAVE_AVX2_KERNELS)
const KernelTable& avx2Table();
#endif

}  // namespace nbcav::kernels::detail
