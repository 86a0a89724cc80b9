// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors
//
// Compiled with -mavx2 -mfma -ffp-contract=off. Only reached after a CPUID check.

#include <immintrin.h>

#include "kernels/kernel_table.hpp"

namespace nbcav::kernels::detail {
namespace {

inline double horizontalSum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double weightedDotAvx2(const double* a, const double* b, const double* w, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  if (w == nullptr) {
    for (; i + 8 <= n; i += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
  } else {
    for (; i + 8 <= n; i += 8) {
      __m256d wa0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
      __m256d wa1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
      acc0 = _mm256_fmadd_pd(wa0, _mm256_loadu_pd(b + i), acc0);
      acc1 = _mm256_fmadd_pd(wa1, _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
      __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
      acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc0);
    }
  }
  double sum = horizontalSum(_mm256_add_pd(acc0, acc1));
  if (w == nullptr) {
    for (; i < n; ++i) sum += a[i] * b[i];
  } else {
    for (; i < n; ++i) sum += w[i] * a[i] * b[i];
  }
  return sum;
}

// Same operation order as the scalar reference, so results match bit for bit.
void accumulateLorentzianAvx2(const double* x, std::size_t n, double center, double halfWidth,
                              double weight, double* out) {
  const double h2 = halfWidth * halfWidth;
  const double num = weight * h2;
  const __m256d vc = _mm256_set1_pd(center);
  const __m256d vh2 = _mm256_set1_pd(h2);
  const __m256d vnum = _mm256_set1_pd(num);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
    __m256d den = _mm256_add_pd(_mm256_mul_pd(d, d), vh2);
    __m256d o = _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_div_pd(vnum, den));
    _mm256_storeu_pd(out + i, o);
  }
  for (; i < n; ++i) {
    const double d = x[i] - center;
    out[i] += num / (d * d + h2);
  }
}

void resonantBracketAvx2(const double* x, std::size_t n, double scale, double cRe, double cIm,
                         double* outRe, double* outIm) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d vcr = _mm256_set1_pd(cRe);
  const __m256d vci = _mm256_set1_pd(cIm);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ax = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
    __m256d den = _mm256_add_pd(one, _mm256_mul_pd(ax, ax));
    __m256d nr = _mm256_add_pd(vcr, _mm256_mul_pd(vci, ax));
    __m256d ni = _mm256_sub_pd(vci, _mm256_mul_pd(vcr, ax));
    _mm256_storeu_pd(outRe + i, _mm256_sub_pd(one, _mm256_div_pd(nr, den)));
    _mm256_storeu_pd(outIm + i, _mm256_sub_pd(zero, _mm256_div_pd(ni, den)));
  }
  for (; i < n; ++i) {
    const double ax = scale * x[i];
    const double den = 1.0 + ax * ax;
    const double nr = cRe + cIm * ax;
    const double ni = cIm - cRe * ax;
    outRe[i] = 1.0 - nr / den;
    outIm[i] = -(ni / den);
  }
}

}  // namespace

const KernelTable& avx2Table() {
  static const KernelTable table{&weightedDotAvx2, &accumulateLorentzianAvx2,
                                 &resonantBracketAvx2};
  return table;
}

}  // namespace nbcav::kernels::detail
