// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include "kernels/kernel_table.hpp"

namespace nbcav::kernels::detail {
namespace {

double weightedDotScalar(const double* a, const double* b, const double* w, std::size_t n) {
  double sum = 0.0;
  if (w == nullptr) {
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) sum += w[i] * a[i] * b[i];
  }
  return sum;
}

void accumulateLorentzianScalar(const double* x, std::size_t n, double center, double halfWidth,
                                double weight, double* out) {
  const double h2 = halfWidth * halfWidth;
  const double num = weight * h2;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - center;
    out[i] += num / (d * d + h2);
  }
}

void resonantBracketScalar(const double* x, std::size_t n, double scale, double cRe, double cIm,
                           double* outRe, double* outIm) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = scale * x[i];
    const double den = 1.0 + ax * ax;
    const double nr = cRe + cIm * ax;
    const double ni = cIm - cRe * ax;
    outRe[i] = 1.0 - nr / den;
    outIm[i] = -(ni / den);
  }
}

}  // namespace

const KernelTable& scalarTable() {
  static const KernelTable table{&weightedDotScalar, &accumulateLorentzianScalar,
                                 &resonantBracketScalar};
  return table;
}

}  // namespace nbcav::kernels::detail
