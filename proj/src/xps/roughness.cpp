// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <cmath>

#include "nbcav/xps.hpp"

namespace nbcav {

void HeightMap::validate() const {
  if (rows == 0 || cols == 0) throw DomainError("height map is empty");
  if (heights.size() != rows * cols) throw DomainError("height map is not rectangular");
  if (!(pixelPitch > 0.0) || !std::isfinite(pixelPitch)) throw DomainError("pixel pitch must be positive");
  for (double h : heights) {
    if (!std::isfinite(h)) throw DomainError("height map contains non-finite values");
  }
}

Roughness roughnessStats(const HeightMap& map) {
  map.validate();
  if (map.rows < 4 || map.cols < 4) throw DomainError("height map must be at least 4x4");
  // On a full rectangular grid the centred coordinates are orthogonal, so the
  // least-squares plane separates into a mean and two independent slopes.
  const double nr = static_cast<double>(map.rows), nc = static_cast<double>(map.cols);
  const double rBar = 0.5 * (nr - 1.0), cBar = 0.5 * (nc - 1.0);
  double mean = 0.0, sr = 0.0, sc = 0.0, srr = 0.0, scc = 0.0;
  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t c = 0; c < map.cols; ++c) {
      const double z = map.at(r, c), dr = r - rBar, dc = c - cBar;
      mean += z;
      sr += dr * z;
      sc += dc * z;
      srr += dr * dr;
      scc += dc * dc;
    }
  }
  mean /= nr * nc;
  const double slopeR = sr / srr, slopeC = sc / scc;

  double absSum = 0.0, sqSum = 0.0;
  std::vector<double> resid(map.heights.size());
  double residMean = 0.0;
  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t c = 0; c < map.cols; ++c) {
      const double v = map.at(r, c) - mean - slopeR * (r - rBar) - slopeC * (c - cBar);
      resid[r * map.cols + c] = v;
      residMean += v;
    }
  }
  residMean /= nr * nc;
  for (double v : resid) {
    absSum += std::abs(v - residMean);
    sqSum += (v - residMean) * (v - residMean);
  }
  return {absSum / (nr * nc), std::sqrt(sqSum / (nr * nc))};
}

}  // namespace nbcav
