// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "cli.hpp"

namespace nbcav::cli {

namespace {

constexpr double kWidth = 640, kPanelHeight = 240, kMargin = 56, kGap = 40;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Axis {
  double lo, hi, pixLo, pixHi;
  double map(double v) const { return pixLo + (v - lo) / (hi - lo) * (pixHi - pixLo); }
};

Axis padded(double lo, double hi, double pixLo, double pixHi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, pixLo, pixHi};
}

void panel(std::string& svg, double top, const char* title, const std::vector<double>& x,
           const std::vector<double>& data, const std::vector<double>& xm,
           const std::vector<double>& model) {
  const double x0 = kMargin, x1 = kWidth - 16, y0 = top + kPanelHeight, y1 = top;
  double ylo = *std::min_element(data.begin(), data.end());
  double yhi = *std::max_element(data.begin(), data.end());
  ylo = std::min(ylo, *std::min_element(model.begin(), model.end()));
  yhi = std::max(yhi, *std::max_element(model.begin(), model.end()));
  const Axis ax = padded(xm.front(), xm.back(), x0, x1);
  const Axis ay = padded(ylo, yhi, y0, y1);

  svg += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) + "\" height=\"" +
         fmt(y0 - y1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg += "<text x=\"" + fmt(x0) + "\" y=\"" + fmt(y1 - 6) + "\">" + title + "</text>\n";
  for (double v : {ay.lo, 0.5 * (ay.lo + ay.hi), ay.hi}) {
    svg += "<text x=\"" + fmt(x0 - 4) + "\" y=\"" + fmt(ay.map(v) + 4) +
           "\" text-anchor=\"end\">" + label(v) + "</text>\n";
  }
  for (double v : {ax.lo, 0.5 * (ax.lo + ax.hi), ax.hi}) {
    svg += "<text x=\"" + fmt(ax.map(v)) + "\" y=\"" + fmt(y0 + 16) + "\" text-anchor=\"middle\">" +
           label(v) + "</text>\n";
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    svg += "<circle cx=\"" + fmt(ax.map(x[i])) + "\" cy=\"" + fmt(ay.map(data[i])) +
           "\" r=\"2\" fill=\"#1f77b4\"/>\n";
  }
  svg += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xm.size(); ++i) {
    svg += (i ? " " : "") + fmt(ax.map(xm[i])) + "," + fmt(ay.map(model[i]));
  }
  svg += "\"/>\n";
}

}  // namespace

std::string s11Svg(const ComplexTrace& trace, const ResonatorParams& fit) {
  const std::size_t n = trace.frequencies.size();
  std::vector<double> x(n), re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = trace.frequencies[i] - fit.f0;
    re[i] = trace.values[i].real();
    im[i] = trace.values[i].imag();
  }
  constexpr std::size_t kModelPoints = 400;
  std::vector<double> xm(kModelPoints), mre(kModelPoints), mim(kModelPoints);
  for (std::size_t i = 0; i < kModelPoints; ++i) {
    const double f = trace.frequencies.front() +
                     (trace.frequencies.back() - trace.frequencies.front()) * double(i) / (kModelPoints - 1);
    const auto s = s11Model(fit, f);
    xm[i] = f - fit.f0;
    mre[i] = s.real();
    mim[i] = s.imag();
  }

  const double height = 2 * kPanelHeight + kGap + 2 * kMargin;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
                    fmt(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  panel(svg, kMargin, "Re S11", x, re, xm, mre);
  panel(svg, kMargin + kPanelHeight + kGap, "Im S11", x, im, xm, mim);
  svg += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"" + fmt(height - 12) +
         "\" text-anchor=\"middle\">detuning from f0 (Hz)</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace nbcav::cli
