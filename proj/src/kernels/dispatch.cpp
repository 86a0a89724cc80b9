// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <atomic>
#include <stdexcept>

#include "kernels/kernel_table.hpp"
#include "nbcav/kernels.hpp"

namespace nbcav::kernels {
namespace {

bool cpuHasAvx2() {
#if defined(NBCAV_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const detail::KernelTable& tableFor(Backend backend) {
#if defined(NBCAV_HAVE_AVX2_KERNELS)
  if (backend == Backend::Avx2) return detail::avx2Table();
#endif
  (void)backend;
  return detail::scalarTable();
}

Backend detectBest() { return cpuHasAvx2() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend>& activeSlot() {
  static std::atomic<Backend> slot{detectBest()};
  return slot;
}

const detail::KernelTable& active() { return tableFor(activeSlot().load(std::memory_order_relaxed)); }

void requireSameLength(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

Backend activeBackend() { return activeSlot().load(std::memory_order_relaxed); }

bool backendAvailable(Backend backend) {
  return backend == Backend::Scalar || (backend == Backend::Avx2 && cpuHasAvx2());
}

void setBackend(Backend backend) {
  if (!backendAvailable(backend)) {
    throw std::invalid_argument(std::string("kernel backend unavailable: ") +
                                std::string(backendName(backend)));
  }
  activeSlot().store(backend, std::memory_order_relaxed);
}

std::string_view backendName(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

double weightedDot(std::span<const double> a, std::span<const double> b,
                   std::span<const double> w) {
  requireSameLength(a.size(), b.size());
  if (!w.empty()) requireSameLength(a.size(), w.size());
  return active().weightedDot(a.data(), b.data(), w.empty() ? nullptr : w.data(), a.size());
}

void accumulateLorentzian(std::span<const double> x, double center, double halfWidth,
                          double weight, std::span<double> out) {
  requireSameLength(x.size(), out.size());
  active().accumulateLorentzian(x.data(), x.size(), center, halfWidth, weight, out.data());
}

void resonantBracket(std::span<const double> detuning, double scale, double cRe, double cIm,
                     std::span<double> outRe, std::span<double> outIm) {
  requireSameLength(detuning.size(), outRe.size());
  requireSameLength(detuning.size(), outIm.size());
  active().resonantBracket(detuning.data(), detuning.size(), scale, cRe, cIm, outRe.data(),
                           outIm.data());
}

}  // namespace nbcav::kernels
