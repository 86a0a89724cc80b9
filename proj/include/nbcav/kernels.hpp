// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <span>
#include <string_view>

// Data-parallel inner loops shared by the forward models and the fitter.
// Every kernel has a scalar reference and, where the CPU supports it, an
// AVX2 variant. The backend is chosen once at first use; tests can pin it.
//
// Elementwise kernels are bit-identical across backends. Reductions
// (weightedDot) differ only by summation order.
namespace nbcav::kernels {

enum class Backend { Scalar, Avx2 };

Backend activeBackend();
bool backendAvailable(Backend backend);
/// Throws std::invalid_argument if the backend is not available on this CPU.
void setBackend(Backend backend);
std::string_view backendName(Backend backend);

/// sum_i w_i a_i b_i. An empty weight span means unit weights.
double weightedDot(std::span<const double> a, std::span<const double> b,
                   std::span<const double> w = {});

/// out_i += weight * hw^2 / ((x_i - center)^2 + hw^2)  (unit-peak Lorentzian, half width hw)
void accumulateLorentzian(std::span<const double> x, double center, double halfWidth,
                          double weight, std::span<double> out);

/// out_i = 1 - c / (1 + i * scale * detuning_i), c = cRe + i cIm.
void resonantBracket(std::span<const double> detuning, double scale, double cRe, double cIm,
                     std::span<double> outRe, std::span<double> outIm);

}  // namespace nbcav::kernels
