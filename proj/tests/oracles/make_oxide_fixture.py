#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# Copyright (c) 2026 The nbcav Authors
"""Builds tests/fixtures/oxide_intensity_ratios.json.

Per-species oxide thicknesses are chosen for the two exposures (30 minutes and
3 weeks), with Nb2O5 growing by 88% and the lower oxides shrinking. Each
thickness is inverted through d = lambda_o sin(theta) ln(N_m lambda_m I_o /
(N_o lambda_o I_m) + 1) to an oxide intensity at a fixed metal intensity, then
rounded to 6 significant figures. Densities and IMFPs are illustrative.

Run: python3 tests/oracles/make_oxide_fixture.py > tests/fixtures/oxide_intensity_ratios.json
"""
import json
import math

LAMBDA_METAL = 1.90  # nm
SPECIES = {
    # name: (lambda_oxide nm, N_m/N_o)
    "Nb2O5": (2.30, 2.67),
    "NbO2": (2.10, 1.96),
    "NbO": (2.00, 1.38),
}
THICKNESS = {
    "30min": {"Nb2O5": 2.200, "NbO2": 0.800, "NbO": 0.589},
    "3week": {"Nb2O5": 2.200 * 1.88, "NbO2": 0.500, "NbO": 4.974 - 2.200 * 1.88 - 0.500},
}
I_METAL = 10000.0


def sig(x, n=6):
    return float(f"{x:.{n}g}")


def intensity(d, lam_o, ratio):
    return (math.exp(d / lam_o) - 1.0) * lam_o * I_METAL / (ratio * LAMBDA_METAL)


out = {}
for exposure, parts in THICKNESS.items():
    rows = []
    for name, d in parts.items():
        lam_o, ratio = SPECIES[name]
        rows.append({
            "species": name,
            "i_oxide": sig(intensity(d, lam_o, ratio)),
            "i_metal": I_METAL,
            "lambda_oxide_nm": lam_o,
            "lambda_metal_nm": LAMBDA_METAL,
            "density_ratio": ratio,
        })
    out[exposure] = rows

# Check the rounded fixture against the forward formula.
totals = {}
for exposure, rows in out.items():
    total = sum(r["lambda_oxide_nm"] * math.log1p(r["density_ratio"] * r["lambda_metal_nm"] * r["i_oxide"]
                                                  / (r["lambda_oxide_nm"] * r["i_metal"])) for r in rows)
    totals[exposure] = round(total, 6)
out["expected_total_nm"] = totals

print(json.dumps(out, indent=2))
