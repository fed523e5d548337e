#!/usr/bin/env python3
# Copyright 2026 The psdukf Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds the 3-machine 9-bus scenario file.

Loads become constant admittances at their power-flow voltages, every
generator sits behind x'_d, and the network is Kron-reduced to the three
internal nodes. A bolted fault grounds the faulted bus (it is dropped from the
reduction); clearing trips one adjacent line.

    python3 tools/gen_wscc9_scenario.py > scenarios/wscc9.json
"""

import cmath
import json
import math
import sys

import numpy as np

BASE_LINES = {
    (4, 5): (0.010, 0.085, 0.176),
    (4, 6): (0.017, 0.092, 0.158),
    (5, 7): (0.032, 0.161, 0.306),
    (6, 9): (0.039, 0.170, 0.358),
    (7, 8): (0.0085, 0.072, 0.149),
    (8, 9): (0.0119, 0.1008, 0.209),
}
TRANSFORMERS = {(1, 4): 0.0576, (2, 7): 0.0625, (3, 9): 0.0586}
LOADS = {5: 1.25 + 0.50j, 6: 0.90 + 0.30j, 8: 1.00 + 0.35j}
# Power-flow solution: |V|, angle (deg).
VOLTAGES = {
    1: (1.040, 0.0), 2: (1.025, 9.280), 3: (1.025, 4.665),
    4: (1.0258, -2.2168), 5: (0.9956, -3.9888), 6: (1.0127, -3.6874),
    7: (1.0258, 3.7197), 8: (1.0159, 0.7275), 9: (1.0324, 1.9667),
}
GEN_S = {1: 0.716 + 0.270j, 2: 1.630 + 0.067j, 3: 0.850 - 0.109j}

MACHINES = [
    dict(id=1, order=2, H=23.64, xd=0.1460, xq=0.0969, xd_prime=0.0608, xq_prime=0.0969,
         Td0_prime=8.96, Tq0_prime=0.31),
    dict(id=2, order=4, H=6.40, xd=0.8958, xq=0.8645, xd_prime=0.1198, xq_prime=0.1969,
         Td0_prime=6.00, Tq0_prime=0.535),
    dict(id=3, order=2, H=3.01, xd=1.3125, xq=1.2578, xd_prime=0.1813, xq_prime=0.2500,
         Td0_prime=5.89, Tq0_prime=0.600),
]
DAMPING_PER_H = 2.0  # D = 2H gives every swing mode a decay rate near 0.5 1/s


def phasor(mag, deg):
    return cmath.rect(mag, math.radians(deg))


def reduced_admittance(lines, grounded=()):
    nodes = [f"g{m['id']}" for m in MACHINES] + [b for b in range(1, 10) if b not in grounded]
    index = {node: i for i, node in enumerate(nodes)}
    y = np.zeros((len(nodes), len(nodes)), dtype=complex)

    def branch(a, b, series, shunt_half=0.0):
        if a not in index or b not in index:
            # Branch ends on a grounded bus: only the near-end terms survive.
            for end in (a, b):
                if end in index:
                    y[index[end], index[end]] += series + shunt_half
            return
        i, j = index[a], index[b]
        y[i, i] += series + shunt_half
        y[j, j] += series + shunt_half
        y[i, j] -= series
        y[j, i] -= series

    for (a, b), (r, x, bsh) in lines.items():
        branch(a, b, 1.0 / complex(r, x), 0.5j * bsh)
    for (a, b), x in TRANSFORMERS.items():
        branch(a, b, 1.0 / complex(0.0, x))
    for m in MACHINES:
        branch(f"g{m['id']}", m["id"], 1.0 / complex(0.0, m["xd_prime"]))
    for bus, s in LOADS.items():
        if bus in index:
            vmag = VOLTAGES[bus][0]
            y[index[bus], index[bus]] += s.conjugate() / vmag**2

    k = len(MACHINES)
    ynn, ynb, ybn, ybb = y[:k, :k], y[:k, k:], y[k:, :k], y[k:, k:]
    return ynn - ynb @ np.linalg.solve(ybb, ybn)


def to_json_matrix(m):
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def main():
    machines = []
    for m in MACHINES:
        v = phasor(*VOLTAGES[m["id"]])
        current = (GEN_S[m["id"]] / v).conjugate()
        e = v + 1j * m["xd_prime"] * current
        entry = dict(m)
        entry["D"] = DAMPING_PER_H * m["H"]
        entry["internal_emf"] = {"magnitude": abs(e), "angle_deg": math.degrees(cmath.phase(e))}
        machines.append(entry)

    faults = [("bus7_trip_5_7", 7, (5, 7)), ("bus9_trip_6_9", 9, (6, 9)),
              ("bus5_trip_4_5", 5, (4, 5)), ("bus8_trip_7_8", 8, (7, 8))]
    fault_cases = []
    for name, bus, line in faults:
        post = {k: v for k, v in BASE_LINES.items() if k != line}
        fault_cases.append({
            "name": name,
            "window": [0.1, 0.2],
            "y_fault": to_json_matrix(reduced_admittance(BASE_LINES, grounded=(bus,))),
            "y_postfault": to_json_matrix(reduced_admittance(post)),
        })

    scenario = {
        "name": "wscc9_three_machine",
        "system": {
            "frequency_hz": 60.0,
            "machines": machines,
            "y_prefault": to_json_matrix(reduced_admittance(BASE_LINES)),
        },
        "duration_s": 5.0,
        "sample_hz": 60.0,
        "substeps": 2,
        "meas_noise_std": 0.01,
        "pmu_placements": {"1": [2], "2": [2, 3], "3": [1, 2, 3]},
        "fault_cases": fault_cases,
        "seeds": [1, 2, 3, 4, 5],
        "ut": {"alpha": 1.0, "beta": 2.0},
        "nearspd": {"i_max": 100, "tau_conv": 1e-6, "tau_eig": 1e-7, "tau_posd": 1e-7},
        "repair_enabled": True,
    }
    json.dump(scenario, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
