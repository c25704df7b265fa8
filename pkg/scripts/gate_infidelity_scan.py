#!/usr/bin/env python3
"""Thermal gate infidelity versus detuning for the two-ion surface trap."""

import argparse
import math
from pathlib import Path

import numpy as np

import ionmodes as im
from ionmodes.chifile import read_chi

DATA = Path(__file__).resolve().parents[1] / "data"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="gate_infidelity.csv")
    args = parser.parse_args()

    chi = read_chi(DATA / "chi_two_ion_surface_trap.txt")
    env = im.ThermalEnvironment(temperature=0.7e-3)
    detunings_khz = np.geomspace(0.5, 50, 41)
    with open(args.out, "w") as fh:
        fh.write("# detuning_khz,infidelity\n")
        for det in detunings_khz:
            inf = im.thermal_gate_infidelity(chi, 1, 2 * math.pi * det * 1e3,
                                             env)
            fh.write(f"{det:.12g},{inf:.12g}\n")
    inf1 = im.thermal_gate_infidelity(chi, 1, 2 * math.pi * 1e3, env)
    inf20 = im.thermal_gate_infidelity(chi, 1, 2 * math.pi * 20e3, env)
    print(f"wrote {args.out}; 1-F = {inf1:.3e} at 1 kHz, {inf20:.3e} at 20 kHz")


if __name__ == "__main__":
    main()
