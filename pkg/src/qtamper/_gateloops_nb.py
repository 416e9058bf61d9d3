"""Numba-jitted gate application loops.

Mirrors ``_gateloops_np`` exactly; see that module for the packed-gate
contract. Loops are scalar on purpose: for statevectors up to 2^24 the
jitted stride walk beats temporary-array arithmetic.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def run_program(amps, kinds, targets, controls, angles):
    dim = amps.shape[0]
    inv = 1.0 / np.sqrt(2.0)
    for g in range(kinds.shape[0]):
        kind = kinds[g]
        target = targets[g]
        if kind == 3:
            cbit = 1 << controls[g]
            tbit = 1 << target
            for i in range(dim):
                if (i & cbit) != 0 and (i & tbit) == 0:
                    j = i | tbit
                    tmp = amps[i]
                    amps[i] = amps[j]
                    amps[j] = tmp
        else:
            step = 1 << target
            if kind == 0:
                for base in range(0, dim, 2 * step):
                    for off in range(step):
                        i0 = base + off
                        i1 = i0 + step
                        a = amps[i0]
                        b = amps[i1]
                        amps[i0] = (a + b) * inv
                        amps[i1] = (a - b) * inv
            elif kind == 1:
                c = np.cos(angles[g] / 2.0)
                s = np.sin(angles[g] / 2.0)
                for base in range(0, dim, 2 * step):
                    for off in range(step):
                        i0 = base + off
                        i1 = i0 + step
                        a = amps[i0]
                        b = amps[i1]
                        amps[i0] = c * a - 1j * s * b
                        amps[i1] = -1j * s * a + c * b
            else:
                c = np.cos(angles[g] / 2.0)
                s = np.sin(angles[g] / 2.0)
                for base in range(0, dim, 2 * step):
                    for off in range(step):
                        i0 = base + off
                        i1 = i0 + step
                        a = amps[i0]
                        b = amps[i1]
                        amps[i0] = c * a - s * b
                        amps[i1] = s * a + c * b
    return amps
