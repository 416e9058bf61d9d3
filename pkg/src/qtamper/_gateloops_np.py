"""Pure-numpy gate application loops.

Same contract as ``_gateloops_nb``: gates are packed as parallel arrays
(kind code, target, control, angle), with kind codes 0=H, 1=Rx, 2=Ry,
3=CNOT, and the amplitude index uses qubit 0 as the least significant bit.
``run_program`` mutates ``amps`` in place and returns it.
"""
import numpy as np

_SQRT2_INV = 1.0 / np.sqrt(2.0)


def _halves(amps, target):
    # view with axis 1 toggling bit `target`
    step = 1 << target
    v = amps.reshape(-1, 2, step)
    return v[:, 0, :], v[:, 1, :]


def run_program(amps, kinds, targets, controls, angles):
    dim = amps.shape[0]
    for g in range(kinds.shape[0]):
        kind = kinds[g]
        target = targets[g]
        if kind == 3:
            control = controls[g]
            idx = np.arange(dim)
            sel = ((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)
            src = idx[sel]
            dst = src | (1 << target)
            tmp = amps[src].copy()
            amps[src] = amps[dst]
            amps[dst] = tmp
        elif kind == 0:
            a0, a1 = _halves(amps, target)
            s = (a0 + a1) * _SQRT2_INV
            d = (a0 - a1) * _SQRT2_INV
            a0[...] = s
            a1[...] = d
        elif kind == 1:
            c = np.cos(angles[g] / 2.0)
            s = np.sin(angles[g] / 2.0)
            a0, a1 = _halves(amps, target)
            n0 = c * a0 - 1j * s * a1
            n1 = -1j * s * a0 + c * a1
            a0[...] = n0
            a1[...] = n1
        else:
            c = np.cos(angles[g] / 2.0)
            s = np.sin(angles[g] / 2.0)
            a0, a1 = _halves(amps, target)
            n0 = c * a0 - s * a1
            n1 = s * a0 + c * a1
            a0[...] = n0
            a1[...] = n1
    return amps
