"""Reference lookup tables, kept verbatim as golden data.

Correction tables are keyed by ``(V_xa1, V_total, P_yb1, P_total)`` with
parities as +1/-1. The coefficient table is keyed by
``(V_xa1, V_yb1, P_xa1, P_yb1)``. Amplitude patterns are written over the
input letters a, b, c, d, e.g. ``("a", "-b", "d", "-c")`` is
a|00> - b|01> + d|10> - c|11>.
"""
from __future__ import annotations

import numpy as np

from .statevec import Gate

U0, U1, U2, U3 = Gate.U0, Gate.U1, Gate.U2, Gate.U3

Key = tuple[int, int, int, int]

# odd number of controllers: U_i (on a) ⊗ U_j (on b), then CNOT
TABLE_ODD: dict[Key, tuple[tuple[str, ...], Gate, Gate]] = {
    (0, 0, +1, +1): (("a", "b", "d", "c"), U0, U0),
    (0, 0, +1, -1): (("a", "b", "-d", "-c"), U1, U0),
    (0, 0, -1, +1): (("a", "-b", "d", "-c"), U0, U1),
    (0, 0, -1, -1): (("a", "-b", "-d", "c"), U1, U1),
    (0, 1, +1, +1): (("b", "a", "c", "d"), U0, U2),
    (0, 1, +1, -1): (("b", "a", "-c", "-d"), U1, U2),
    (0, 1, -1, +1): (("b", "-a", "c", "-d"), U0, U3),
    (0, 1, -1, -1): (("b", "-a", "-c", "d"), U1, U3),
    (1, 0, +1, +1): (("d", "c", "a", "b"), U2, U0),
    (1, 0, +1, -1): (("d", "c", "-a", "-b"), U3, U0),
    (1, 0, -1, +1): (("d", "-c", "a", "-b"), U2, U1),
    (1, 0, -1, -1): (("d", "-c", "-a", "b"), U3, U1),
    (1, 1, +1, +1): (("c", "d", "b", "a"), U2, U2),
    (1, 1, +1, -1): (("c", "d", "-b", "-a"), U3, U2),
    (1, 1, -1, +1): (("c", "-d", "b", "-a"), U2, U3),
    (1, 1, -1, -1): (("c", "-d", "-b", "a"), U3, U3),
}

# even number of controllers: U_i ⊗ U_j only
TABLE_EVEN: dict[Key, tuple[tuple[str, ...], Gate, Gate]] = {
    (0, 0, +1, +1): (("a", "b", "c", "d"), U0, U0),
    (0, 0, +1, -1): (("a", "b", "-c", "-d"), U1, U0),
    (0, 0, -1, +1): (("a", "-b", "-c", "d"), U1, U1),
    (0, 0, -1, -1): (("a", "-b", "c", "-d"), U0, U1),
    (0, 1, +1, +1): (("b", "a", "d", "c"), U0, U2),
    (0, 1, +1, -1): (("b", "a", "-d", "-c"), U1, U2),
    (0, 1, -1, +1): (("b", "-a", "-d", "c"), U1, U3),
    (0, 1, -1, -1): (("b", "-a", "d", "-c"), U0, U3),
    (1, 0, +1, +1): (("d", "c", "b", "a"), U2, U2),
    (1, 0, +1, -1): (("d", "c", "-b", "-a"), U3, U2),
    (1, 0, -1, +1): (("d", "-c", "-b", "a"), U3, U3),
    (1, 0, -1, -1): (("d", "-c", "b", "-a"), U2, U3),
    (1, 1, +1, +1): (("c", "d", "a", "b"), U2, U0),
    (1, 1, +1, -1): (("c", "d", "-a", "-b"), U3, U0),
    (1, 1, -1, +1): (("c", "-d", "-a", "b"), U3, U1),
    (1, 1, -1, -1): (("c", "-d", "a", "-b"), U2, U1),
}

# alpha, beta, gamma, delta after Alice's two Bell measurements
TABLE_COEFFS: dict[Key, tuple[str, str, str, str]] = {
    (0, 0, +1, +1): ("+(a+b)", "+(a-b)", "+(c+d)", "+(c-d)"),
    (0, 0, +1, -1): ("+(a-b)", "+(a+b)", "+(c-d)", "+(c+d)"),
    (0, 0, -1, +1): ("+(a+b)", "+(a-b)", "-(c+d)", "-(c-d)"),
    (0, 0, -1, -1): ("+(a-b)", "+(a+b)", "-(c-d)", "-(c+d)"),
    (0, 1, +1, +1): ("+(a+b)", "-(a-b)", "+(c+d)", "-(c-d)"),
    (0, 1, +1, -1): ("+(a-b)", "-(a+b)", "+(c-d)", "-(c+d)"),
    (0, 1, -1, +1): ("+(a+b)", "-(a-b)", "-(c+d)", "+(c-d)"),
    (0, 1, -1, -1): ("+(a-b)", "-(a+b)", "-(c-d)", "+(c+d)"),
    (1, 0, +1, +1): ("+(c+d)", "+(c-d)", "+(a+b)", "+(a-b)"),
    (1, 0, +1, -1): ("+(c-d)", "+(c+d)", "+(a-b)", "+(a+b)"),
    (1, 0, -1, +1): ("-(c+d)", "-(c-d)", "+(a+b)", "+(a-b)"),
    (1, 0, -1, -1): ("-(c-d)", "-(c+d)", "+(a-b)", "+(a+b)"),
    (1, 1, +1, +1): ("+(c+d)", "-(c-d)", "+(a+b)", "-(a-b)"),
    (1, 1, +1, -1): ("+(c-d)", "-(c+d)", "+(a-b)", "-(a+b)"),
    (1, 1, -1, +1): ("-(c+d)", "+(c-d)", "+(a+b)", "-(a-b)"),
    (1, 1, -1, -1): ("-(c-d)", "+(c+d)", "+(a-b)", "-(a+b)"),
}

# Bob's pre-measurement state for a Bell-state carrier, keyed by (V_total, P_total):
# Psi_f = (U0 ⊗ U_j) Psi_c for even n, CNOT (U0 ⊗ U_j) Psi_c for odd n.
TABLE_CLASSICAL: dict[tuple[int, int], Gate] = {
    (0, +1): U0,
    (0, -1): U1,
    (1, +1): U2,
    (1, -1): U3,
}


def evaluate_pattern(pattern, amps) -> np.ndarray:
    """Evaluate letter patterns like ``"-c"`` or ``"+(a-b)"`` on (a, b, c, d)."""
    env = dict(zip("abcd", np.asarray(amps, dtype=complex)))
    out = []
    for term in pattern:
        sign = -1 if term.startswith("-") else 1
        body = term.lstrip("+-").strip("()")
        if len(body) == 1:
            val = env[body]
        else:
            x, op, y = body
            val = env[x] + env[y] if op == "+" else env[x] - env[y]
        out.append(sign * val)
    return np.array(out, dtype=complex)
