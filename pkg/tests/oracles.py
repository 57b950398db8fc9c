"""Independent dense-matrix and brute-force references used by the tests."""

from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)
LETTER = {"I": I2, "X": PX, "Y": PY, "Z": PZ}

ONE_Q = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "X": PX,
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
}


def kron_all(ms):
    # qubit 0 is the leftmost tensor factor
    return reduce(np.kron, ms)


def pauli_matrix(p):
    letters = p.letters()
    return (1j ** p.phase) * kron_all([LETTER[c] for c in letters])


def gate_matrix(gate, n):
    if len(gate.qubits) == 1:
        ms = [I2] * n
        ms[gate.qubits[0]] = ONE_Q[gate.kind]
        return kron_all(ms)
    a, b = gate.qubits
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    target = PX if gate.kind == "CX" else PZ
    first = [I2] * n
    first[a] = p0
    second = [I2] * n
    second[a] = p1
    second[b] = target
    return kron_all(first) + kron_all(second)


def matrix_to_pauli_letters(m, n):
    """(letters, phase) with m == i^phase * P, or None if m is not a Pauli."""
    from itertools import product
    for letters in product("IXYZ", repeat=n):
        P = kron_all([LETTER[c] for c in letters])
        tr = np.trace(P.conj().T @ m) / 2 ** n
        if abs(abs(tr) - 1) < 1e-9:
            for ph in range(4):
                if abs(tr - 1j ** ph) < 1e-9:
                    return "".join(letters), ph
    return None


def gae_reference(rewards, values, dones, last_value, gamma, lam):
    """O(T^2) GAE: explicit discounted sums of TD residuals per env."""
    T, N = rewards.shape
    adv = np.zeros((T, N))
    for i in range(N):
        for t in range(T):
            total, coef = 0.0, 1.0
            for k in range(t, T):
                nv = last_value[i] if k == T - 1 else values[k + 1, i]
                nonterm = 1.0 - dones[k, i]
                delta = rewards[k, i] + gamma * nv * nonterm - values[k, i]
                total += coef * delta
                if dones[k, i]:
                    break
                coef *= gamma * lam
            adv[t, i] = total
    return adv
