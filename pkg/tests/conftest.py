import numpy as np
import pytest

from qesn.quantum import gates as G


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_dm(rng, n, rank=3):
    a = rng.normal(size=(1 << n, rank)) + 1j * rng.normal(size=(1 << n, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_gate(rng, n):
    kind = rng.integers(5)
    if kind == 0 or n == 1:
        return G.rotation(int(rng.integers(n)), *rng.uniform(-np.pi, np.pi, 3))
    c, t = (int(q) for q in rng.choice(n, 2, replace=False))
    theta = rng.uniform(-np.pi, np.pi)
    return [None, lambda: G.cnot(c, t), lambda: G.crx(c, t, theta),
            lambda: G.cry(c, t, theta), lambda: G.crz(c, t, theta)][kind]()


def full_operator(gate, n):
    """Dense 2^n x 2^n operator built by brute force over basis states (oracle)."""
    dim = 1 << n
    op = np.zeros((dim, dim), dtype=complex)
    qs = gate.qubits
    local = gate.matrix()
    k = len(qs)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub = 0
        for q in qs:
            sub = (sub << 1) | bits[q]
        for out_sub in range(1 << k):
            amp = local[out_sub, sub]
            if amp == 0:
                continue
            nb = list(bits)
            for j, q in enumerate(qs):
                nb[q] = (out_sub >> (k - 1 - j)) & 1
            row = int("".join(map(str, nb)), 2)
            op[row, col] += amp
    return op


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
