"""Gate set used by the reservoir circuit.

Conventions: qubit 0 is the most significant bit of a basis index, and the
Euler rotation is ``R(a, b, g) = RZ(g) @ RY(b) @ RZ(a)`` (``a`` acts first).
Two-qubit matrices are written in the (control, target) basis with the
control as the high bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from ..errors import OperandError

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (X, Y, Z)

ROTATION = "rotation"
CNOT = "cnot"
CRX = "crx"
CRY = "cry"
CRZ = "crz"
CONTROLLED_KINDS = (CNOT, CRX, CRY, CRZ)


def rz(theta):
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def ry(theta):
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx(theta):
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def rotation_matrix(alpha, beta, gamma):
    """Single-qubit Euler rotation RZ(gamma) RY(beta) RZ(alpha)."""
    # closed form of the ZYZ product
    c, s = cos(beta / 2), sin(beta / 2)
    p, m = 0.5 * (alpha + gamma), 0.5 * (gamma - alpha)
    return np.array(
        [
            [np.exp(-1j * p) * c, -np.exp(-1j * m) * s],
            [np.exp(1j * m) * s, np.exp(1j * p) * c],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class Gate:
    """One logical gate.

    ``qubits`` is ``(q,)`` for a rotation and ``(control, target)`` for the
    controlled kinds; ``params`` holds the angles in radians.
    """

    kind: str
    qubits: tuple
    params: tuple = ()

    def __post_init__(self):
        if self.kind == ROTATION:
            if len(self.qubits) != 1 or len(self.params) != 3:
                raise OperandError("rotation takes one qubit and three angles")
        elif self.kind in CONTROLLED_KINDS:
            if len(self.qubits) != 2:
                raise OperandError(f"{self.kind} takes (control, target)")
            if self.qubits[0] == self.qubits[1]:
                raise OperandError("control and target must differ")
            if len(self.params) != (0 if self.kind == CNOT else 1):
                raise OperandError(f"wrong parameter count for {self.kind}")
        else:
            raise OperandError(f"unknown gate kind {self.kind!r}")
        if any(int(q) < 0 for q in self.qubits):
            raise OperandError("negative qubit index")

    @property
    def is_two_qubit(self):
        return self.kind != ROTATION

    def target_matrix(self):
        """2x2 matrix applied to the target (or the only) qubit."""
        if self.kind == ROTATION:
            return rotation_matrix(*self.params)
        if self.kind == CNOT:
            return X
        theta = self.params[0]
        return {CRX: rx, CRY: ry, CRZ: rz}[self.kind](theta)

    def matrix(self):
        """Full unitary: 2x2 for rotations, 4x4 in the (control, target) basis."""
        u = self.target_matrix()
        if self.kind == ROTATION:
            return u
        full = np.eye(4, dtype=complex)
        full[2:, 2:] = u
        return full


def rotation(q, alpha, beta, gamma):
    return Gate(ROTATION, (int(q),), (float(alpha), float(beta), float(gamma)))


def cnot(control, target):
    return Gate(CNOT, (int(control), int(target)))


def crx(control, target, theta):
    return Gate(CRX, (int(control), int(target)), (float(theta),))


def cry(control, target, theta):
    return Gate(CRY, (int(control), int(target)), (float(theta),))


def crz(control, target, theta):
    return Gate(CRZ, (int(control), int(target)), (float(theta),))
