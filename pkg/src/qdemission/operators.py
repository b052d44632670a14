"""Two-level operators and superoperator building blocks.

Basis order is (|0>, |X>): index 0 is the ground state, index 1 the exciton.
sigma_z = |X><X| - |0><0|, so the excited state is its +1 eigenstate.

Superoperators are 4x4 complex matrices acting on column-stacked density
matrices: vec(rho) = rho.reshape(-1, order="F"), so vec(A rho B) =
kron(B.T, A) vec(rho), and the trace functional is the row vector
vec(I)^dag = (1, 0, 0, 1).
"""

from __future__ import annotations

import numpy as np

IDENTITY = np.eye(2, dtype=complex)
SIGMA_P = np.array([[0, 0], [1, 0]], dtype=complex)      # |X><0|
SIGMA_M = np.array([[0, 1], [0, 0]], dtype=complex)      # |0><X|
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)

TRACE_VECTOR = np.array([1, 0, 0, 1], dtype=complex)


def vec(rho):
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v):
    return np.asarray(v, dtype=complex).reshape(2, 2, order="F")


def spre(a):
    """Superoperator for rho -> a rho."""
    return np.kron(IDENTITY, np.asarray(a, dtype=complex))


def spost(a):
    """Superoperator for rho -> rho a."""
    return np.kron(np.asarray(a, dtype=complex).T, IDENTITY)


def commutator_superop(a):
    """Superoperator for rho -> [a, rho]."""
    return spre(a) - spost(a)


def hamiltonian_superop(h):
    """Superoperator for rho -> -i [h, rho]."""
    return -1j * commutator_superop(h)


def lindblad_dissipator(c):
    """Superoperator for rho -> c rho c^dag - 1/2 {c^dag c, rho}."""
    c = np.asarray(c, dtype=complex)
    cdc = c.conj().T @ c
    return np.kron(c.conj(), c) - 0.5 * (spre(cdc) + spost(cdc))


def hermitize(rho):
    return 0.5 * (rho + rho.conj().T)
