"""
Bloch-Fano decomposition and the canonical link frame
=====================================================

Every two-qubit density matrix is fixed by two local Bloch vectors and a
3x3 correlation matrix W.  Local unitaries rotate W from both sides, so the
singular values of W are the only correlation data that matter for the
network bounds.  This script decomposes a few states and rotates one into
its canonical frame.
"""

import numpy as np

from qnetfilter import (
    bloch_decompose,
    canonical_frame,
    correlation_singular_values,
    grud_state,
    werner_state,
)

np.set_printoptions(precision=4, suppress=True)

# A Werner state has no local polarisation and an isotropic W = -p * I.
form = bloch_decompose(werner_state(0.7))
print("Werner(0.7)  a =", form.a, " b =", form.b)
print("W =")
print(form.W)
print("singular values:", correlation_singular_values(werner_state(0.7)))
print()

# The partially entangled family keeps its Bloch vectors on the z axis.
rho = grud_state(0.1, 0.23)
form = bloch_decompose(rho)
print("grud(0.1, 0.23)  a =", form.a, " b =", form.b)
print("W =")
print(form.W)
print()

# Scramble the state with random local unitaries; the singular values stay
# put and canonical_frame recovers a diagonal W.
from qnetfilter.core import rotation_to_unitary

rng = np.random.default_rng(1)


def random_rotation():
    m = rng.normal(size=(3, 3))
    q, r = np.linalg.qr(m)
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


u = np.kron(rotation_to_unitary(random_rotation()), rotation_to_unitary(random_rotation()))
scrambled = u @ rho @ u.conj().T

print("after random local unitaries:")
print("singular values:", correlation_singular_values(scrambled))
_, form = canonical_frame(scrambled)
print("canonical-frame W =")
print(form.W)
