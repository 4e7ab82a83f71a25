"""Writes the n=6 round-trip fixture: state.svec, obs.obsm and expected_E.txt."""
import struct

import numpy as np

n = 6
dim = 1 << n
rng = np.random.default_rng(20240601)

psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
psi /= np.linalg.norm(psi)

q, _ = np.linalg.qr(rng.normal(size=(dim, 2)) + 1j * rng.normal(size=(dim, 2)))
m = 0.7 * np.outer(q[:, 0], q[:, 0].conj()) - 0.4 * np.outer(q[:, 1], q[:, 1].conj())
m = (m + m.conj().T) / 2

with open("state.svec", "wb") as f:
    f.write(b"SVEC" + struct.pack("<HH", 1, n))
    for a in psi:
        f.write(struct.pack("<dd", a.real, a.imag))

with open("obs.obsm", "wb") as f:
    f.write(b"OBSM" + struct.pack("<HHQ", 1, n, 2))
    for a in m.reshape(-1):
        f.write(struct.pack("<dd", a.real, a.imag))

with open("expected_E.txt", "w") as f:
    f.write(repr(float(np.vdot(psi, m @ psi).real)) + "\n")
