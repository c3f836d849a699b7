# Regenerates fm_chain_10_gap.txt by dense diagonalisation with numpy.
import numpy as np

n = 10
sx = np.array([[0, 1], [1, 0]], dtype=complex)
sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
sz = np.array([[1, 0], [0, -1]], dtype=complex)


def site(op, i):
    out = np.array([[1.0]], dtype=complex)
    for j in range(n):
        out = np.kron(out, op if j == i else np.eye(2))
    return out


h = np.zeros((2**n, 2**n), dtype=complex)
for i in range(n - 1):
    h += 0.25 * (np.eye(2**n) - sum(site(p, i) @ site(p, i + 1) for p in (sx, sy, sz)))
ev = np.linalg.eigvalsh(h)
print(repr(float(min(e for e in ev if e > 1e-8))))
