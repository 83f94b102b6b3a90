"""Dense Nystrom oracle for the sinc-kernel eigenproblem on [-1, 1].

Standalone reference: full (non-parity-split) kernel matrix on a numpy
Gauss-Legendre grid, diagonalized with LAPACK. Values printed here are frozen
into the Rust test suite.
"""
import numpy as np


def eigenvalues(c, nodes, count):
    x, w = np.polynomial.legendre.leggauss(nodes)
    d = x[:, None] - x[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.sin(c * d) / (np.pi * d)
    k[np.diag_indices(nodes)] = c / np.pi
    sw = np.sqrt(w)
    a = sw[:, None] * k * sw[None, :]
    lam = np.linalg.eigvalsh(a)[::-1]
    return lam[:count]


if __name__ == "__main__":
    for c, nodes, count in [(1.0, 2000, 6), (2.0, 1000, 7), (5.0, 640, 9), (10.0, 1000, 12), (20.0, 1000, 18)]:
        lam = eigenvalues(c, nodes, count)
        print(f"c={c} nodes={nodes}")
        for n, v in enumerate(lam):
            print(f"  {n:2d} {v:.17e}")
