"""Standalone recomputation of the scale-matched flow-map norm at the
center of a snapshot window, for cross-checking the package's value.

Usage: python norm_oracle.py SNAPSHOT...

Reads the flat binary snapshot format directly (no package imports), builds
every derivative weight from scratch (Vandermonde solves), and prints the
single-slice norm value at the center snapshot. Deliberately brute force:
plain loops over multi-indices, dense differentiation matrices, no shared
code with the library under test.
"""

import math
import struct
import sys

import numpy as np

MAGIC = b"RELEUv1\0"
P_MAX = 2


def read_snapshot(path):
    blob = open(path, "rb").read()
    if blob[:8] != MAGIC:
        raise SystemExit(f"{path}: bad magic")
    n1, n2, n3 = struct.unpack_from("<3I", blob, 8)
    (tau,) = struct.unpack_from("<d", blob, 20)
    (count,) = struct.unpack_from("<I", blob, 28)
    pos = 32
    fields = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        name = blob[pos : pos + name_len].decode("utf-8")
        pos += name_len
        (ncomp,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        m = ncomp * n1 * n2 * n3
        flat = np.frombuffer(blob, dtype="<f8", count=m, offset=pos)
        pos += 8 * m
        arr = flat.reshape(ncomp, n3, n2, n1).transpose(0, 3, 2, 1)
        fields[name] = arr[0] if ncomp == 1 else arr
    return tau, (n1, n2, n3), fields


def solve_weights(offsets, k):
    """Derivative weights from the Taylor/Vandermonde system."""
    offsets = np.asarray(offsets, dtype=float)
    V = np.vander(offsets, increasing=True).T
    b = np.zeros(len(offsets))
    b[k] = math.factorial(k)
    return np.linalg.solve(V, b)


def horizontal_matrix(n):
    """Periodic 4th-order differentiation matrix, spacing 1/n."""
    w = solve_weights([-2, -1, 0, 1, 2], 1) * n
    D = np.zeros((n, n))
    for shift, weight in zip([-2, -1, 0, 1, 2], w):
        for i in range(n):
            D[i, (i + shift) % n] += weight
    return D


def vertical_matrix(n3):
    """Bounded-axis 4th-order matrix: one-sided 5-node rows at the ends."""
    h = 1.0 / (n3 - 1)
    D = np.zeros((n3, n3))
    for i in range(n3):
        lo = min(max(i - 2, 0), n3 - 5)
        nodes = np.arange(lo, lo + 5)
        D[i, nodes] = solve_weights(nodes - i, 1) / h
    return D


class Ops:
    def __init__(self, shape):
        self.n1, self.n2, self.n3 = shape
        self.D = {
            1: horizontal_matrix(self.n1),
            2: horizontal_matrix(self.n2),
            3: vertical_matrix(self.n3),
        }
        self.y = (
            np.arange(self.n1) / self.n1,
            np.arange(self.n2) / self.n2,
            np.linspace(0.0, 1.0, self.n3),
        )

    def partial(self, field, axis):
        grid_axis = field.ndim - 4 + axis
        return np.apply_along_axis(lambda col: self.D[axis] @ col, grid_axis, field)

    def multi_partial(self, field, idx):
        out = field
        for axis, reps in zip((1, 2, 3), idx):
            for _ in range(reps):
                out = self.partial(out, axis)
        return out

    def integrate(self, field):
        h3 = 1.0 / (self.n3 - 1)
        vertical = (
            0.5 * (field[..., 0] + field[..., -1]) + field[..., 1:-1].sum(axis=-1)
        ) * h3
        return float(vertical.sum() / (self.n1 * self.n2))

    def l2sq(self, field):
        sq = np.square(field)
        while sq.ndim > 3:
            sq = sq.sum(axis=0)
        return self.integrate(sq)

    def mesh(self):
        return np.meshgrid(*self.y, indexing="ij")


def multi_indices(k):
    return [
        (i, j, t - i - j)
        for t in range(k + 1)
        for i in range(t + 1)
        for j in range(t - i + 1)
    ]


def sobolev_sq(ops, field, k, absolute=False):
    """Squared H^k norm; `absolute` adds the reference embedding's
    contributions (its value at order zero, unit gradients at order one)."""
    total = 0.0
    mesh = ops.mesh()
    for idx in multi_indices(k):
        d = ops.multi_partial(field, idx)
        if absolute:
            order = sum(idx)
            if order == 0:
                d = d.copy()
                for ax in (1, 2, 3):
                    d[ax] = d[ax] + mesh[ax - 1]
            elif order == 1:
                ax = idx.index(1) + 1
                d = d.copy()
                d[ax] = d[ax] + 1.0
        total += ops.l2sq(d)
    return total


def tangential_indices(m):
    return [(i, m - i) for i in range(m + 1)]


def tang(ops, field, idx):
    return ops.multi_partial(field, (idx[0], idx[1], 0))


def fd_center(series, k, dt):
    """k-th tau-derivative at the center of an odd uniformly spaced series."""
    n = len(series)
    c = n // 2
    if k == 0:
        return series[c]
    w = solve_weights(np.arange(n) - c, k) / dt**k
    out = w[0] * series[0]
    for j in range(1, n):
        out = out + w[j] * series[j]
    return out


def flow_matrices(ops, eta, v):
    """M[K, nu] (velocity row plus spatial gradients of the absolute map),
    its pointwise inverse A[nu, K], and the determinant."""
    shape = eta.shape[1:]
    M = np.zeros((4, 4) + shape)
    M[0] = v
    for k in (1, 2, 3):
        M[k] = ops.partial(eta, k)
        M[k, k] += 1.0
    Mmat = np.moveaxis(M, (0, 1), (-2, -1))
    J = np.linalg.det(Mmat)
    A = np.moveaxis(np.linalg.inv(Mmat), (-2, -1), (0, 1))
    return M, A, J


G = np.array([-1.0, 1.0, 1.0, 1.0])


def vorticity_components(ops, A, v, dtau_v):
    dv = np.stack([dtau_v] + [ops.partial(v, k) for k in (1, 2, 3)])
    dv_low = dv * G.reshape(1, 4, 1, 1, 1)
    T = np.einsum("mk...,kn...->mn...", A, dv_low)
    omega = T - np.swapaxes(T, 0, 1)
    iu, ju = np.triu_indices(4, k=1)
    return omega[iu, ju]


def main(paths):
    snaps = sorted((read_snapshot(p) for p in paths), key=lambda s: s[0])
    shape = snaps[0][1]
    ops = Ops(shape)
    taus = np.array([s[0] for s in snaps])
    steps = np.diff(taus)
    if len(snaps) % 2 == 0 or len(snaps) < 2 * P_MAX + 1:
        raise SystemExit("need an odd window of at least 2*p_max + 1 snapshots")
    if np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
        raise SystemExit("snapshot spacing is not uniform")
    dt = float(steps[0])

    etas = [s[2]["eta"] for s in snaps]
    vs = [s[2]["v"] for s in snaps]
    center = len(snaps) // 2
    F = snaps[center][2]["F"]
    sqrtF = np.sqrt(F)

    Js = []
    for eta, v in zip(etas, vs):
        _, _, J = flow_matrices(ops, eta, v)
        Js.append(J)
    jm2s = [1.0 / (J * J) for J in Js]

    # block 1: flow-map Sobolev tower (absolute map at p = 0)
    b1 = sobolev_sq(ops, etas[center], 4, absolute=True)
    for p in range(1, P_MAX + 1):
        b1 += sobolev_sq(ops, fd_center(vs, 2 * p - 1, dt), 4 - p)

    # block 2: mass-weighted inverse-square Jacobian tower
    b2 = 0.0
    for p in range(0, P_MAX + 1):
        b2 += sobolev_sq(ops, F * fd_center(jm2s, 2 * p, dt), 4 - p)

    # block 3: tangential mixed tower
    b3 = 0.0
    for p in range(0, P_MAX + 1):
        tau_entry = fd_center(vs, 2 * p, dt)
        base = etas[center] if p == 0 else fd_center(vs, 2 * p - 1, dt)
        spatial = [ops.partial(base, k) for k in (1, 2, 3)]
        if p == 0:
            for k in (1, 2, 3):
                spatial[k - 1][k] += 1.0
        Deta = np.stack([tau_entry] + spatial)
        for idx in tangential_indices(4 - p):
            b3 += ops.l2sq(F * tang(ops, Deta, idx))
            b3 += ops.l2sq(sqrtF * tang(ops, tau_entry, idx))

    # blocks 4 and 5: vorticity tower
    _, A, _ = flow_matrices(ops, etas[center], vs[center])
    omega = vorticity_components(ops, A, vs[center], fd_center(vs, 1, dt))
    b4 = sobolev_sq(ops, omega, 3)
    b5 = sum(ops.l2sq(F * tang(ops, omega, idx)) for idx in tangential_indices(4))

    print(repr(b1 + b2 + b3 + b4 + b5))


if __name__ == "__main__":
    main(sys.argv[1:])
