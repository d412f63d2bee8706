"""Shared test helpers: dense reference operators and brute-force oracles."""

import itertools

import numpy as np


def dense_operator(system):
    """l×(m·n) dense copy of the constraint operator."""
    return np.asarray(system.operator.todense())


def brute_force_constraints(inst):
    """Enumerate the alignment constraints straight from their definition.

    Returns the identity-sum supports (with targets) and the set of zero entries.
    """
    ro = inst.row_offsets
    sums = []
    for k in range(inst.K):
        desired = [j for j in range(inst.K) if (k, j) in inst.edges and k in inst.sharing[j]]
        for a, b in itertools.product(range(inst.d[k]), repeat=2):
            support = frozenset((ro[k] + a, j * inst.m + ro[k] + b) for j in desired)
            sums.append((support, 1.0 if a == b else 0.0))
    zeros = set()
    for k, j in inst.edges:
        for i in inst.sharing[j]:
            if i == k:
                continue
            for a in range(inst.d[k]):
                for b in range(inst.d[i]):
                    zeros.add((ro[k] + a, j * inst.m + ro[i] + b))
    return sums, zeros


def dense_hessian(problem, Y):
    """Real matrix of the Hessian on an orthonormal basis of the horizontal space at Y."""
    from stiefel_tim.manifold import HorizontalVector, project_horizontal

    rows, cols = Y.shape
    columns = []
    for idx in range(rows * cols):
        for unit in (1.0, 1j):
            e = np.zeros(rows * cols, dtype=np.complex128)
            e[idx] = unit
            columns.append(project_horizontal(Y, e.reshape(rows, cols)).matrix.reshape(-1))
    stacked = np.array(columns).T
    real = np.vstack([stacked.real, stacked.imag])
    q, s, _ = np.linalg.svd(real, full_matrices=False)
    basis = q[:, s > 1e-8 * s[0]]
    half = rows * cols
    vectors = [HorizontalVector((b[:half] + 1j * b[half:]).reshape(rows, cols), Y) for b in basis.T]
    H = np.array([[u.inner(problem.riemannian_hessian(Y, v)) for v in vectors] for u in vectors])
    return H, vectors
