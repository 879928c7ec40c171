"""Dense linear-algebra helpers shared by the theory backends.

Conventions used throughout the package (documented once, here):

* ``vec`` is row-major (C-order) stacking, so ``vec(A X B) = (A kron B^T) vec(X)``.
* A map ``M`` between matrix spaces is stored as its *process matrix* ``N``
  ("Liouville form") with ``vec(M(X)) = N vec(X)``; shape ``(dout**2, din**2)``.
* The Choi matrix of ``M`` puts the input factor first and is unnormalized:
  ``J = sum_ij E_ij kron M(E_ij)``, shape ``(din*dout, din*dout)``; a
  trace-preserving map has ``Tr_out J = I_in`` and ``Tr J = din``.
* Operator bases are Hilbert-Schmidt orthonormal and canonically ordered:
  normalized identity, then the diagonal traceless elements, then for each
  index pair (j < k, lexicographic) the symmetric element and — in the
  Hermitian case — the antisymmetric element.
* Eigen-decompositions used to construct canonical objects sort eigenvalues
  in descending order and fix each eigenvector's phase by making its first
  component of magnitude above cutoff real and positive.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "hermitian_basis",
    "symmetric_basis",
    "kron_basis",
    "vec",
    "unvec",
    "liouville_from_choi",
    "choi_from_liouville",
    "kraus_to_choi",
    "kraus_to_liouville",
    "choi_to_kraus",
    "liouville_kron",
    "apply_liouville",
    "partial_trace",
    "swap_unitary",
    "block_swap_permutation",
    "sorted_eigh",
    "rank_with_cutoff",
    "canonical_phase",
    "complete_to_unitary",
    "procrustes_unitary",
]

#: Relative eigenvalue cutoff below which spectra are treated as zero rank.
RANK_CUTOFF = 1e-9


# ---------------------------------------------------------------------------
# operator bases
# ---------------------------------------------------------------------------


def _diagonal_elements(d: int) -> list[np.ndarray]:
    out = []
    for level in range(1, d):
        m = np.zeros((d, d))
        m[np.arange(level), np.arange(level)] = 1.0
        m[level, level] = -level
        out.append(m / np.sqrt(level * (level + 1)))
    return out


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of d x d Hermitian matrices, shape (d*d, d, d).

    Order: I/sqrt(d); diagonal traceless elements; then per (j, k) pair the
    real symmetric element followed by the imaginary antisymmetric one.
    """
    elems: list[np.ndarray] = [np.eye(d, dtype=complex) / np.sqrt(d)]
    elems.extend(m.astype(complex) for m in _diagonal_elements(d))
    for j in range(d):
        for k in range(j + 1, d):
            x = np.zeros((d, d), dtype=complex)
            x[j, k] = x[k, j] = 1.0 / np.sqrt(2.0)
            elems.append(x)
            y = np.zeros((d, d), dtype=complex)
            y[j, k] = -1j / np.sqrt(2.0)
            y[k, j] = 1j / np.sqrt(2.0)
            elems.append(y)
    return np.stack(elems)


def symmetric_basis(d: int) -> np.ndarray:
    """Orthonormal basis of d x d real symmetric matrices, shape (d(d+1)/2, d, d)."""
    elems: list[np.ndarray] = [np.eye(d) / np.sqrt(d)]
    elems.extend(_diagonal_elements(d))
    for j in range(d):
        for k in range(j + 1, d):
            x = np.zeros((d, d))
            x[j, k] = x[k, j] = 1.0 / np.sqrt(2.0)
            elems.append(x)
    return np.stack(elems)


def kron_basis(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Elementwise Kronecker of two basis stacks, left index slowest."""
    n1, d1, _ = left.shape
    n2, d2, _ = right.shape
    prod = np.einsum("aij,bkl->abikjl", left, right)
    return prod.reshape(n1 * n2, d1 * d2, d1 * d2)


# ---------------------------------------------------------------------------
# vec / Choi / Liouville
# ---------------------------------------------------------------------------


def vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(-1)


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.asarray(v).reshape(rows, cols)


def liouville_from_choi(choi: np.ndarray, din: int, dout: int) -> np.ndarray:
    """J[(i,k),(j,l)] = M(E_ij)[k,l]  ->  N[(k,l),(i,j)]."""
    j4 = np.asarray(choi).reshape(din, dout, din, dout)
    return j4.transpose(1, 3, 0, 2).reshape(dout * dout, din * din)


def choi_from_liouville(lio: np.ndarray, din: int, dout: int) -> np.ndarray:
    n4 = np.asarray(lio).reshape(dout, dout, din, din)
    return n4.transpose(2, 0, 3, 1).reshape(din * dout, din * dout)


def kraus_to_choi(kraus: list[np.ndarray] | np.ndarray) -> np.ndarray:
    ks = [np.asarray(k) for k in kraus]
    dout, din = ks[0].shape
    j = np.zeros((din * dout, din * dout), dtype=complex)
    for k in ks:
        w = vec(k.T)
        j += np.outer(w, w.conj())
    return j


def kraus_to_liouville(kraus: list[np.ndarray] | np.ndarray) -> np.ndarray:
    ks = [np.asarray(k) for k in kraus]
    dout, din = ks[0].shape
    n = np.zeros((dout * dout, din * din), dtype=complex)
    for k in ks:
        n += np.kron(k, k.conj())
    return n


def choi_to_kraus(choi: np.ndarray, din: int, dout: int, rel_cutoff: float = RANK_CUTOFF) -> list[np.ndarray]:
    """Canonical Kraus family from the spectral decomposition of the Choi matrix.

    Eigenvalues sorted descending; eigenvector phases canonical; eigenvalues
    below ``rel_cutoff`` times the largest are dropped.  The family size is
    therefore the Choi rank.
    """
    vals, vecs = sorted_eigh(np.asarray(choi))
    rank = rank_with_cutoff(vals, rel_cutoff)
    out = []
    for i in range(rank):
        out.append(np.sqrt(vals[i]) * vecs[:, i].reshape(din, dout).T)
    if not out:
        out.append(np.zeros((dout, din), dtype=complex))
    return out


def apply_liouville(lio: np.ndarray, x: np.ndarray, din: int, dout: int) -> np.ndarray:
    return unvec(lio @ vec(np.asarray(x)), dout, dout)


def liouville_kron(
    n1: np.ndarray, n2: np.ndarray, din1: int, dout1: int, din2: int, dout2: int
) -> np.ndarray:
    """Process matrix of a side-by-side pair, left factor's indices slowest.

    A plain Kronecker of process matrices interleaves row/column index pairs;
    this reorders them to the composite convention, so the result acts on
    ``vec`` of matrices over the tensor-product space.
    """
    big = np.kron(n1, n2)
    big = big.reshape(dout1, dout1, dout2, dout2, din1, din1, din2, din2)
    big = big.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    dout = dout1 * dout2
    din = din1 * din2
    return big.reshape(dout * dout, din * din)


# ---------------------------------------------------------------------------
# wire plumbing
# ---------------------------------------------------------------------------


def swap_unitary(d1: int, d2: int) -> np.ndarray:
    """Permutation matrix sending |a>|b> to |b>|a>, shape (d2*d1, d1*d2)."""
    s = np.zeros((d2 * d1, d1 * d2))
    for a in range(d1):
        for b in range(d2):
            s[b * d1 + a, a * d2 + b] = 1.0
    return s


def block_swap_permutation(n1: int, n2: int) -> np.ndarray:
    """Index permutation exchanging the two blocks of a flattened pair index.

    Maps coordinate index (alpha, beta) with alpha slowest to (beta, alpha);
    as a matrix it is the commutation permutation, entries 0/1 exactly.
    """
    src = np.arange(n1 * n2).reshape(n1, n2).T.reshape(-1)
    p = np.zeros((n1 * n2, n1 * n2))
    p[np.arange(n1 * n2), src] = 1.0
    return p


def partial_trace(rho: np.ndarray, dims: list[int], keep: list[int]) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep`` (indices in word order)."""
    k = len(dims)
    keep = sorted(keep)
    t = np.asarray(rho).reshape(list(dims) * 2)
    # row axis i gets subscript i; column axis i reuses subscript i when traced
    in_subs = list(range(k)) + [i + k if i in keep else i for i in range(k)]
    out_subs = list(keep) + [i + k for i in keep]
    result = np.einsum(t, in_subs, out_subs)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return result.reshape(d, d)


# ---------------------------------------------------------------------------
# canonical decompositions
# ---------------------------------------------------------------------------


def sorted_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition, eigenvalues descending, phases canonical."""
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    for i in range(vecs.shape[1]):
        vecs[:, i] = canonical_phase(vecs[:, i])
    return vals, vecs


def rank_with_cutoff(eigvals: np.ndarray, rel_cutoff: float = RANK_CUTOFF) -> int:
    top = float(np.max(eigvals, initial=0.0))
    if top <= 0.0:
        return 0
    return int(np.sum(eigvals > rel_cutoff * top))


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase so its first sizable entry is real positive."""
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return v
    idx = np.flatnonzero(np.abs(v) > 1e-12 * norm)
    if idx.size == 0:
        return v
    pivot = v[idx[0]]
    return v * (np.abs(pivot) / pivot)


def complete_to_unitary(columns: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns (d x r) to a d x d unitary, deterministically.

    Candidates are the canonical basis vectors in order; each is projected
    against the columns gathered so far and kept when enough survives.
    """
    d, r = columns.shape
    cols = [columns[:, i] for i in range(r)]
    for j in range(d):
        if len(cols) == d:
            break
        cand = np.zeros(d, dtype=columns.dtype)
        cand[j] = 1.0
        for c in cols:
            cand = cand - c * (np.conj(c) @ cand)
        nrm = np.linalg.norm(cand)
        if nrm > 1e-6:
            cols.append(canonical_phase(cand / nrm))
    if len(cols) != d:
        raise np.linalg.LinAlgError("could not complete columns to a unitary")
    return np.stack(cols, axis=1)


def procrustes_unitary(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unitary W minimizing ||W a - b||_F, via the polar factor of b a^dagger."""
    p, _, qh = np.linalg.svd(b @ a.conj().T)
    return p @ qh
