"""Exact dense linear algebra over Q, F_p and Z.

Matrices wrap a 2-D numpy array.  Over F_p with small ``p`` the array is
``int64`` (products of two residues fit comfortably); otherwise entries are
Python ``int``/``Fraction`` objects in an ``object`` array.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, RingMismatch

_SMALL_P = 46340  # p * p < 2**31, so int64 sums of products never overflow


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class CoefficientRing:
    kind: str  # "Q", "Fp" or "Z"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Q", "Fp", "Z"):
            raise InputError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Fp" and not (is_prime(self.p) and self.p < 2**31):
            raise InputError(f"{self.p} is not a prime below 2^31")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "Fp" else 0

    @property
    def dtype(self):
        return np.int64 if self.kind == "Fp" and self.p <= _SMALL_P else object

    def __str__(self) -> str:
        return {"Q": "Q", "Z": "Z"}.get(self.kind) or f"F{self.p}"

    def spec(self) -> str:
        return {"Q": "q", "Z": "z"}.get(self.kind) or f"fp:{self.p}"

    def scalar(self, x):
        if self.kind == "Fp":
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        if self.kind == "Z":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise RingMismatch(f"{x} is not an integer")
                return int(x.numerator)
            return int(x)
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        return int(x)

    def inverse(self, x):
        if self.kind == "Fp":
            return pow(int(x), -1, self.p)
        if self.kind == "Q":
            return Fraction(1) / x
        if x in (1, -1):
            return int(x)
        raise RingMismatch(f"{x} is not a unit in Z")


QQ = CoefficientRing("Q")
ZZ = CoefficientRing("Z")


def GF(p: int) -> CoefficientRing:
    return CoefficientRing("Fp", p)


def parse_ring(text: str) -> CoefficientRing:
    """``q``, ``z`` or ``fp:P``."""
    t = text.strip().lower()
    if t in ("q", "qq", "rationals"):
        return QQ
    if t in ("z", "zz", "integers"):
        return ZZ
    if t.startswith("fp:"):
        try:
            return GF(int(t[3:]))
        except ValueError:
            raise InputError(f"bad prime in ring {text!r}") from None
    raise InputError(f"unknown ring {text!r} (use q, z or fp:P)")


def _normalize(ring: CoefficientRing, data) -> np.ndarray:
    arr = np.array(data, dtype=object)
    if arr.ndim != 2:
        if arr.size == 0:
            arr = arr.reshape(0, 0)
        else:
            raise InputError("matrix data must be two dimensional")
    vec = np.frompyfunc(ring.scalar, 1, 1)
    out = vec(arr) if arr.size else arr
    out = np.asarray(out, dtype=object).reshape(arr.shape)
    if ring.dtype is np.int64:
        return out.astype(np.int64)
    return out


class ExactMatrix:
    __slots__ = ("ring", "a")

    def __init__(self, ring: CoefficientRing, data, _trusted: bool = False):
        self.ring = ring
        if _trusted:
            self.a = data
        else:
            self.a = _normalize(ring, data)

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, ring: CoefficientRing, rows: int, cols: int) -> "ExactMatrix":
        a = np.zeros((rows, cols), dtype=ring.dtype)
        if ring.dtype is object:
            a[...] = 0
        return cls(ring, a, _trusted=True)

    @classmethod
    def identity(cls, ring: CoefficientRing, n: int) -> "ExactMatrix":
        m = cls.zeros(ring, n, n)
        for i in range(n):
            m.a[i, i] = 1
        return m

    @classmethod
    def column(cls, ring: CoefficientRing, values: Sequence) -> "ExactMatrix":
        return cls(ring, np.array(list(values), dtype=object).reshape(-1, 1))

    def _wrap(self, a: np.ndarray) -> "ExactMatrix":
        if self.ring.kind == "Fp":
            a = a % self.ring.p
            if self.ring.dtype is np.int64:
                a = a.astype(np.int64)
        return ExactMatrix(self.ring, a, _trusted=True)

    def _check(self, other: "ExactMatrix"):
        if not isinstance(other, ExactMatrix):
            raise TypeError("expected an ExactMatrix")
        if other.ring != self.ring:
            raise RingMismatch(f"ring mismatch: {self.ring} vs {other.ring}")

    # shape ------------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    # arithmetic -------------------------------------------------------------
    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.rows == 0 or other.cols == 0 or self.cols == 0:
            return ExactMatrix.zeros(self.ring, self.rows, other.cols)
        return self._wrap(self.a.dot(other.a))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} + {other.shape}")
        return self._wrap(self.a + other.a)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} - {other.shape}")
        return self._wrap(self.a - other.a)

    def __neg__(self) -> "ExactMatrix":
        return self._wrap(-self.a)

    def scale(self, k) -> "ExactMatrix":
        return self._wrap(self.a * self.ring.scalar(k))

    __rmul__ = scale

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, self.a.T.copy(), _trusted=True)

    def __getitem__(self, key) -> "ExactMatrix":
        sub = self.a[key]
        if sub.ndim != 2:
            raise IndexError("use 2-D slices; read scalars with .entry()")
        return ExactMatrix(self.ring, sub.copy(), _trusted=True)

    def entry(self, i: int, j: int):
        return self.a[i, j]

    def column_vector(self, j: int) -> "ExactMatrix":
        return self[:, j:j + 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.ring == other.ring and self.shape == other.shape and bool(np.all(self.a == other.a))

    __hash__ = None

    def is_zero(self) -> bool:
        return self.a.size == 0 or not bool(np.any(self.a != 0))

    def tolist(self) -> list[list]:
        return [[_plain(x) for x in row] for row in self.a.tolist()]

    def __repr__(self) -> str:
        return f"ExactMatrix({self.ring}, {self.tolist()})"

    def change_ring(self, ring: CoefficientRing) -> "ExactMatrix":
        """Reduce an integer (or integral rational) matrix into another ring."""
        return ExactMatrix(ring, self.a.astype(object))

    # linear algebra ---------------------------------------------------------
    def rank(self) -> int:
        return rank(self)

    def kernel(self) -> "ExactMatrix":
        return kernel_basis(self)


def _plain(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x.numerator)
    return int(x)


def hstack(mats: Sequence[ExactMatrix], ring: CoefficientRing | None = None, rows: int | None = None) -> ExactMatrix:
    mats = list(mats)
    if not mats:
        return ExactMatrix.zeros(ring, rows or 0, 0)
    r = mats[0].ring
    return ExactMatrix(r, np.concatenate([m.a for m in mats], axis=1), _trusted=True)


def vstack(mats: Sequence[ExactMatrix], ring: CoefficientRing | None = None, cols: int | None = None) -> ExactMatrix:
    mats = list(mats)
    if not mats:
        return ExactMatrix.zeros(ring, 0, cols or 0)
    r = mats[0].ring
    return ExactMatrix(r, np.concatenate([m.a for m in mats], axis=0), _trusted=True)


def kron(x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
    x._check(y)
    return x._wrap(np.kron(x.a, y.a))


def block_matrix(ring: CoefficientRing, blocks: dict[tuple[int, int], np.ndarray], row_sizes: Sequence[int],
                 col_sizes: Sequence[int]) -> ExactMatrix:
    """Assemble from raw sub-arrays keyed by block position (missing blocks are zero)."""
    ro = np.concatenate([[0], np.cumsum(row_sizes)]).astype(int)
    co = np.concatenate([[0], np.cumsum(col_sizes)]).astype(int)
    m = ExactMatrix.zeros(ring, int(ro[-1]), int(co[-1]))
    for (i, j), b in blocks.items():
        m.a[ro[i]:ro[i + 1], co[j]:co[j + 1]] += b
    return m._wrap(m.a)


# --------------------------------------------------------------------------
# elimination over a field


def _require_field(ring: CoefficientRing, what: str):
    if not ring.is_field:
        raise RingMismatch(f"{what} needs a field; use the Smith normal form path over Z")


def _eliminate(a: np.ndarray, ring: CoefficientRing, full: bool) -> tuple[np.ndarray, list[int]]:
    """Row reduce a copy of ``a``; leftmost-column, topmost-row pivots."""
    a = a.copy()
    m, n = a.shape
    p = ring.p if ring.kind == "Fp" else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c] != 0)
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = a[r, c]
        if lead != 1:
            inv = ring.inverse(lead)
            a[r, c:] = a[r, c:] * inv
            if p:
                a[r, c:] %= p
        if full:
            rows = np.flatnonzero(a[:, c] != 0)
            rows = rows[rows != r]
        else:
            rows = r + 1 + np.flatnonzero(a[r + 1:, c] != 0)
        if rows.size:
            f = a[rows, c].copy()
            a[np.ix_(rows, np.arange(c, n))] -= np.outer(f, a[r, c:])
            if p:
                a[np.ix_(rows, np.arange(c, n))] %= p
        pivots.append(c)
        r += 1
    return a, pivots


def rref(A: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    _require_field(A.ring, "rref")
    a, piv = _eliminate(A.a, A.ring, full=True)
    return ExactMatrix(A.ring, a, _trusted=True), piv


def rank(A: ExactMatrix) -> int:
    if A.a.size == 0:
        return 0
    if not A.ring.is_field:
        return len([d for d in smith_normal_form(A).diagonal if d])
    if A.rows > A.cols:
        return len(_eliminate(A.a.T.copy(), A.ring, full=False)[1])
    return len(_eliminate(A.a, A.ring, full=False)[1])


def kernel_basis(A: ExactMatrix) -> ExactMatrix:
    """Columns form the reduced-echelon basis of the null space of ``A``."""
    _require_field(A.ring, "kernel_basis")
    n = A.cols
    if A.rows == 0:
        return ExactMatrix.identity(A.ring, n)
    r, piv = _eliminate(A.a, A.ring, full=True)
    free = [c for c in range(n) if c not in set(piv)]
    out = ExactMatrix.zeros(A.ring, n, len(free))
    for k, f in enumerate(free):
        out.a[f, k] = 1
        for i, c in enumerate(piv):
            out.a[c, k] = -r[i, f]
    return out._wrap(out.a)


def column_space_basis(A: ExactMatrix) -> ExactMatrix:
    """The pivot columns of ``A`` (a basis of its column space)."""
    _require_field(A.ring, "column_space_basis")
    if A.cols == 0 or A.rows == 0:
        return ExactMatrix.zeros(A.ring, A.rows, 0)
    _, piv = _eliminate(A.a, A.ring, full=False)
    return A[:, piv] if piv else ExactMatrix.zeros(A.ring, A.rows, 0)


def solve(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix | None:
    """Some ``X`` with ``A @ X == B``, or ``None`` when infeasible.

    Over Z the system is solved through the Smith normal form.
    """
    A._check(B)
    if A.rows != B.rows:
        raise InputError(f"shape mismatch: A is {A.shape}, B is {B.shape}")
    if not A.ring.is_field:
        return _solve_integer(A, B)
    n = A.cols
    if A.rows == 0:
        return ExactMatrix.zeros(A.ring, n, B.cols)
    aug = np.concatenate([A.a, B.a], axis=1)
    r, piv = _eliminate(aug, A.ring, full=True)
    if piv and piv[-1] >= n:
        return None
    X = ExactMatrix.zeros(A.ring, n, B.cols)
    for i, c in enumerate(piv):
        X.a[c, :] = r[i, n:]
    return X._wrap(X.a)


def subquotient_dim(Z: ExactMatrix, B: ExactMatrix) -> tuple[int, ExactMatrix]:
    """``dim span(Z) - dim span(B)`` and columns of ``Z`` completing ``B`` to ``span(Z)``."""
    _require_field(Z.ring, "subquotient_dim")
    if Z.rows != B.rows:
        raise InputError("subspaces live in different ambient spaces")
    rz = rank(Z)
    if B.cols:
        if rank(hstack([Z, B])) != rz:
            raise InputError("B is not contained in Z")
        both = hstack([B, Z])
    else:
        both = Z
    if both.cols == 0 or both.rows == 0:
        return 0, ExactMatrix.zeros(Z.ring, Z.rows, 0)
    _, piv = _eliminate(both.a, both.ring, full=False)
    nb = B.cols
    reps = [c - nb for c in piv if c >= nb]
    rb = len(piv) - len(reps)
    reps_m = Z[:, reps] if reps else ExactMatrix.zeros(Z.ring, Z.rows, 0)
    return rz - rb, reps_m


def inverse(A: ExactMatrix) -> ExactMatrix:
    """Inverse over a field, or of a unimodular integer matrix."""
    if A.rows != A.cols:
        raise InputError("only square matrices are invertible")
    if A.ring.is_field:
        X = solve(A, ExactMatrix.identity(A.ring, A.rows))
        if X is None or rank(A) != A.rows:
            raise InputError("matrix is singular")
        return X
    snf = smith_normal_form(A)
    if any(d != 1 for d in snf.diagonal):
        raise InputError("integer matrix is not unimodular")
    # A = U^-1 V^-1  =>  A^-1 = V U
    return snf.V @ snf.U


def determinant(A: ExactMatrix):
    """Exact determinant (fraction-free Bareiss elimination over Z and Q)."""
    if A.rows != A.cols:
        raise InputError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    if A.ring.kind == "Fp":
        return _det_fp(A)
    m = [[x for x in row] for row in A.a.tolist()]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        mk = m[k]
        pivot = mk[k]
        for i in range(k + 1, n):
            mi = m[i]
            f = mi[k]
            for j in range(k + 1, n):
                v = mi[j] * pivot - f * mk[j]
                mi[j] = v // prev if A.ring.kind == "Z" else v / prev
            mi[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def _det_fp(A: ExactMatrix) -> int:
    p = A.ring.p
    a = A.a.astype(object).copy()
    n = A.rows
    det = 1
    for c in range(n):
        nz = [i for i in range(c, n) if a[i, c] % p]
        if not nz:
            return 0
        i = nz[0]
        if i != c:
            a[[c, i]] = a[[i, c]]
            det = -det
        det = det * a[c, c] % p
        inv = pow(int(a[c, c]), -1, p)
        for i in range(c + 1, n):
            if a[i, c] % p:
                a[i, c:] = (a[i, c:] - a[i, c] * inv * a[c, c:]) % p
    return det % p


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: ExactMatrix
    D: ExactMatrix
    V: ExactMatrix
    diagonal: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d]


def smith_normal_form(A: ExactMatrix) -> SnfDecomposition:
    """Smallest-absolute-value pivoting with row/column reduction.

    Ties go to the first entry in row-major order, so the output is
    deterministic.
    """
    if A.ring.kind != "Z":
        raise RingMismatch("smith_normal_form needs an integer matrix")
    m, n = A.shape
    D = [[int(x) for x in row] for row in A.a.tolist()]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q, t):
        # row_dst += q * row_src
        rs, rd = D[src], D[dst]
        for k in range(t, n):
            if rs[k]:
                rd[k] += q * rs[k]
        us, ud = U[src], U[dst]
        for k in range(m):
            if us[k]:
                ud[k] += q * us[k]

    def add_col(dst, src, q, t):
        for r in range(t, m):
            row = D[r]
            if row[src]:
                row[dst] += q * row[src]
        for row in V:
            if row[src]:
                row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = D[i][t]
                if x:
                    q = x // p
                    if q:
                        add_row(i, t, -q, t)
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                x = D[t][j]
                if x:
                    q = x // p
                    if q:
                        add_col(j, t, -q, t)
                    if D[t][j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t + 1, m):
                    x = D[i][t]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, "r")
                for j in range(t + 1, n):
                    x = D[t][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), j, "c")
                if best[2] == "r":
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[1])
                continue
            bad = None
            for i in range(t + 1, m):
                row = D[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1, t)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    diag = tuple(D[k][k] for k in range(min(m, n)))
    return SnfDecomposition(
        ExactMatrix(ZZ, np.array(U, dtype=object).reshape(m, m), _trusted=True),
        ExactMatrix(ZZ, np.array(D, dtype=object).reshape(m, n), _trusted=True),
        ExactMatrix(ZZ, np.array(V, dtype=object).reshape(n, n), _trusted=True),
        diag,
    )


def _solve_integer(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix | None:
    m, n = A.shape
    snf = smith_normal_form(A)
    UB = snf.U @ B
    Y = ExactMatrix.zeros(ZZ, n, B.cols)
    for i in range(m):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        for j in range(B.cols):
            v = UB.a[i, j]
            if d == 0:
                if v != 0:
                    return None
            else:
                if v % d:
                    return None
                Y.a[i, j] = v // d
    return snf.V @ Y


def integer_kernel_basis(A: ExactMatrix) -> ExactMatrix:
    """A Z-basis of ``{x in Z^n : A x = 0}`` (the trailing columns of ``V``)."""
    snf = smith_normal_form(A)
    r = snf.rank
    return snf.V[:, r:]


def vectors_to_matrix(ring: CoefficientRing, vecs: Iterable[Sequence], length: int) -> ExactMatrix:
    vecs = [list(v) for v in vecs]
    if not vecs:
        return ExactMatrix.zeros(ring, length, 0)
    return ExactMatrix(ring, np.array(vecs, dtype=object).T.reshape(length, len(vecs)))
