"""Exact integer linear algebra: Smith/Hermite normal forms, kernels,
cokernels and lattice membership.

Everything runs on Python ints, so no entry can overflow.  Matrices are
small (a few hundred rows at most) and sparse, so the routines work on
dense row lists but skip zero entries wherever that is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

Vector = Tuple[int, ...]


# ---------------------------------------------------------------------------
#  Cardinals and abelian groups
# ---------------------------------------------------------------------------

class Cardinal:
    """A finite cardinal or the countably infinite one (aleph-0)."""

    __slots__ = ("_n",)

    def __init__(self, n: Optional[int]):
        if n is not None:
            n = int(n)
            if n < 0:
                raise ValueError("cardinal must be non-negative")
        self._n = n

    @classmethod
    def of(cls, value: "Cardinal | int") -> "Cardinal":
        return value if isinstance(value, Cardinal) else cls(value)

    @property
    def is_finite(self) -> bool:
        return self._n is not None

    @property
    def value(self) -> Optional[int]:
        """The finite value, or None for aleph-0."""
        return self._n

    def __int__(self) -> int:
        if self._n is None:
            raise OverflowError("countably infinite cardinal has no int value")
        return self._n

    def __add__(self, other: "Cardinal | int") -> "Cardinal":
        other = Cardinal.of(other)
        if self._n is None or other._n is None:
            return ALEPH_0
        return Cardinal(self._n + other._n)

    __radd__ = __add__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self._n == other
        if isinstance(other, Cardinal):
            return self._n == other._n
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("Cardinal", self._n))

    def __lt__(self, other: "Cardinal | int") -> bool:
        other = Cardinal.of(other)
        if self._n is None:
            return False
        return other._n is None or self._n < other._n

    def __le__(self, other: "Cardinal | int") -> bool:
        return self == other or self < other

    def __repr__(self) -> str:
        return "ALEPH_0" if self._n is None else f"Cardinal({self._n})"

    def __str__(self) -> str:
        return "countable" if self._n is None else str(self._n)


ALEPH_0 = Cardinal(None)


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank (+) Z/d1 (+) ... (+) Z/dk with d1 | d2 | ... | dk, all di >= 2.

    The invariant factors are a normal form, so structural equality is
    group isomorphism.
    """

    free_rank: Cardinal
    invariant_factors: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "free_rank", Cardinal.of(self.free_rank))
        factors = tuple(int(d) for d in self.invariant_factors)
        for d in factors:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise ValueError(f"invariant factors {factors} do not form a divisor chain")
        object.__setattr__(self, "invariant_factors", factors)

    @classmethod
    def free(cls, rank: "Cardinal | int") -> "AbelianGroup":
        return cls(Cardinal.of(rank))

    @classmethod
    def from_orders(cls, free_rank: "Cardinal | int", orders: Iterable[int]) -> "AbelianGroup":
        """Normalise a direct sum of cyclic groups Z/n (n = 0 means Z)."""
        orders = [abs(int(n)) for n in orders]
        free = Cardinal.of(free_rank) + sum(1 for n in orders if n == 0)
        finite = [n for n in orders if n > 1]
        if not finite:
            return cls(free)
        size = len(finite)
        diag = [[finite[i] if i == j else 0 for j in range(size)] for i in range(size)]
        factors = [d for d in _smith(diag, False, False).diagonal if d > 1]
        return cls(free, tuple(factors))

    def __add__(self, other: "AbelianGroup") -> "AbelianGroup":
        return AbelianGroup.from_orders(
            self.free_rank + other.free_rank, self.invariant_factors + other.invariant_factors
        )

    @property
    def is_free(self) -> bool:
        return not self.invariant_factors

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif not self.free_rank.is_finite:
            parts.append("Z^(N)")
        elif self.free_rank != 0:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " (+) ".join(parts) if parts else "0"

    def to_json(self, torsion: bool = True) -> dict:
        free = self.free_rank.value if self.free_rank.is_finite else "countable"
        out: dict = {"free": free}
        if torsion:
            out["torsion"] = list(self.invariant_factors)
        return out


# ---------------------------------------------------------------------------
#  Sparse matrices with labelled rows and columns
# ---------------------------------------------------------------------------

class SparseIntMatrix:
    """Integer matrix indexed by arbitrary hashable row/column labels.

    Zero entries are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("rows", "cols", "_entries", "_row_pos", "_col_pos")

    def __init__(self, rows: Iterable[Hashable], cols: Iterable[Hashable],
                 entries: Mapping[Tuple[Hashable, Hashable], int] = ()):
        self.rows = tuple(rows)
        self.cols = tuple(cols)
        self._row_pos = {r: i for i, r in enumerate(self.rows)}
        self._col_pos = {c: j for j, c in enumerate(self.cols)}
        if len(self._row_pos) != len(self.rows) or len(self._col_pos) != len(self.cols):
            raise ValueError("duplicate row or column label")
        clean: Dict[Tuple[Hashable, Hashable], int] = {}
        for (r, c), v in dict(entries).items():
            if r not in self._row_pos or c not in self._col_pos:
                raise KeyError(f"entry ({r!r}, {c!r}) outside the index sets")
            v = int(v)
            if v:
                clean[(r, c)] = v
        self._entries = clean

    @classmethod
    def from_dense(cls, rows: Sequence[Hashable], cols: Sequence[Hashable],
                   data: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        entries = {}
        for i, r in enumerate(rows):
            for j, c in enumerate(cols):
                if data[i][j]:
                    entries[(r, c)] = data[i][j]
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, index: Sequence[Hashable]) -> "SparseIntMatrix":
        return cls(index, index, {(k, k): 1 for k in index})

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.cols)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()

    def __getitem__(self, key: Tuple[Hashable, Hashable]) -> int:
        r, c = key
        if r not in self._row_pos or c not in self._col_pos:
            raise KeyError(key)
        return self._entries.get(key, 0)

    def column(self, c: Hashable) -> Dict[Hashable, int]:
        return {r: v for (r, cc), v in self._entries.items() if cc == c}

    def to_dense(self) -> List[List[int]]:
        out = [[0] * len(self.cols) for _ in self.rows]
        for (r, c), v in self._entries.items():
            out[self._row_pos[r]][self._col_pos[c]] = v
        return out

    def columns_dense(self) -> List[List[int]]:
        """Columns as dense vectors in row order."""
        out = [[0] * len(self.rows) for _ in self.cols]
        for (r, c), v in self._entries.items():
            out[self._col_pos[c]][self._row_pos[r]] = v
        return out

    def matvec(self, vec: Mapping[Hashable, int]) -> Dict[Hashable, int]:
        out: Dict[Hashable, int] = {}
        for (r, c), v in self._entries.items():
            x = vec.get(c, 0)
            if x:
                out[r] = out.get(r, 0) + v * x
        return {r: v for r, v in out.items() if v}

    def permuted(self, rows: Sequence[Hashable], cols: Sequence[Hashable]) -> "SparseIntMatrix":
        if set(rows) != set(self.rows) or set(cols) != set(self.cols):
            raise ValueError("permutation must use the same index sets")
        return SparseIntMatrix(rows, cols, self._entries)

    def __sub__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if set(self.rows) != set(other.rows) or set(self.cols) != set(other.cols):
            raise ValueError("index sets differ")
        entries = dict(self._entries)
        for k, v in other._entries.items():
            entries[k] = entries.get(k, 0) - v
        return SparseIntMatrix(self.rows, self.cols, entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (set(self.rows) == set(other.rows) and set(self.cols) == set(other.cols)
                and self._entries == other._entries)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SparseIntMatrix(shape={self.shape}, nnz={self.nnz})"


def _as_dense(M) -> List[List[int]]:
    if isinstance(M, SparseIntMatrix):
        return M.to_dense()
    return [[int(x) for x in row] for row in M]


def _shape(M) -> Tuple[int, int]:
    if isinstance(M, SparseIntMatrix):
        return M.shape
    rows = len(M)
    return rows, (len(M[0]) if rows else 0)


# ---------------------------------------------------------------------------
#  Smith normal form
# ---------------------------------------------------------------------------

class _SmithResult(NamedTuple):
    diagonal: List[int]
    U: Optional[List[List[int]]]
    V: Optional[List[List[int]]]
    D: List[List[int]]


class SmithForm(NamedTuple):
    """U * M * V = D with U, V unimodular and D diagonal (d1 | d2 | ...)."""

    U: List[List[int]]
    D: List[List[int]]
    V: List[List[int]]

    @property
    def diagonal(self) -> List[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def _identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _smith(A: List[List[int]], want_u: bool, want_v: bool) -> _SmithResult:
    """Diagonalise A in place by unimodular row/column operations.

    Pivot choice: the nonzero entry of least magnitude in the trailing
    block, ties broken by (row, col) order.  Row ops are mirrored on U,
    column ops on V.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m) if want_u else None
    V = _identity(n) if want_v else None

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        if U is not None:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        if V is not None:
            for row in V:
                row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):
        # row[dst] -= q * row[src]
        rs = A[src]
        A[dst] = [a - q * b for a, b in zip(A[dst], rs)] if q else A[dst]
        if U is not None and q:
            us = U[src]
            U[dst] = [a - q * b for a, b in zip(U[dst], us)]

    def add_col(dst, src, q):
        # col[dst] -= q * col[src]
        for row in A:
            b = row[src]
            if b:
                row[dst] -= q * b
        if V is not None:
            for row in V:
                b = row[src]
                if b:
                    row[dst] -= q * b

    def find_pivot(t):
        best = None
        best_abs = 0
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                a = row[j]
                if a:
                    aa = a if a > 0 else -a
                    if best is None or aa < best_abs:
                        best, best_abs = (i, j), aa
                        if aa == 1:
                            return best
        return best

    t = 0
    while t < min(m, n):
        piv = find_pivot(t)
        if piv is None:
            break
        i, j = piv
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                a = A[i][t]
                if a:
                    add_row(i, t, a // p)
                    if A[i][t]:
                        dirty = True
            row_t = A[t]
            for j in range(t + 1, n):
                a = row_t[j]
                if a:
                    add_col(j, t, a // p)
                    if A[t][j]:
                        dirty = True
            if dirty:
                # a remainder smaller than the pivot survived; move it to (t, t)
                best = None
                for i in range(t + 1, m):
                    a = A[i][t]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, None)
                for j in range(t + 1, n):
                    a = A[t][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), None, j)
                _, bi, bj = best
                if bi is not None:
                    swap_rows(bi, t)
                else:
                    swap_cols(bj, t)
                continue
            p = A[t][t]
            if p not in (1, -1):
                bad = None
                for i in range(t + 1, m):
                    row = A[i]
                    for j in range(t + 1, n):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is not None:
                    add_row(t, bad, -1)
                    continue
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            if U is not None:
                U[t] = [-a for a in U[t]]
        t += 1

    diagonal = [A[k][k] for k in range(min(m, n))]
    return _SmithResult(diagonal, U, V, A)


def _matmul(X: List[List[int]], Y: List[List[int]]) -> List[List[int]]:
    cols = len(Y[0]) if Y else 0
    out = []
    for row in X:
        acc = [0] * cols
        for k, a in enumerate(row):
            if a:
                yk = Y[k]
                for j in range(cols):
                    b = yk[j]
                    if b:
                        acc[j] += a * b
        out.append(acc)
    return out


def smith_normal_form(M, verify: bool = True) -> SmithForm:
    """Smith normal form of an integer matrix.

    Returns ``(U, D, V)`` with ``U @ M @ V == D``.  With ``verify`` the
    identity is re-checked by exact multiplication before returning.
    """
    A = _as_dense(M)
    res = _smith([row[:] for row in A], True, True)
    form = SmithForm(res.U, res.D, res.V)
    if verify:
        m, n = _shape(M)
        if m and n and _matmul(_matmul(res.U, A), res.V) != res.D:
            raise ArithmeticError("Smith normal form failed re-multiplication check")
        diag = form.diagonal
        for a, b in zip(diag, diag[1:]):
            if (a == 0 and b != 0) or (a and b % a):
                raise ArithmeticError(f"diagonal {diag} is not a divisor chain")
    return form


def invariant_diagonal(M) -> List[int]:
    """Smith diagonal without computing the transforms."""
    return _smith(_as_dense(M), False, False).diagonal


def rank(M) -> int:
    return sum(1 for d in invariant_diagonal(M) if d)


def kernel_basis(M) -> List[Vector]:
    """Basis of the integer kernel lattice {v in Z^cols : M v = 0}.

    Taken from the columns of V beyond the rank, so the basis spans the
    full (saturated) kernel lattice.
    """
    m, n = _shape(M)
    if n == 0:
        return []
    if m == 0:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    res = _smith(_as_dense(M), False, True)
    r = sum(1 for d in res.diagonal if d)
    V = res.V
    return [tuple(V[i][j] for i in range(n)) for j in range(r, n)]


def cokernel(M) -> AbelianGroup:
    """Z^rows / M Z^cols as an abelian group in invariant-factor form."""
    m, n = _shape(M)
    if m == 0:
        return AbelianGroup.free(0)
    if n == 0:
        return AbelianGroup.free(m)
    diag = invariant_diagonal(M)
    r = sum(1 for d in diag if d)
    return AbelianGroup(m - r, tuple(d for d in diag if d > 1))


# ---------------------------------------------------------------------------
#  Hermite normal form and lattices
# ---------------------------------------------------------------------------

def _check_dims(vectors: Sequence[Sequence[int]], dim: Optional[int]) -> int:
    for v in vectors:
        if dim is None:
            dim = len(v)
        elif len(v) != dim:
            raise ValueError(f"dimension mismatch: {len(v)} != {dim}")
    return dim or 0


def hermite_basis(vectors: Iterable[Sequence[int]], dim: Optional[int] = None) -> List[Vector]:
    """Row-style Hermite normal form of the lattice spanned by ``vectors``.

    Rows are in echelon form with positive pivots, entries above each pivot
    reduced into [0, pivot).  Zero rows are dropped.
    """
    rows = [list(map(int, v)) for v in vectors]
    dim = _check_dims(rows, dim)
    rows = [r for r in rows if any(r)]
    r = 0
    for col in range(dim):
        if r == len(rows):
            break
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(rows[i][col]), i))
            if piv != r:
                rows[r], rows[piv] = rows[piv], rows[r]
            p = rows[r][col]
            done = True
            pr = rows[r]
            for i in range(r + 1, len(rows)):
                a = rows[i][col]
                if a:
                    q = a // p
                    rows[i] = [x - q * y for x, y in zip(rows[i], pr)]
                    if rows[i][col]:
                        done = False
            if done:
                break
        if r < len(rows) and rows[r][col]:
            if rows[r][col] < 0:
                rows[r] = [-x for x in rows[r]]
            p = rows[r][col]
            pr = rows[r]
            for i in range(r):
                q = rows[i][col] // p
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], pr)]
            r += 1
            rows = rows[:r] + [row for row in rows[r:] if any(row)]
    return [tuple(row) for row in rows[:r]]


def _pivot(row: Sequence[int]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    raise ValueError("zero row")


def _reduce_by(hnf: Sequence[Vector], v: Sequence[int]) -> Optional[List[int]]:
    """Reduce v by an echelon basis; None if v is provably not in the lattice."""
    v = list(v)
    for h in hnf:
        c = _pivot(h)
        for j in range(c):
            if v[j]:
                return None
        a = v[c]
        if a:
            q, rem = divmod(a, h[c])
            if rem:
                return None
            v = [x - q * y for x, y in zip(v, h)]
    return v


def lattice_membership(v: Sequence[int], basis: Sequence[Sequence[int]]) -> bool:
    """Is v an integer combination of the basis vectors?"""
    dim = len(v)
    _check_dims(basis, dim)
    return _contains(hermite_basis(basis, dim), v)


def _contains(hnf: Sequence[Vector], v: Sequence[int]) -> bool:
    rest = _reduce_by(hnf, v)
    return rest is not None and not any(rest)


def lattice_contains(basis: Sequence[Sequence[int]], vectors: Iterable[Sequence[int]],
                     dim: Optional[int] = None) -> bool:
    """Every vector of ``vectors`` lies in span_Z(basis)."""
    vectors = list(vectors)
    dim = _check_dims(list(basis) + vectors, dim)
    hnf = hermite_basis(basis, dim)
    return all(_contains(hnf, v) for v in vectors)


def lattice_equal(basis_a: Sequence[Sequence[int]], basis_b: Sequence[Sequence[int]],
                  dim: Optional[int] = None) -> bool:
    """Mutual containment of two integer lattices."""
    dim = _check_dims(list(basis_a) + list(basis_b), dim)
    return hermite_basis(basis_a, dim) == hermite_basis(basis_b, dim)


def coordinate_intersection(basis: Sequence[Sequence[int]], coords: Iterable[int],
                            dim: Optional[int] = None) -> List[Vector]:
    """Basis of L ∩ span(e_c : c in coords).

    Orders the complementary coordinates first; the echelon rows whose pivot
    falls among ``coords`` then vanish on every other coordinate and span the
    intersection.
    """
    dim = _check_dims(basis, dim)
    coords = sorted(set(coords))
    keep = set(coords)
    order = [j for j in range(dim) if j not in keep] + coords
    permuted = [[v[j] for j in order] for v in basis]
    hnf = hermite_basis(permuted, dim)
    cut = dim - len(coords)
    out = []
    for h in hnf:
        if _pivot(h) >= cut:
            back = [0] * dim
            for pos, j in enumerate(order):
                back[j] = h[pos]
            out.append(tuple(back))
    return out
