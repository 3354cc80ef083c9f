"""Linear codes in poset metric spaces and their MacWilliams relations.

A code is stored through a row-reduced generator matrix together with the
full codeword list (p^k vectors).  The dual code is the kernel of the
generator under the standard dot product, which matches the character
convention used for the scheme eigenmatrices: with that pairing the dual
inner distribution of C is exactly the class census of the dual codewords
over the dual classes, and the two MacWilliams identities hold with the
scheme's Q and P.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import CapExceeded, DimensionMismatch, NonIntegralResult
from .isometry import check_prime, encode_vec
from .poset import support_ideal

DEFAULT_CODE_CAP = 1 << 20


def rref_mod(rows, p):
    """Row-reduced echelon form over F_p; returns (basis rows, pivot cols)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    width = len(rows[0])
    pivots = []
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(v - f * w) % p for v, w in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return [tuple(row) for row in rows[:r]], pivots


@dataclass(frozen=True)
class LinearCode:
    """A linear code over F_p, with its codewords enumerated."""

    p: int
    n: int
    gen: tuple       # RREF basis rows, possibly empty
    codewords: tuple  # all p^k codewords as tuples

    @property
    def k(self):
        return len(self.gen)

    def __len__(self):
        return len(self.codewords)


def build_code(p, gen, cap=DEFAULT_CODE_CAP):
    """Code spanned by the given generator rows (any rank, any redundancy)."""
    check_prime(p)
    gen = [tuple(int(v) % p for v in row) for row in gen]
    widths = {len(row) for row in gen}
    if len(widths) > 1:
        raise DimensionMismatch(f"rows of mixed lengths {sorted(widths)}")
    n = widths.pop() if widths else 0
    basis, _ = rref_mod(gen, p)
    k = len(basis)
    if p ** k > cap:
        raise CapExceeded("codeword enumeration", cap)
    words = []
    for coeffs in product(range(p), repeat=k):
        w = [0] * n
        for c, row in zip(coeffs, basis):
            if c:
                for i, v in enumerate(row):
                    w[i] = (w[i] + c * v) % p
        words.append(tuple(w))
    return LinearCode(p, n, tuple(basis), tuple(words))


def dual_code(C, cap=DEFAULT_CODE_CAP):
    """All vectors orthogonal to C under the standard dot product."""
    basis, pivots = rref_mod(C.gen, p := C.p) if C.gen else ([], [])
    n = C.n
    free = [c for c in range(n) if c not in pivots]
    rows = []
    for f in free:
        w = [0] * n
        w[f] = 1
        for r, c in enumerate(pivots):
            w[c] = (-basis[r][f]) % p
        rows.append(tuple(w))
    out = build_code(p, rows, cap)
    assert out.k == n - C.k
    return out


def weight_distribution(P, C):
    """Census of codewords by poset weight, length n+1."""
    dist = [0] * (P.n + 1)
    for w in C.codewords:
        dist[len(support_ideal(P, w))] += 1
    return tuple(dist)


def inner_distribution(C, S, side="primal"):
    """Class census of a code over a scheme's classes.

    ``side='primal'`` counts codewords per orbit class; ``side='dual_classes'``
    counts them per dual (character) class, which is the natural census for a
    dual code.
    """
    if side not in ("primal", "dual_classes"):
        raise ValueError(f"side must be 'primal' or 'dual_classes', got {side!r}")
    if C.p != S.p or C.n != S.n:
        raise DimensionMismatch(
            f"code over (p={C.p}, n={C.n}), scheme over (p={S.p}, n={S.n})")
    table = S.class_of if side == "primal" else S.dual_class_of
    dist = [0] * (S.s + 1)
    for w in C.codewords:
        dist[int(table[encode_vec(w, C.p)])] += 1
    return tuple(dist)


@dataclass(frozen=True)
class MacWilliamsReport:
    """Both MacWilliams identities evaluated exactly for one code."""

    a: tuple               # inner distribution of C over primal classes
    a_dual: tuple          # distribution of the dual code over dual classes
    transform_aQ: tuple    # (1/|C|) a Q
    transform_back: tuple  # (|C|/p^n) a' P
    forward_match: bool
    backward_match: bool

    @property
    def match(self):
        return self.forward_match and self.backward_match


def macwilliams_check(C, S):
    """Evaluate a' = (1/|C|) a Q and a = (|C|/p^n) a' P exactly.

    Non-integral transforms raise NonIntegralResult; a report whose
    ``match`` is False falsifies the underlying duality data and should be
    treated as a bug signal.
    """
    a = inner_distribution(C, S, "primal")
    Cd = dual_code(C)
    a_dual = inner_distribution(Cd, S, "dual_classes")
    size = len(C)
    k = S.s + 1
    Q, P = S.Q_mat, S.P_mat
    aQ = []
    for alpha in range(k):
        num = sum(a[beta] * Q[beta][alpha] for beta in range(k))
        if num % size:
            raise NonIntegralResult(f"(aQ)[{alpha}] = {num}/{size}")
        aQ.append(num // size)
    total = S.p ** S.n
    back = []
    for beta in range(k):
        num = size * sum(a_dual[alpha] * P[alpha][beta] for alpha in range(k))
        if num % total:
            raise NonIntegralResult(f"(a'P)[{beta}] = {num}/{total}")
        back.append(num // total)
    return MacWilliamsReport(
        a, a_dual, tuple(aQ), tuple(back),
        tuple(aQ) == a_dual, tuple(back) == a)


def all_subspace_generators(p, n, max_dim):
    """Generator matrices (RREF) of every subspace of F_p^n of dim <= max_dim.

    Yields () for the zero code, then one canonical matrix per subspace:
    choose pivot columns, fill the free entries right of each pivot.
    """
    from itertools import combinations
    yield ()
    for k in range(1, max_dim + 1):
        for pivots in combinations(range(n), k):
            free_cells = []
            for r, pc in enumerate(pivots):
                for c in range(pc + 1, n):
                    if c not in pivots[r + 1:]:
                        free_cells.append((r, c))
            for values in product(range(p), repeat=len(free_cells)):
                M = [[0] * n for _ in range(k)]
                for r, pc in enumerate(pivots):
                    M[r][pc] = 1
                for (r, c), v in zip(free_cells, values):
                    M[r][c] = v
                yield tuple(tuple(row) for row in M)
