"""Exact Gaussian elimination over TowerScalar vectors"""

from typing import List, Sequence, Tuple

from .scalar import TowerScalar

Vector = List[TowerScalar]


def dot(a: Sequence[TowerScalar], b: Sequence[TowerScalar]) -> TowerScalar:
    """Complex-bilinear (not Hermitian) pairing"""
    total = a[0] * 0
    for x, y in zip(a, b):
        if x and y:
            total = total + x * y
    return total


def rref(rows: Sequence[Sequence[TowerScalar]]) -> Tuple[List[Vector], List[int]]:
    """Reduced row echelon form (zero rows dropped) and the pivot columns"""
    matrix = [list(row) for row in rows]
    if not matrix:
        return [], []
    ncols = len(matrix[0])
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        pick = next((i for i in range(r, len(matrix)) if matrix[i][col]), None)
        if pick is None:
            continue
        matrix[r], matrix[pick] = matrix[pick], matrix[r]
        inverse = matrix[r][col].inv()
        matrix[r] = [x * inverse for x in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][col]:
                factor = matrix[i][col]
                matrix[i] = [x - factor * y for x, y in zip(matrix[i], matrix[r])]
        pivots.append(col)
        r += 1
        if r == len(matrix):
            break
    return matrix[:r], pivots


def rank(rows: Sequence[Sequence[TowerScalar]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[TowerScalar]], ncols: int, zero: TowerScalar) -> List[Vector]:
    """Basis of {v : row . v = 0 for every row}"""
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis: List[Vector] = []
    one = zero + 1
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def in_span(vectors: Sequence[Sequence[TowerScalar]], v: Sequence[TowerScalar]) -> bool:
    if not vectors:
        return not any(v)
    return rank(list(vectors) + [list(v)]) == rank(vectors)


def extend_basis(basis: Sequence[Sequence[TowerScalar]],
                 candidates: Sequence[Sequence[TowerScalar]]) -> List[Vector]:
    """Candidates (in order) that extend `basis` to an independent set"""
    current = [list(b) for b in basis]
    added: List[Vector] = []
    for c in candidates:
        if not in_span(current, c):
            current.append(list(c))
            added.append(list(c))
    return added


def proportional(a: Sequence[TowerScalar], b: Sequence[TowerScalar]) -> bool:
    """All 2x2 minors vanish"""
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            if a[i] * b[j] - a[j] * b[i]:
                return False
    return True
