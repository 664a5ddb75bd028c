"""Exact rational solves for PSD Gram systems.

Plain fraction arithmetic, no pivot scaling tricks: the systems are small
(guarded at a few thousand unknowns) and exactness matters more than speed,
since the inequalities checked downstream can be razor-thin.
"""

from fractions import Fraction


class NotPSDError(Exception):
    """A pivot certified the matrix is not positive semi-definite."""


def solve_psd_system(G, c):
    """Solve G a = c for symmetric PSD rational G; rank deficiency allowed.

    Forward elimination without row exchanges is valid for PSD input because a
    zero diagonal pivot forces the whole remaining row to vanish; free
    variables take value 0.  Returns (a, pivots, rank).  Raises NotPSDError on
    a negative pivot or a zero pivot with a non-zero row, and ValueError if
    the system is inconsistent (c outside the column span).
    """
    n = len(G)
    A = [[Fraction(x) for x in row] for row in G]
    b = [Fraction(x) for x in c]
    for i in range(n):
        if len(A[i]) != n:
            raise ValueError("G must be square")
        for j in range(i + 1, n):
            if A[i][j] != A[j][i]:
                raise ValueError("G must be symmetric")

    pivots = []
    pivot_rows = []
    for i in range(n):
        piv = A[i][i]
        if piv < 0:
            raise NotPSDError(f"negative pivot at index {i}")
        if piv == 0:
            if any(A[i][j] != 0 for j in range(i, n)):
                raise NotPSDError(f"zero pivot with non-zero row at index {i}")
            continue
        pivots.append(piv)
        pivot_rows.append(i)
        for row in range(i + 1, n):
            factor = A[row][i] / piv
            if factor == 0:
                continue
            for col in range(i, n):
                A[row][col] -= factor * A[i][col]
            b[row] -= factor * b[i]

    # zero rows must have zero reduced rhs, else c is outside the span
    for i in range(n):
        if i not in pivot_rows and b[i] != 0 and all(A[i][j] == 0 for j in range(n)):
            raise ValueError("inconsistent system: rhs outside the column span")

    a = [Fraction(0)] * n
    for i in reversed(pivot_rows):
        acc = b[i]
        for j in range(i + 1, n):
            acc -= A[i][j] * a[j]
        a[i] = acc / A[i][i]
    return a, pivots, len(pivot_rows)


def dot(u, v) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), start=Fraction(0))
