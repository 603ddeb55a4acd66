"""
Linear algebra over the field of three elements, backed by sympy's DomainMatrix over GF(3).
All inputs and outputs are plain integer rows with entries in {0, 1, 2}.
"""

from sympy import GF
from sympy.polys.matrices import DomainMatrix

F3 = GF(3)


def _domain_matrix(rows, columns=None):
    rows = [list(row) for row in rows]
    if columns is None:
        columns = len(rows[0]) if rows else 0
    return DomainMatrix([[F3(int(entry) % 3) for entry in row] for row in rows], (len(rows), columns), F3)


def _to_rows(matrix):
    return [tuple(int(entry) % 3 for entry in row) for row in matrix.to_Matrix().tolist()]


def rank(rows):
    """
    Rank of the matrix given by rows.
    @param rows: iterable of equally long integer rows
    @return: rank over GF(3)
    """
    rows = list(rows)
    if not rows:
        return 0
    return _domain_matrix(rows).rank()


def determinant(rows):
    """
    @param rows: square integer matrix
    @return: determinant in {0, 1, 2}
    """
    return int(_domain_matrix(rows).det()) % 3


def inverse(rows):
    """
    Inverse of a square matrix over GF(3). Raises ZeroDivisionError-like sympy errors on singular input,
    callers check the determinant first.
    @param rows: square integer matrix
    @return: tuple of rows
    """
    return tuple(_to_rows(_domain_matrix(rows).inv()))


def rref(rows):
    """
    Reduced row echelon form without zero rows.
    @param rows: integer rows
    @return: (tuple of non-zero rows, pivot columns)
    """
    rows = list(rows)
    if not rows:
        return (), ()
    reduced, pivots = _domain_matrix(rows).rref()
    reduced_rows = _to_rows(reduced)
    return tuple(reduced_rows[:len(pivots)]), tuple(pivots)


def nullspace(rows, columns):
    """
    Basis of {x : row . x = 0 for every row}.
    @param rows: integer rows (may be empty)
    @param columns: number of columns (ambient dimension)
    @return: tuple of basis vectors
    """
    rows = list(rows)
    if not rows:
        return tuple(tuple(1 if i == j else 0 for j in range(columns)) for i in range(columns))
    reduced, pivots = rref(rows)
    free = [column for column in range(columns) if column not in pivots]
    basis = []
    for free_column in free:
        vector = [0] * columns
        vector[free_column] = 1
        for row, pivot in zip(reduced, pivots):
            vector[pivot] = (-row[free_column]) % 3
        basis.append(tuple(vector))
    return tuple(basis)


def multiply(left, right):
    """
    Matrix product over GF(3) of two integer matrices.
    """
    right_columns = list(zip(*right))
    return tuple(tuple(sum(a * b for a, b in zip(row, column)) % 3 for column in right_columns) for row in left)


def normalize_vector(vector):
    """
    Scales a non-zero vector so that its first non-zero entry is 1 (representative of the vector up to sign).
    """
    for entry in vector:
        if entry % 3:
            factor = 1 if entry % 3 == 1 else 2
            return tuple((factor * value) % 3 for value in vector)
    raise ValueError("zero vector has no normalisation")
