"""
Случайные обратимые матрицы над Z_n и гомоморфное умножение матрицы на шифрованный вектор.
"""
from typing import List, Sequence, Tuple

import gmpy2

from src.crypto.paillier import Ciphertext, hom_add, hom_scale
from src.utils.rng import RandomSource

Matrix = List[List[int]]


def identity(c: int) -> Matrix:
    return [[int(i == j) for j in range(c)] for i in range(c)]


def mat_mul_mod(a: Matrix, b: Matrix, n: int) -> Matrix:
    size, inner, cols = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) % n for j in range(cols)] for i in range(size)]


def invert_matrix_mod(matrix: Matrix, n: int) -> Matrix:
    """Гаусс-Жордан по модулю n. ValueError, если ведущий элемент не обратим"""
    c = len(matrix)
    aug = [list(row) + identity(c)[i] for i, row in enumerate(matrix)]
    for col in range(c):
        pivot_row = next((r for r in range(col, c) if gmpy2.gcd(aug[r][col], n) == 1), None)
        if pivot_row is None:
            raise ValueError("Матрица необратима по модулю n")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        inv = int(gmpy2.invert(aug[col][col], n))
        aug[col] = [v * inv % n for v in aug[col]]
        for r in range(c):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [(v - factor * p) % n for v, p in zip(aug[r], aug[col])]
    return [row[c:] for row in aug]


def random_invertible_matrix(c: int, n: int, rng: RandomSource) -> Tuple[Matrix, Matrix]:
    """Равномерная матрица c x c над Z_n, перевыбор до обратимости. Возвращает (B, B^-1)"""
    if c < 1:
        raise ValueError("Размер матрицы должен быть >= 1")
    while True:
        matrix = [[rng.randbelow(n) for _ in range(c)] for _ in range(c)]
        try:
            return matrix, invert_matrix_mod(matrix, n)
        except ValueError:
            continue


def hom_matvec(matrix: Matrix, cts: Sequence[Ciphertext]) -> List[Ciphertext]:
    """E(M * x): строка r = prod_k E(x_k)^M[r][k]"""
    out = []
    for row in matrix:
        acc = None
        for coeff, ct in zip(row, cts):
            term = hom_scale(ct, coeff)
            acc = term if acc is None else hom_add(acc, term)
        out.append(acc)
    return out
