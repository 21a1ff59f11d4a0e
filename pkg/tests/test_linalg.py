from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cardshuffle.errors import SingularMatrixError
from cardshuffle.linalg import bareiss_solve, dixon_solve, solve_integer_system, solve_rational_rhs


def sympy_solve(A, b):
    x = sympy.Matrix(A).LUsolve(sympy.Matrix(b))
    return [Fraction(int(v.p), int(v.q)) for v in x]


@st.composite
def nonsingular_system(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    ints = st.integers(-20, 20)
    A = [[draw(ints) for _ in range(n)] for _ in range(n)]
    # diagonal dominance keeps it nonsingular
    for i in range(n):
        A[i][i] = sum(abs(v) for v in A[i]) + draw(st.integers(1, 5))
    b = [draw(st.integers(-10**30, 10**30)) for _ in range(n)]
    return A, b


@settings(max_examples=60, deadline=None)
@given(nonsingular_system())
def test_bareiss_and_dixon_match_sympy(sys_):
    A, b = sys_
    ref = sympy_solve(A, b)
    assert bareiss_solve(A, b) == ref
    assert dixon_solve(A, b) == ref


def test_dixon_on_larger_markov_like_system():
    # 2n(I - Q) style: diagonal 2n, off-diagonals negative and rows weakly dominant
    n = 60
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = 12
        for j in ((i * 7 + 3) % n, (i * 11 + 5) % n):
            if j != i:
                A[i][j] -= 5
    b = [12 + i for i in range(n)]
    assert dixon_solve(A, b) == bareiss_solve(A, b)


def test_zero_pivot_needs_row_swap():
    assert bareiss_solve([[0, 1], [1, 0]], [2, 3]) == [3, 2]
    assert dixon_solve([[0, 1], [1, 0]], [2, 3]) == [3, 2]


def test_singular_raises():
    with pytest.raises(SingularMatrixError):
        bareiss_solve([[1, 2], [2, 4]], [1, 1])
    with pytest.raises(SingularMatrixError):
        dixon_solve([[1, 2], [2, 4]], [1, 1])


def test_rational_rhs_and_dispatch():
    A = [[4, -2], [-4, 4]]
    assert solve_rational_rhs(A, [Fraction(4), Fraction(4)]) == [Fraction(3), Fraction(4)]
    assert solve_rational_rhs(A, [Fraction(1, 3), Fraction(0)]) == [Fraction(1, 6), Fraction(1, 6)]
    assert solve_integer_system([], []) == []
