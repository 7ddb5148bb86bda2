"""Complex tridiagonal systems, plain or cyclic.

The banded part goes through LAPACK via ``scipy.linalg.solve_banded``. A
cyclic matrix (periodic grid) is split into a banded matrix plus a rank-one
correction handled with the Sherman–Morrison formula.
"""

import numpy as np
import scipy.linalg

from symcurrents.utils import SolverBreakdown


def _as_band(value, length: int) -> np.ndarray:
    return np.broadcast_to(np.asarray(value, dtype=complex), (length,)).copy()


class TridiagonalSystem:
    """A fixed tridiagonal matrix solved against many right-hand sides.

    :param diagonal: main diagonal, length n.
    :param lower: sub-diagonal, scalar or length n-1.
    :param upper: super-diagonal, scalar or length n-1.
    :param corner_lower: entry ``A[n-1, 0]`` (cyclic systems).
    :param corner_upper: entry ``A[0, n-1]`` (cyclic systems).
    :raises SolverBreakdown: if the rank-one correction is singular.
    """

    def __init__(
        self,
        diagonal,
        lower,
        upper,
        corner_lower: complex = 0.0,
        corner_upper: complex = 0.0,
    ):
        self.diagonal = np.array(diagonal, dtype=complex)
        n = self.diagonal.size
        self.lower = _as_band(lower, n - 1)
        self.upper = _as_band(upper, n - 1)
        self.corner_lower = complex(corner_lower)
        self.corner_upper = complex(corner_upper)
        self.cyclic = self.corner_lower != 0 or self.corner_upper != 0

        band_diagonal = self.diagonal.copy()
        if self.cyclic:
            gamma = -self.diagonal[0]
            if gamma == 0:
                raise SolverBreakdown("zero leading diagonal in cyclic system")
            band_diagonal[0] -= gamma
            band_diagonal[-1] -= self.corner_lower * self.corner_upper / gamma
        self.band = np.zeros((3, n), dtype=complex)
        self.band[0, 1:] = self.upper
        self.band[1] = band_diagonal
        self.band[2, :-1] = self.lower

        if self.cyclic:
            u = np.zeros(n, dtype=complex)
            u[0] = gamma
            u[-1] = self.corner_lower
            self.v = np.zeros(n, dtype=complex)
            self.v[0] = 1.0
            self.v[-1] = self.corner_upper / gamma
            self.z = self._solve_band(u)
            self.denominator = 1.0 + self.v @ self.z
            if self.denominator == 0:
                raise SolverBreakdown("singular Sherman-Morrison correction")

    def _solve_band(self, rhs: np.ndarray) -> np.ndarray:
        try:
            return scipy.linalg.solve_banded((1, 1), self.band, rhs, check_finite=False)
        except np.linalg.LinAlgError as e:
            raise SolverBreakdown(f"zero pivot in tridiagonal solve: {e}") from e

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        y = self._solve_band(np.asarray(rhs, dtype=complex))
        if self.cyclic:
            y = y - (self.v @ y) / self.denominator * self.z
        if not np.all(np.isfinite(y)):
            raise SolverBreakdown("tridiagonal solve produced non-finite values")
        return y

    def matvec(self, x: np.ndarray) -> np.ndarray:
        out = self.diagonal * x
        out[1:] += self.lower * x[:-1]
        out[:-1] += self.upper * x[1:]
        out[0] += self.corner_upper * x[-1]
        out[-1] += self.corner_lower * x[0]
        return out

    def relative_residual(self, x: np.ndarray, rhs: np.ndarray) -> float:
        scale = np.max(np.abs(rhs))
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(self.matvec(x) - rhs)) / scale)
