"""
Complex-double recomputation of the package's constructions with numpy.

Nothing here reuses the exact kernel: phases, MUB states, MUUB operators, Choi
vectors and partial traces are rebuilt from their defining formulas so that the
two paths can be compared cell by cell.
"""
import numpy as np

from utils.configutils import FLOAT_TOLERANCE


class FloatOracle:
    def __init__(self, tolerance=FLOAT_TOLERANCE):
        self.tolerance = tolerance

    @staticmethod
    def omega(d):
        return np.exp(2j * np.pi / d)

    @staticmethod
    def alpha(d, a):
        # a + (a+1) + ... + (d-1) as an arithmetic series
        return (d - a) * (a + d - 1) // 2

    def shift(self, d):
        return np.roll(np.eye(d, dtype=complex), 1, axis=0)

    def clock(self, d):
        return np.diag(self.omega(d) ** np.arange(d))

    def mub_state(self, d, r, s):
        a = np.arange(d)
        phases = s * (d - a) - r * np.array([self.alpha(d, k) for k in a])
        return self.omega(d) ** (phases % d) / np.sqrt(d)

    def all_mubs(self, d):
        """Columns of each matrix are the basis vectors; the computational basis comes first."""
        bases = [np.eye(d, dtype=complex)]
        for r in range(d):
            bases.append(np.column_stack([self.mub_state(d, r, s) for s in range(d)]))
        return bases

    def mub_overlaps(self, basis_a, basis_b):
        return np.abs(basis_a.conj().T @ basis_b) ** 2

    def muub_matrix(self, d, r, s):
        coeffs = self.mub_state(d, r, s)
        x = self.shift(d)
        return sum(c * np.linalg.matrix_power(x, i) for i, c in enumerate(coeffs))

    def muub_family(self, d):
        x = self.shift(d)
        family = [[np.linalg.matrix_power(x, i) for i in range(d)]]
        for r in range(1, d):
            family.append([self.muub_matrix(d, r, s) for s in range(d)])
        return family

    @staticmethod
    def hs_overlap_squared(a, b):
        return abs(np.trace(a.conj().T @ b)) ** 2

    def word(self, d, b, a):
        return np.linalg.matrix_power(self.shift(d), b) @ np.linalg.matrix_power(self.clock(d), a)

    @staticmethod
    def choi(u):
        # entry m*d + n holds <n|U|m>
        d = u.shape[0]
        return u.T.reshape(-1) / np.sqrt(d)

    def bell_state(self, d, a, b):
        return self.choi(self.word(d, b, a))

    def mes_mub_state(self, d, r, s, a, b):
        w = self.word(d, b, a)
        coeffs = self.mub_state(d, r, s)
        return sum(c * self.choi(np.linalg.matrix_power(w, i)) for i, c in enumerate(coeffs))

    @staticmethod
    def partial_trace(rho, d, side):
        blocks = rho.reshape(d, d, d, d)
        if side == 1:
            return np.trace(blocks, axis1=0, axis2=2)
        return np.trace(blocks, axis1=1, axis2=3)

    def is_mes(self, psi, d):
        rho = np.outer(psi, psi.conj())
        target = np.eye(d) / d
        return all(np.allclose(self.partial_trace(rho, d, side), target, atol=self.tolerance, rtol=0)
                   for side in (1, 2))

    def deviation(self, exact, approx):
        """Largest absolute difference between exact values (anything with to_complex) and floats."""
        exact = np.array([x.to_complex() for x in exact], dtype=complex)
        approx = np.asarray(approx, dtype=complex).reshape(-1)
        if exact.shape != approx.shape:
            raise ValueError(f"shape mismatch {exact.shape} vs {approx.shape}")
        return float(np.max(np.abs(exact - approx))) if exact.size else 0.0

    def agrees(self, deviation):
        return deviation < self.tolerance
