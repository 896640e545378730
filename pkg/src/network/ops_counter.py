"""
Operation counting for the layer-update cost comparison
"""

from dataclasses import dataclass


@dataclass
class OpsCounter:
    """Scalar operation tallies

    For the derivative-free update the fields count complex operations; the
    backprop baseline records its real-valued operations in the same fields.
    """

    complex_mults: int = 0
    complex_adds: int = 0
    svd_calls: int = 0

    @property
    def total(self) -> int:
        """Multiplications plus additions (SVD calls are reported separately)"""
        return self.complex_mults + self.complex_adds

    def matmul(self, rows: int, inner: int, cols: int) -> "OpsCounter":
        self.complex_mults += rows * inner * cols
        self.complex_adds += rows * (inner - 1) * cols
        return self

    def matvec(self, rows: int, cols: int) -> "OpsCounter":
        return self.matmul(rows, cols, 1)

    def outer(self, rows: int, cols: int) -> "OpsCounter":
        self.complex_mults += rows * cols
        return self

    def elementwise_mults(self, count: int) -> "OpsCounter":
        self.complex_mults += count
        return self

    def elementwise_adds(self, count: int) -> "OpsCounter":
        self.complex_adds += count
        return self

    def svd(self) -> "OpsCounter":
        self.svd_calls += 1
        return self

    def __add__(self, other: "OpsCounter") -> "OpsCounter":
        return OpsCounter(
            self.complex_mults + other.complex_mults,
            self.complex_adds + other.complex_adds,
            self.svd_calls + other.svd_calls,
        )

    def to_dict(self) -> dict:
        return {
            "complex_mults": self.complex_mults,
            "complex_adds": self.complex_adds,
            "svd_calls": self.svd_calls,
        }
