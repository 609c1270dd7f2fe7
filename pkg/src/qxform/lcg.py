"""Fixed-seed linear congruential generator for reproducible test matrices.

    x_{k+1} = (6364136223846793005 x_k + 1442695040888963407) mod 2^64

Each draw advances the state once and maps it to ``2 x / 2^64 - 1`` in
``[-1, 1)``. Complex entries take the real part from one draw and the
imaginary part from the next, in row-major order.
"""

import numpy as np

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MODULUS = 2 ** 64


class Lcg:
    def __init__(self, seed: int = 42):
        self.state = int(seed) % MODULUS

    def next_u64(self) -> int:
        self.state = (MULTIPLIER * self.state + INCREMENT) % MODULUS
        return self.state

    def uniform(self) -> float:
        return 2.0 * self.next_u64() / MODULUS - 1.0

    def complex_matrix(self, n: int) -> np.ndarray:
        out = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                re = self.uniform()
                out[i, j] = complex(re, self.uniform())
        return out

    def hermitian(self, n: int) -> np.ndarray:
        a = self.complex_matrix(n)
        return (a + a.conj().T) / 2


def hermitian_samples(count: int, n: int, seed: int = 42):
    """``count`` Hermitian matrices drawn from one generator stream."""
    gen = Lcg(seed)
    return [gen.hermitian(n) for _ in range(count)]
