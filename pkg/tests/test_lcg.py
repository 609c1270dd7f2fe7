import numpy as np

from qxform.lcg import Lcg, hermitian_samples


def test_first_draws():
    x = 42
    gen = Lcg(42)
    for _ in range(3):
        x = (6364136223846793005 * x + 1442695040888963407) % 2 ** 64
        assert gen.next_u64() == x


def test_uniform_range_and_order():
    a = Lcg(7)
    b = Lcg(7)
    m = a.complex_matrix(3)
    first = b.uniform(), b.uniform()
    assert m[0, 0] == complex(*first)
    assert np.all(np.abs(m.real) <= 1) and np.all(np.abs(m.imag) <= 1)


def test_samples_hermitian_and_reproducible():
    s1 = hermitian_samples(5, 4)
    s2 = hermitian_samples(5, 4)
    for a, b in zip(s1, s2):
        assert np.array_equal(a, b)
        assert np.array_equal(a, a.conj().T)
    assert not np.array_equal(s1[0], s1[1])
