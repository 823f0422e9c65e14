"""Coefficients of the weight-4 CM form attached to y^2 + y = x^3 - x^2 - 7x + 10.

The curve has conductor 121 and CM by Q(sqrt(-11)).  For a prime q of good
reduction write d_q = q + 1 - #E(F_q); then the weight-4 coefficient is

    a_q = d_q^3 - 3 q d_q        (Sym^3-style lift of the degree-one trace)

and a_q = 0 for primes inert in Q(sqrt(-11)) as well as q = 11.

Two prime-trace backends:
  * naive_dq: O(q) point count over F_q (reference; default for q <= 10^6)
  * cornacchia_dq: 4q = x^2 + 11 y^2 and a quadratic-character sign rule
    (fast path; one naive cross-check per run guards the convention)
"""

import numpy as np

from .exact import cornacchia_4p_11, legendre

# x-coordinates are counted through chi(4 f(x) + 1), the completed square of
# y^2 + y = f(x)
_F_COEFFS = (10, -7, -1, 1)  # f(x) = x^3 - x^2 - 7x + 10

# residues mod 11 that are nonzero squares: primes in these classes split
_SPLIT_CLASSES = frozenset((1, 3, 4, 5, 9))

_SIGN_CHECKED = False


def naive_dq(q):
    """d_q = q + 1 - #E(F_q) by direct count; q an odd prime != 11."""
    x = np.arange(q, dtype=np.int64)
    rhs = (4 * (((x * x % q) * x - x * x - 7 * x + 10) % q) + 1) % q
    chi = np.full(q, -1, dtype=np.int8)
    chi[(x * x) % q] = 1
    chi[0] = 0
    return -int(chi[rhs].sum())


def cornacchia_dq(q):
    """d_q via 4q = x^2 + 11 y^2; None if q is inert.

    Writes 4q = x^2 + 11 y^2 (x > 0) and picks the sign of x by the
    normalization chi_11(d_q) = -1, i.e. d_q is a quadratic nonresidue
    mod 11.  One naive count per process cross-checks the convention.
    """
    global _SIGN_CHECKED
    if q % 11 not in _SPLIT_CLASSES:
        return None
    sol = cornacchia_4p_11(q)
    if sol is None:
        return None
    x = sol[0]
    d = x if legendre(x, 11) == -1 else -x
    if not _SIGN_CHECKED:
        _SIGN_CHECKED = True
        probe = naive_dq(q)
        if probe != d:
            raise AssertionError(
                f"CM sign convention failed cross-check at q={q}: "
                f"cornacchia {d} vs naive {probe}"
            )
    return d


def dq(q, naive_bound=10 ** 6):
    """Trace d_q for an odd prime q != 11; inert primes give 0."""
    if q % 11 not in _SPLIT_CLASSES:
        return 0
    if q <= naive_bound:
        d = naive_dq(q) if q <= 20000 else None
        c = cornacchia_dq(q)
        if d is not None and c is not None and d != c:
            raise AssertionError(f"trace backends disagree at q={q}")
        return c if c is not None else d
    c = cornacchia_dq(q)
    return 0 if c is None else c


def aq_weight4(q):
    """Prime coefficient a_q of the weight-4 form; q prime."""
    if q == 11 or q % 11 not in _SPLIT_CLASSES:
        return 0  # ramified/inert primes (2 is inert: -11 = 5 mod 8)
    d = dq(q)
    return d ** 3 - 3 * q * d


def prime_aq_table(primes):
    """int64 a_q for a numpy array of primes (ascending). Vectorized filter,
    per-prime Cornacchia on the split ones."""
    out = np.zeros(len(primes), dtype=np.int64)
    residues = primes % 11
    split = np.isin(residues, list(_SPLIT_CLASSES))
    split &= primes != 2
    idx = np.nonzero(split)[0]
    for i in idx:
        q = int(primes[i])
        d = cornacchia_dq(q)
        if d is None:
            raise ArithmeticError(f"cornacchia failed on split prime {q}")
        out[i] = d * d * d - 3 * q * d
    # q = 2 (inert: 2 is a nonresidue mod 11) and q = 11 stay 0
    return out


def reset_sign_check():
    global _SIGN_CHECKED
    _SIGN_CHECKED = False
