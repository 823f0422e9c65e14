"""Dense polynomials over Q, tuned for Euler-factor bookkeeping.

Local factors are tiny (degree <= 8), so nothing clever: tuple-backed
coefficients, Fraction entries, a handful of the operations the local
layer needs (evaluate, compose with c*X or X^r, inverse power series).
"""

from fractions import Fraction


class QPoly:
    """Immutable polynomial sum c_i X^i with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.coeffs = tuple(cs)

    @classmethod
    def one(cls):
        return cls([1])

    @property
    def degree(self):
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, QPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __mul__(self, other):
        if isinstance(other, QPoly):
            a, b = self.coeffs, other.coeffs
            out = [Fraction(0)] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        out[i + j] += ai * bj
            return QPoly(out)
        return QPoly([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, e):
        out = QPoly.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def scale_var(self, c):
        """P(c*X)."""
        out, fac = [], Fraction(1)
        for a in self.coeffs:
            out.append(a * fac)
            fac *= c
        return QPoly(out)

    def stretch(self, r):
        """P(X^r)."""
        out = [Fraction(0)] * (len(self.coeffs) * r)
        for i, a in enumerate(self.coeffs):
            out[i * r] = a
        return QPoly(out)

    def alternate(self):
        """P(-X)."""
        return QPoly([(-a if i % 2 else a) for i, a in enumerate(self.coeffs)])

    def inverse_coeffs(self, n_terms):
        """First n_terms coefficients of 1/P as a power series.

        Requires P(0) = 1 (all our local factors are normalized that
        way); returned list is exact, and stays integral whenever P has
        integer coefficients.
        """
        if self.coeffs[0] != 1:
            raise ValueError("inverse series wants constant term 1")
        inv = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
        for n in range(1, n_terms):
            s = Fraction(0)
            for j in range(1, min(n, len(self.coeffs) - 1) + 1):
                s += self.coeffs[j] * inv[n - j]
            inv[n] = -s
        return inv

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0 and self.degree >= 0:
                continue
            terms.append(f"{c}" if i == 0 else (f"{c}*X^{i}" if i > 1 else f"{c}*X"))
        return " + ".join(terms) or "0"


def hecke_factor(a_q, q, k):
    """1 - a_q X + q^(k-1) X^2, the good-prime local factor."""
    return QPoly([1, -a_q, q ** (k - 1)])


def steinberg_factor(a_q):
    """1 - a_q X, the multiplicative-bad-prime factor (ord_q N = 1)."""
    return QPoly([1, -a_q])


def base_change_trace(a_q, q, k, r):
    """Trace b_v of Frobenius for the degree-r unramified base change.

    t_r with t_0 = 2, t_1 = a_q, t_j = a_q t_{j-1} - q^(k-1) t_{j-2};
    this is alpha^r + beta^r for the roots of the Hecke polynomial.
    """
    if r == 0:
        return 2
    t_prev, t_cur = 2, a_q
    for _ in range(r - 1):
        t_prev, t_cur = t_cur, a_q * t_cur - q ** (k - 1) * t_prev
    return t_cur
