"""Two-dimensional Artin representations of Gal(Q(mu_p, m^{1/p})/Q).

sigma: the induced-from-trivial representation 1 (+) chi_{-p} of the
degree-(p-1) cyclotomic layer.  rho = rho_m: the irreducible piece that
sees the Kummer generator m^{1/p}.  Both have dimension p - 1 (= 2 at the
only wired-in prime p = 3).

Frobenius classes at unramified q:
    identity    q = 1 mod p, m a p-th power mod q       (order 1)
    pcycle      q = 1 mod p, m not a p-th power mod q   (order p)
    reflection  q != 1 mod p                            (order = ord of q mod p)
"""

from typing import NamedTuple

from .exact import factorize, kronecker, mult_order
from .poly import QPoly


class ArtinRep(NamedTuple):
    kind: str  # "sigma" | "rho"
    p: int
    m: int | None = None

    @property
    def degree(self):
        return self.p - 1

    def label(self):
        return "sigma" if self.kind == "sigma" else f"rho_{self.m}"


def sigma_rep(p=3):
    if p != 3:
        raise NotImplementedError("only p = 3 is wired in")
    return ArtinRep("sigma", p)


def rho_rep(m, p=3):
    if p != 3:
        raise NotImplementedError("only p = 3 is wired in")
    m = int(m)
    if m < 2:
        raise ValueError("m must be >= 2")
    if round(m ** (1 / p)) ** p == m:
        raise ValueError(f"m = {m} is a perfect {p}-th power; rho is reducible")
    return ArtinRep("rho", p, m)


class DirichletChar(NamedTuple):
    """Quadratic character of conductor p (the odd component of sigma)."""

    p: int

    def __call__(self, n):
        return kronecker(-self.p, n)

    @property
    def conductor(self):
        return self.p


class FrobClass(NamedTuple):
    kind: str  # "identity" | "pcycle" | "reflection"
    r: int  # order of Frobenius


def is_pth_power_mod(m, q, p):
    """m a p-th power mod q, for prime q = 1 mod p."""
    return pow(m % q, (q - 1) // p, q) == 1


def frobenius_class(rep, q):
    """Conjugacy class of Frob_q on the splitting field; q unramified."""
    p = rep.p
    if q == p or (rep.m is not None and rep.m % q == 0):
        raise ValueError(f"q = {q} ramifies")
    if q % p == 1:
        if rep.kind == "sigma" or is_pth_power_mod(rep.m, q, p):
            return FrobClass("identity", 1)
        return FrobClass("pcycle", p)
    return FrobClass("reflection", mult_order(q, p))


def _rho_wild_exponent(m, p):
    # p-exponent of the rho conductor
    if m % p == 0:
        return 2 * p - 1
    if pow(m, p - 1, p * p) == 1:
        return 1
    return p


def prime_to_p_radical(m, p):
    rad = 1
    for q in factorize(m):
        if q != p:
            rad *= q
    return rad


def conductor(rep):
    """Artin conductor N(rep)."""
    p = rep.p
    if rep.kind == "sigma":
        return p
    M = prime_to_p_radical(rep.m, p)
    return M ** (p - 1) * p ** _rho_wild_exponent(rep.m, p)


def epsilon_p(rep):
    """p-part of the epsilon factor, as (base, exp_numerator, exp_denominator):
    p^{e_p(rep)/2}, the Gauss-sum modulus for the local conductor exponent."""
    if rep.kind == "sigma":
        return (rep.p, 1, 2)
    return (rep.p, _rho_wild_exponent(rep.m, rep.p), 2)


def conductor_exponent_at_p(rep):
    """e_p(rep) = ord_p of the Artin conductor."""
    if rep.kind == "sigma":
        return 1
    return _rho_wild_exponent(rep.m, rep.p)


def epsilon_p_exponent(rep):
    """ord_p of the epsilon scale as a Fraction-free pair (num, den)."""
    _, a, b = epsilon_p(rep)
    return a, b


def d_plus_minus(rep, n=None):
    """(d+, d-): eigenvalue multiplicities of complex conjugation."""
    return (1, 1)


def artin_local_factor(rep, q):
    """det(1 - Frob_q T | V^{I_q}) as a QPoly in T."""
    p = rep.p
    if q == p:
        if rep.kind == "sigma":
            return QPoly([1, -1])  # trivial component survives inertia
        if pow(rep.m, p - 1, p * p) == 1:
            return QPoly([1, -1])
        return QPoly.one()
    if rep.kind == "rho" and rep.m % q == 0:
        return QPoly.one()
    cls = frobenius_class(rep, q)
    if cls.kind == "identity":
        return QPoly([1, -1]) ** (p - 1)
    if cls.kind == "pcycle":
        return QPoly([1] * p)  # cyclotomic: (1 - T^p)/(1 - T)
    # reflection: eigenvalues are the r-th roots of unity, (p-1)/r times each
    base = QPoly([1] + [0] * (cls.r - 1) + [-1])  # 1 - T^r
    return base ** ((p - 1) // cls.r)


def local_root_number(form, rep, q):
    """Local factor of w(f, rep) at q (the global sign splits over q | N)."""
    p = rep.p
    m = rep.m if rep.m is not None else 1
    N = form.level
    e = 0
    Nq = N
    while Nq % q == 0:
        Nq //= q
        e += 1
    if q != p and m % q != 0:
        return kronecker(q, p) ** e
    if q == p and e == 1 and pow(m, p - 1, p * p) == 1:
        ap = form.coeff(p)
        return -1 if ap > 0 else 1
    return 1


def global_root_number(form, rep):
    """Sign of the functional equation of L(f, rep, s)."""
    p = rep.p
    w = (-1) ** ((p - 1) // 2)
    for q in factorize(form.level):
        w *= local_root_number(form, rep, q)
    return w
