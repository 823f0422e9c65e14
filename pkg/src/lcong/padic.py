"""p-adic interpolation layer: unit roots, the modified multipliers
attaching a p-adic value to each critical point, and the congruence
verdicts between the two twists.

Values are tracked as explicit p-adic approximations x = p^v * u with the
unit u known mod p^prec, so every verdict records how many digits actually
back it; anything short degrades to "inconclusive" rather than a guess.
"""

from fractions import Fraction
from typing import NamedTuple

from . import artin
from .exact import factorize


class PadicNumber:
    """x = p^val * unit with unit mod p^prec (prec relative digits).

    zero is represented with is_zero=True and prec giving the exclusion
    bound: |x| <= p^-prec (i.e. O(p^prec)).
    """

    __slots__ = ("p", "val", "unit", "prec", "is_zero")

    def __init__(self, p, val, unit, prec, is_zero=False):
        self.p = p
        if is_zero:
            self.val, self.unit, self.prec, self.is_zero = 0, 0, prec, True
            return
        if unit % p == 0:
            raise ValueError("unit part divisible by p")
        self.val = val
        self.prec = prec
        self.unit = unit % p ** prec
        self.is_zero = False

    @classmethod
    def zero(cls, p, exclusion_prec):
        return cls(p, 0, 0, exclusion_prec, is_zero=True)

    @classmethod
    def from_fraction(cls, fr, p, prec):
        fr = Fraction(fr)
        if fr == 0:
            return cls.zero(p, prec + 64)
        num, den = fr.numerator, fr.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        mod = p ** prec
        u = num * pow(den, -1, mod) % mod
        return cls(p, v, u, prec)

    def _require(self, other):
        if self.p != other.p:
            raise ValueError("mixed primes")

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicNumber.from_fraction(other, self.p, self.prec)
        self._require(other)
        if self.is_zero or other.is_zero:
            pr = min(x.prec + y.val for x, y in ((self, other), (other, self))
                     if x.is_zero) if (self.is_zero and other.is_zero) else (
                (self.prec + other.val) if self.is_zero else (other.prec + self.val))
            return PadicNumber.zero(self.p, pr)
        pr = min(self.prec, other.prec)
        return PadicNumber(self.p, self.val + other.val,
                           self.unit * other.unit, pr)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicNumber.from_fraction(other, self.p, self.prec)
        self._require(other)
        if other.is_zero:
            raise ZeroDivisionError("division by p-adic zero")
        if self.is_zero:
            return PadicNumber.zero(self.p, self.prec - other.val)
        pr = min(self.prec, other.prec)
        mod = self.p ** pr
        u = self.unit * pow(other.unit % mod, -1, mod)
        return PadicNumber(self.p, self.val - other.val, u, pr)

    def __rtruediv__(self, other):
        return PadicNumber.from_fraction(other, self.p, self.prec) / self

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicNumber.from_fraction(other, self.p, self.prec)
        self._require(other)
        if self.is_zero and other.is_zero:
            return PadicNumber.zero(self.p, min(self.prec, other.prec))
        if self.is_zero:
            if self.prec <= other.val:
                return PadicNumber.zero(self.p, self.prec)
            if self.prec >= other.val + other.prec:
                return other
            return PadicNumber(other.p, other.val, other.unit,
                               self.prec - other.val)
        if other.is_zero:
            return other.__add__(self)
        # absolute known precision
        abs_prec = min(self.val + self.prec, other.val + other.prec)
        v = min(self.val, other.val)
        mod = self.p ** (abs_prec - v)
        tot = (self.unit * self.p ** (self.val - v)
               + other.unit * self.p ** (other.val - v)) % mod
        if tot == 0:
            return PadicNumber.zero(self.p, abs_prec)
        vv = 0
        while tot % self.p == 0:
            tot //= self.p
            vv += 1
        return PadicNumber(self.p, v + vv, tot, abs_prec - v - vv)

    def __neg__(self):
        if self.is_zero:
            return self
        return PadicNumber(self.p, self.val, -self.unit % self.p ** self.prec,
                           self.prec)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicNumber.from_fraction(other, self.p, self.prec)
        return self.__add__(-other)

    def __pow__(self, e):
        if not isinstance(e, int):
            raise TypeError("integer exponents only")
        if self.is_zero:
            if e <= 0:
                raise ZeroDivisionError
            return PadicNumber.zero(self.p, self.prec * e)
        if e < 0:
            return 1 / self ** (-e)
        mod = self.p ** self.prec
        return PadicNumber(self.p, self.val * e, pow(self.unit, e, mod),
                           self.prec)

    def ord(self):
        if self.is_zero:
            return None
        return self.val

    def residue(self, j=1):
        """The image in Z/p^j of the unit part (leading digits)."""
        if self.is_zero:
            return 0
        if self.prec < j:
            raise ValueError(f"only {self.prec} digits known, {j} asked")
        return self.unit % self.p ** j

    def table_string(self, digits=1):
        """Leading-digit display: 'c*p^v + O(p^{v+digits})' shapes."""
        p = self.p
        if self.is_zero:
            return f"O({p}^{self.prec})" if self.prec < 64 else "0"
        d = min(digits, self.prec)
        c = self.unit % p ** d
        v = self.val
        if v == 0:
            return f"{c} + O({p}^{d})"
        return f"{c}*{p}^{v} + O({p}^{v + d})"

    def __repr__(self):
        return f"PadicNumber({self.table_string(2)})"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicNumber.from_fraction(other, self.p, self.prec)
        if self.p != other.p:
            return False
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        return (self.val == other.val
                and self.prec == other.prec
                and self.unit == other.unit)


def unit_root(form, prec=24):
    """The p-adic unit root alpha of X^2 - a_p X + p^{k-1} (p = 3),
    alpha = a_p mod p, by Newton iteration."""
    p = 3
    ap = form.coeff(p)
    if ap % p == 0:
        raise ValueError(f"{form.form_id} is not ordinary at {p}")
    c = p ** (form.weight - 1)
    mod = p ** (prec + 2)
    x = ap % p
    known = 1
    while known < prec + 2:
        known = min(2 * known, prec + 2)
        m = p ** known
        fx = (x * x - ap * x + c) % m
        dfx = (2 * x - ap) % m
        x = (x - fx * pow(dfx, -1, m)) % m
    assert (x * x - ap * x + c) % mod == 0
    return PadicNumber(p, 0, x % p ** prec, prec)


def _eval_qpoly_padic(poly, x):
    """QPoly at a PadicNumber argument, Horner."""
    cs = poly.coeffs
    acc = PadicNumber.from_fraction(Fraction(cs[-1]), x.p, x.prec)
    for c in reversed(cs[:-1]):
        acc = acc * x + Fraction(c)
    return acc


def m_p_value(form, rep, n, lstar_rational, prec=24):
    """The p-adic multiplier value at critical point n, from the exact
    normalized L-value: Gamma(n)^2 * Lstar * P_p(f,phi,p^-n)
    * P_p(phi, p^{n-1}/alpha) / P_p(phi, alpha/p^n) * (p^{n-1}/alpha)^{e_p}."""
    import math

    p = rep.p
    alpha = unit_root(form, prec)
    Ls = PadicNumber.from_fraction(Fraction(lstar_rational) * math.factorial(n - 1) ** 2,
                                   p, prec)
    # twisted local factor at p, at X = p^-n
    ploc = twisted_factor_rational(form, rep, p, n)
    out = Ls * PadicNumber.from_fraction(ploc, p, prec)
    # Artin factor of the (self-dual) representation at p
    art = artin.artin_local_factor(rep, p)
    t_hat = PadicNumber.from_fraction(Fraction(p) ** (n - 1), p, prec) / alpha
    t_dir = alpha / PadicNumber.from_fraction(Fraction(p) ** n, p, prec)
    out = out * _eval_qpoly_padic(art, t_hat) / _eval_qpoly_padic(art, t_dir)
    e_p = artin.conductor_exponent_at_p(rep)
    return out * t_hat ** e_p


def twisted_factor_rational(form, rep, q, n):
    """P_q(f, phi, q^-n) as an exact Fraction."""
    from . import lfunc as _lf
    poly = _lf.twisted_euler_factor(form, rep, q)
    return poly(Fraction(1, q ** n))


class ScriptL(NamedTuple):
    value: PadicNumber          # the interpolated p-adic value
    p3_column: Fraction         # prod over q | pm of P_q(f, phi, q^-n)
    lstar: Fraction
    n: int


def script_l(form, rep, n, lstar_rational, m=None, prec=24):
    """(L_p-value, P_3-column) at critical point n.

    m: the row's twisting integer -- the local product runs over its prime
    factors away from p.  Defaults to rep.m (always right for rho; sigma
    rows must pass the m they sit in).
    """
    p = rep.p
    if m is None:
        m = rep.m
    if m is None:
        raise ValueError("sigma rows need an explicit m")
    m_val = m_p_value(form, rep, n, lstar_rational, prec)
    col = twisted_factor_rational(form, rep, p, n)
    for q in sorted(factorize(m)):
        if q == p:
            continue
        fq = twisted_factor_rational(form, rep, q, n)
        m_val = m_val * PadicNumber.from_fraction(fq, p, prec)
        col *= fq
    return ScriptL(m_val, col, Fraction(lstar_rational), n)


# canonical-period rescale: known exactly only for the CM form
_CANONICAL_SCALE = {"121w4": Fraction(3, 22)}


def canonical_scale(form):
    """L-value multiplier moving naive periods to canonical ones."""
    return _CANONICAL_SCALE.get(form.form_id, Fraction(1))


class CongruenceReport(NamedTuple):
    m: int
    n: int
    modulus: int                # p or p^2
    sigma_value: PadicNumber
    rho_value: PadicNumber
    verdict: str                # "pass" | "fail" | "inconclusive"
    detail: str


def verify_congruence(sig_l, rho_l, modulus_exp=1):
    """Check L_p(f,sigma,n) = L_p(f,rho,n) mod p^modulus_exp."""
    a, b = sig_l.value, rho_l.value
    p = a.p
    need = modulus_exp
    diff = a - b
    if diff.is_zero:
        known_to = diff.prec
        if known_to >= need:
            return "pass", f"difference is O({p}^{known_to})"
        return "inconclusive", f"difference only known to O({p}^{known_to})"
    d_ord = diff.ord()
    # a value of negative valuation on either side breaks integrality first
    for side, name in ((a, "sigma"), (b, "rho")):
        if not side.is_zero and side.val < 0:
            return "fail", f"{name} side has negative valuation {side.val}"
    if d_ord >= need:
        return "pass", f"difference has valuation {d_ord} >= {need}"
    # confirm the failure is within known precision
    abs_known = min(x.val + x.prec for x in (a, b) if not x.is_zero)
    if abs_known >= need:
        return "fail", f"difference has valuation {d_ord} < {need}"
    return "inconclusive", f"precision exhausted at O({p}^{abs_known})"


def b_value(form, rep, n, lstar_rational):
    """|Lstar| M N(rho)^{n-1} / 4: the integrality/squareness quantity
    behind the last table block.  M is the prime-to-p radical of m."""
    M = artin.prime_to_p_radical(rep.m, rep.p)
    cond = artin.conductor(rep)
    return abs(Fraction(lstar_rational)) * M * Fraction(cond) ** (n - 1) / 4


def b_value_literal_scale(rep, n):
    """The per-point scale M^n eps_3(rho)^{n-1} / 4 read off the displayed
    definition; differs from the reconciled one by (M eps_3)^{n-1} vs
    N(rho)^{n-1}.  Kept for the discrepancy report."""
    M = artin.prime_to_p_radical(rep.m, rep.p)
    p, a, bden = artin.epsilon_p(rep)
    if (a * (n - 1)) % bden:
        return None  # irrational scale: the literal reading cannot be meant
    return Fraction(M) ** n * Fraction(p) ** (a * (n - 1) // bden) / 4
