"""q-expansions: Eisenstein series, the four registered eigenforms, and
twisted Dirichlet coefficient arrays.

Two build paths with independent arithmetic:
  * PowerSeries: exact rationals (one shared denominator), schoolbook
    products -- the reference path, O(n^2), for n up to ~10^3.
  * engine pipeline: scaled-integer sieves + Kronecker products in dual
    channels (mod 2^64 / mod M2), certified and divided down to int64.
Identity of the two on overlapping ranges is a test invariant.
"""

from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from . import cm, engine
from .exact import bernoulli, sigma


class PowerSeries:
    """Truncated q-series with exact rational coefficients.

    Stored as integer numerators over one shared positive denominator.
    Index 0 .. n_max.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num = [-v for v in num]
            den = -den
        g = den
        for v in num:
            g = gcd(g, v)
            if g == 1:
                break
        if g > 1:
            num = [v // g for v in num]
            den //= g
        self.num = list(num)
        self.den = den

    @classmethod
    def from_fractions(cls, fracs):
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        return cls([int(f * den) for f in fracs], den)

    @property
    def n_max(self):
        return len(self.num) - 1

    def coeff(self, n):
        return Fraction(self.num[n], self.den)

    def coeffs(self):
        return [Fraction(v, self.den) for v in self.num]

    def __add__(self, other):
        n = min(self.n_max, other.n_max)
        d1, d2 = self.den, other.den
        g = gcd(d1, d2)
        l = d1 // g * d2
        s1, s2 = l // d1, l // d2
        return PowerSeries(
            [self.num[i] * s1 + other.num[i] * s2 for i in range(n + 1)], l
        )

    def __sub__(self, other):
        return self + other.scale(Fraction(-1))

    def scale(self, c):
        c = Fraction(c)
        return PowerSeries([v * c.numerator for v in self.num], self.den * c.denominator)

    def __mul__(self, other):
        n = min(self.n_max, other.n_max)
        a, b = self.num, other.num
        out = [0] * (n + 1)
        for i, ai in enumerate(a[: n + 1]):
            if ai == 0:
                continue
            for j in range(0, n + 1 - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return PowerSeries(out, self.den * other.den)

    def __eq__(self, other):
        return (
            isinstance(other, PowerSeries)
            and self.den == other.den
            and self.num == other.num
        )

    def __repr__(self):
        head = ", ".join(str(self.coeff(n)) for n in range(min(6, self.n_max + 1)))
        return f"PowerSeries([{head}, ...], n_max={self.n_max})"


def eisenstein(k, n_max):
    """E_k normalized with constant term -B_k / (2k)  (so E_4 starts 1/240)."""
    c0 = -bernoulli(k) / (2 * k)
    fr = [c0] + [Fraction(sigma(n, k - 1)) for n in range(1, n_max + 1)]
    return PowerSeries.from_fractions(fr)


def e2star(t, n_max):
    """E_2(q) - t E_2(q^t): weight-2 level-t Eisenstein series, constant (t-1)/24."""
    num = [t - 1] + [
        24 * (sigma(n, 1) - (t * sigma(n // t, 1) if n % t == 0 else 0))
        for n in range(1, n_max + 1)
    ]
    return PowerSeries(num, 24)


def _eis_shift(k, t, n_max):
    """E_k(q^t) as a PowerSeries to n_max."""
    base = eisenstein(k, n_max // t)
    num = [0] * (n_max + 1)
    for i, v in enumerate(base.num):
        num[i * t] = v
    return PowerSeries(num, base.den)


def _e2s_shiftable(t, n_max):
    return e2star(t, n_max)


# form id -> (level, weight, scale D, rational combo, engine builder name)
# combo atoms: ("eis", k, t) is E_k(q^t); ("e2s", t) is E_2(q) - t E_2(q^t)
_F = Fraction
FORM_IDS = ("5w4", "7w4", "5w6", "121w4")

_COMBOS = {
    "5w4": (
        5, 4, 3,
        [
            (_F(-250, 3), (("eis", 4, 5),)),
            (_F(-10, 3), (("eis", 4, 1),)),
            (_F(13), (("e2s", 5), ("e2s", 5))),
        ],
    ),
    "7w4": (
        7, 4, 2,
        [
            (_F(-147, 2), (("eis", 4, 7),)),
            (_F(-3, 2), (("eis", 4, 1),)),
            (_F(5), (("e2s", 7), ("e2s", 7))),
        ],
    ),
    "5w6": (
        5, 6, 30,
        [
            (_F(521, 6), (("eis", 6, 5),)),
            (_F(-1, 30), (("eis", 6, 1),)),
            (_F(248), (("e2s", 5), ("eis", 4, 5))),
        ],
    ),
}

CM_CURVE = (0, -1, 1, -7, 10)  # y^2 + y = x^3 - x^2 - 7x + 10, conductor 121


def _atom_series(atom, n_max):
    if atom[0] == "eis":
        return _eis_shift(atom[1], atom[2], n_max)
    if atom[0] == "e2s":
        return e2star(atom[1], n_max)
    raise ValueError(atom)


def form_exact_series(form_id, n_max):
    """Rational-arithmetic q-expansion of a registered eigenform (reference path)."""
    if form_id == "121w4":
        a = cm_coefficients(CM_CURVE, 4, n_max)
        return PowerSeries([int(v) for v in a], 1)
    N, k, D, combo = _COMBOS[form_id]
    acc = PowerSeries([0] * (n_max + 1), 1)
    for c, atoms in combo:
        term = _atom_series(atoms[0], n_max)
        for atom in atoms[1:]:
            term = term * _atom_series(atom, n_max)
        acc = acc + term.scale(c)
    if acc.den != 1:
        raise ArithmeticError(f"not a normalized eigenform: {form_id} has non-integral coefficients")
    if acc.num[0] != 0 or acc.num[1] != 1:
        raise ArithmeticError(f"not a normalized eigenform: {form_id} not monic at q")
    return acc


# ---------------------------------------------------------------------------
# production (engine) path


def _eis_locs(scale_prime):
    """Local coefficients of sigma_1 with the Euler factor at one prime
    replaced by 1/(1-q^{-s}): the level-q weight-2 Eisenstein combination
    sigma_1(n) - q*sigma_1(n/q), which is multiplicative and u64-exact."""

    def locs(q, e_max):
        if q == scale_prime:
            return [1] * (e_max + 1)
        out = [1]
        s = 1
        t = 1
        for _ in range(e_max):
            t *= q
            s += t
            out.append(s)
        return out

    return locs


def _eis_channel(n_max, scale_prime, primes, mode):
    def large(qs):
        u = qs.astype(engine.U64) + engine.U64(1)
        return u, u % engine.U64(engine.M2)

    return engine.multiplicative_fill(
        n_max, _eis_locs(scale_prime), large, primes=primes, mode=mode
    )


_M2U = np.uint64(engine.M2)
_CHUNK = 1 << 24


def _scaled_sigma_channels(n_max, j, neg_scale, shift_prime, shift_scale, primes):
    """u64 and u32 channels of -neg_scale*sigma_j + shift_scale*(that)(n/q),
    built one channel at a time so only ~1.5 full-size arrays ever coexist."""
    # scales arrive signed; wrap/reduce here (u64 wrap and mod-M2 differ)
    cu = np.uint64((-neg_scale) & 0xFFFFFFFFFFFFFFFF)
    cm = np.uint64((-neg_scale) % engine.M2)
    su = np.uint64(shift_scale & 0xFFFFFFFFFFFFFFFF)
    sm = np.uint64(shift_scale % engine.M2)
    top = n_max // shift_prime

    gu = engine.sigma_channels(n_max, j, primes, mode="u").u
    gu *= cu
    gu[shift_prime:: shift_prime] += su * gu[1: top + 1]

    gm = engine.sigma_channels(n_max, j, primes, mode="m").m
    gm *= cm
    gm %= _M2U
    gm[shift_prime:: shift_prime] = (
        gm[shift_prime:: shift_prime] + sm * gm[1: top + 1]
    ) % _M2U
    gm32 = gm.astype(np.uint32)
    del gm
    return gu, gm32


def _add_scaled_exact(gu, gm32, src_u64, scale):
    """g += scale * src for an exact (unwrapped) nonneg u64 source."""
    cu = np.uint64(scale & 0xFFFFFFFFFFFFFFFF)
    cm = np.uint64(scale % engine.M2)
    for lo in range(0, len(gu), _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        gu[sl] += cu * src_u64[sl]
        gm32[sl] = ((gm32[sl] + cm * (src_u64[sl] % _M2U)) % _M2U).astype(np.uint32)


def _wrap_channels(gu, gm32, n_max):
    ch = engine.ChannelArray.__new__(engine.ChannelArray)
    ch.n_max = n_max
    ch.u = gu
    ch.m = gm32
    return ch


def _conv_block(n_max):
    # bigger blocks amortize the subquadratic big-int multiply, but the
    # per-block temporaries (~8x block bytes) must fit beside the channel
    # arrays; past ~1.2e8 terms those arrays already crowd the budget
    if n_max > 12 * 10 ** 7:
        return 1 << 21
    return 1 << 22


def _build_5w4(n_max):
    primes = engine.primes_numpy(n_max)
    # -250*s3(n/5) = 25 * (-10*s3)(n/5): fold the shift into the scaled array
    gu, gm32 = _scaled_sigma_channels(n_max, 3, 10, 5, 25, primes)
    T = _eis_channel(n_max, 5, primes, "u").u
    _add_scaled_exact(gu, gm32, T, 13)
    engine.conv_accumulate(gu, gm32, T, None, scale=39, block=_conv_block(n_max))
    del T
    return _wrap_channels(gu, gm32, n_max).finalize_int64(3)


def _build_7w4(n_max):
    primes = engine.primes_numpy(n_max)
    gu, gm32 = _scaled_sigma_channels(n_max, 3, 3, 7, 49, primes)
    U = _eis_channel(n_max, 7, primes, "u").u
    _add_scaled_exact(gu, gm32, U, 5)
    engine.conv_accumulate(gu, gm32, U, None, scale=10, block=_conv_block(n_max))
    del U
    return _wrap_channels(gu, gm32, n_max).finalize_int64(2)


# value = hi * 2^62 + lo for the wide (weight-6) coefficient layout
WIDE_SHIFT = 62


def _build_5w6(n_max):
    primes = engine.primes_numpy(n_max)
    # 2605*s5(n/5) = -2605 * (-s5)(n/5)
    gu, gm32 = _scaled_sigma_channels(n_max, 5, 1, 5, -2605, primes)

    # sigma_3(n/5) exceeds u64 past n ~ 1.2e7: recover it exactly as a wide
    # pair, then split into 32-bit halves so the products stay certified
    top = n_max // 5
    s3 = engine.sigma_channels(top, 3, engine.primes_numpy(top), mode="um")
    s3hi, s3lo = s3.finalize_wide(bound_bits=78)
    del s3
    X0 = np.zeros(n_max + 1, dtype=np.uint64)
    X1 = np.zeros(n_max + 1, dtype=np.uint64)
    X0[5:: 5] = (s3lo[1:] & np.int64(0xFFFFFFFF)).view(np.uint64)
    X1[5:: 5] = ((s3hi[1:] << 30) + (s3lo[1:] >> 32)).view(np.uint64)
    del s3hi, s3lo

    # 1240*X with X = X0 + 2^32*X1; 2^32 = 5 mod M2
    _add_scaled_exact(gu, gm32, X0, 1240)
    _add_scaled_exact(gu, gm32, X1, 1240 << 32)

    T = _eis_channel(n_max, 5, primes, "u").u
    _add_scaled_exact(gu, gm32, T, 31)
    engine.conv_accumulate(gu, gm32, T, X0, scale=7440, block=_conv_block(n_max))
    engine.conv_accumulate(gu, gm32, T, X1, scale=7440, shift_bits=32, block=_conv_block(n_max))
    del T, X0, X1

    hi, lo = _wrap_channels(gu, gm32, n_max).finalize_wide(divisor=30, bound_bits=88)
    out = np.empty((2, n_max + 1), dtype=np.int64)
    out[0] = hi
    out[1] = lo
    return out


def cm_coefficients(curve, k, n_max):
    """int64 a_n (index 0..n_max) of the weight-k CM form for the curve.

    Only the conductor-121 curve and k = 4 are wired up.
    """
    if tuple(curve) != CM_CURVE and curve != "121w4":
        raise NotImplementedError("unsupported CM curve")
    if k != 4:
        raise NotImplementedError("unsupported weight for CM lift")
    primes = engine.primes_numpy(n_max)

    def locs(q, e_max):
        if q == 11:
            # 11^2 divides the level: no q^3 term in the recursion, and
            # a_11 = 0 kills every higher power.
            return [1] + [0] * e_max
        aq = cm.aq_weight4(q)
        out = [1, aq]
        q3 = q ** 3
        for _ in range(e_max - 1):
            out.append(aq * out[-1] - q3 * out[-2])
        return out[: e_max + 1]

    def large(qs):
        aq = cm.prime_aq_table(qs)
        u = aq.astype(np.int64).view(np.uint64)
        m = np.mod(aq, engine.M2).astype(np.uint64)
        return u, m

    ch = engine.multiplicative_fill(n_max, locs, large, primes=primes)
    return ch.finalize_int64(1)


_ENGINE_BUILDERS = {
    "5w4": _build_5w4,
    "7w4": _build_7w4,
    "5w6": _build_5w6,
    "121w4": lambda n: cm_coefficients(CM_CURVE, 4, n),
}

_RAMANUJAN_CHECK_PRIMES = (2, 3, 5, 7, 11, 13, 97)


def wide_value(a, n):
    """Exact int from row n of a (2, n+1) hi/lo pair array."""
    return (int(a[0, n]) << WIDE_SHIFT) + int(a[1, n])


class Form:
    """A registered eigenform with a cached integer coefficient array.

    `a` is int64 indexed by n, except weight-6 builds past the int64 wall
    (~n^2.5 growth) store a (2, n+1) hi/lo pair with a_n = hi*2^62 + lo.
    """

    __slots__ = ("form_id", "level", "weight", "source", "a")

    def __init__(self, form_id, level, weight, source, a):
        self.form_id = form_id
        self.level = level
        self.weight = weight
        self.source = source
        self.a = a
        self._check_invariants()

    def _check_invariants(self):
        if self.coeff(0) != 0 or (self.n_max >= 1 and self.coeff(1) != 1):
            raise ArithmeticError("not a normalized eigenform: a_1 != 1")
        k = self.weight
        for q in _RAMANUJAN_CHECK_PRIMES:
            if q > self.n_max or self.level % q == 0:
                continue
            if self.coeff(q) ** 2 > 4 * q ** (k - 1):
                raise ArithmeticError(f"coefficient bound violated at q={q}")

    @property
    def n_max(self):
        return self.a.shape[-1] - 1

    @property
    def wide(self):
        return self.a.ndim == 2

    def coeff(self, n):
        if self.a.ndim == 2:
            return wide_value(self.a, n)
        return int(self.a[n])

    def ensure(self, n_max):
        """Return a Form with coefficients through n_max (rebuilds if short)."""
        if self.n_max >= n_max:
            return self
        return build_form(self.form_id, n_max)

    def prime_coeffs(self, primes):
        """a_q for a numpy vector of primes, not bounded by n_max.

        Wide forms return the (2, len) hi/lo pair; else a plain int64 array.
        """
        if self.form_id == "121w4":
            inside = primes <= self.n_max
            if inside.all():
                return self.a[primes]
            return cm.prime_aq_table(primes)
        if (primes > self.n_max).any():
            raise ValueError("prime exceeds cached range; rebuild the form")
        if self.a.ndim == 2:
            return self.a[:, primes]
        return self.a[primes]

    def __repr__(self):
        return f"Form({self.form_id}, N={self.level}, k={self.weight}, n_max={self.n_max})"


def build_form(spec, n_max):
    """Build a registered eigenform ("5w4" | "7w4" | "5w6" | "121w4")."""
    form_id = str(spec)
    if form_id not in _ENGINE_BUILDERS:
        raise KeyError(f"unknown form id {form_id!r}; known: {FORM_IDS}")
    from . import cache

    a = cache.cached_coefficients(form_id, n_max, _ENGINE_BUILDERS[form_id])
    if form_id == "121w4":
        level, weight, source = 121, 4, CM_CURVE
    else:
        level, weight, D, combo = _COMBOS[form_id]
        source = combo
    return Form(form_id, level, weight, source, a)


def twisted_dirichlet_coeffs(form, rep, n_max):
    """b_n of L(f, rep, s) = sum b_n n^{-s}, via local inverse factors.

    Small primes run through the exact local polynomial; primes > sqrt(n_max)
    use the closed-form linear coefficient, vectorized by splitting type.
    Output is int64, or a (2, n+1) hi/lo pair once weight-6 values can pass
    the int64 wall.
    """
    from . import lfunc  # deferred: lfunc imports this module's Form

    form = form.ensure(n_max)
    primes = engine.primes_numpy(n_max)

    def locs(q, e_max):
        poly = lfunc.twisted_euler_factor(form, rep, q)
        inv = poly.inverse_coeffs(e_max + 1)
        out = []
        for c in inv:
            if c.denominator != 1:
                raise ArithmeticError(f"non-integral twisted coefficient at q={q}")
            out.append(c.numerator)
        return out

    def large(qs):
        return lfunc.twisted_l1_channels(form, rep, qs)

    ch = engine.multiplicative_fill(n_max, locs, large, primes=primes)
    if form.weight >= 6 and n_max > 10 ** 6:
        hi, lo = ch.finalize_wide(bound_bits=95)
        out = np.empty((2, n_max + 1), dtype=np.int64)
        out[0] = hi
        out[1] = lo
        return out
    return ch.finalize_int64(1)
