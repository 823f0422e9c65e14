"""Smoothed approximate-functional-equation sums for degree-2 (Gamma(s))
and degree-4 (Gamma(s)^2) completed L-functions.

Everything reduces to inner sums

    T(s, t) = sum_n b_n (A/n)^s G_s(n t / A),     A = sqrt(N) / (2 pi)^d,

where G_s is the incomplete Mellin transform of the Gamma(s)^d kernel:
d=1: G_s(x) = Gamma(s, x); d=2: G_s(x) = 4^{1-s} A_{2s-1}(2 sqrt x) with
A_a(y) = int_y^oo K_0(v) v^a dv = P(y) K_0(y) + Q(y) K_1(y) for odd a.
The completed function is Lambda(s) = T(s, t) + w T(k-s, 1/t) for every
t > 0.

Integer-s sums run in two zones split at a precision threshold on
y = 2 sqrt(nt/A): below it, per-term mpfr evaluation against a cached
logarithmic grid of Taylor expansions of (K_0, K_1); above it, a numpy
float64 pass using the large-y asymptotic series.  Terms with b_n = 0
are skipped outright, which is most of them for the sparse twists.
"""

import json
import math
import os
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpfr

GUARD_BITS = 24
F64_SAFE_BITS = 40
DEG_MAX = 50
_GRID_RATIO = Fraction(257, 256)
_LN_RATIO = math.log(257 / 256)
_LN_C0 = math.log(1 / 256)

TWO_PI = None  # set lazily at need


def bits_for_digits(digits):
    return int(digits * 3.3220) + 1


# ---------------------------------------------------------------------------
# weight polynomials: A_{2s-1}(y) = y^2 p_s(y^2) K0(y) + y q_s(y^2) K1(y)

_PQ_CACHE = {}


def pq_lists(s):
    """Integer coefficient lists (p, q) with
    A_{2s-1}(y) = K0 * sum p[i] y^{2i+2} + K1 * sum q[i] y^{2i+1}."""
    if s in _PQ_CACHE:
        return _PQ_CACHE[s]
    # P_1 = 0, Q_1 = y; step: P_j = (2j-2)^2 P_{j-1} + (2j-2) y^{2j-2},
    #                         Q_j = (2j-2)^2 Q_{j-1} + y^{2j-1}
    p = []  # coefficient of y^{2i+2}, i = 0..
    q = [1]  # coefficient of y^{2i+1}
    for j in range(2, s + 1):
        c = (2 * j - 2) ** 2
        p = [c * v for v in p]
        q = [c * v for v in q]
        while len(p) < j - 1:
            p.append(0)
        while len(q) < j:
            q.append(0)
        p[j - 2] += 2 * j - 2
        q[j - 1] += 1
    _PQ_CACHE[s] = (tuple(p), tuple(q))
    return _PQ_CACHE[s]


# ---------------------------------------------------------------------------
# K0/K1 seeds on the logarithmic center grid

def _k01_ascending(y, prec):
    """(K0(y), K1(y)) by the ascending series; y an mpfr.

    Cancellation costs ~2y/ln2 bits, so run at elevated precision.
    """
    extra = int(2.9 * float(y)) + 30
    with gmpy2.context(precision=prec + extra):
        yy = +y
        u = yy * yy / 4
        one = mpfr(1)
        I0 = one
        S = mpfr(0)
        H = mpfr(0)
        t = one
        j = 1
        lim = mpfr(2) ** (-(prec + extra) - 4)
        while True:
            t = t * u / (j * j)
            H += one / j
            S += t * H
            I0 += t
            if t < lim and j > 2:
                break
            j += 1
        K0 = S - (gmpy2.log(yy / 2) + gmpy2.const_euler()) * I0
        t = one
        I1 = one
        j = 1
        while True:
            t = t * u / (j * (j + 1))
            I1 += t
            if t < lim and j > 2:
                break
            j += 1
        I1 = I1 * yy / 2
        K1 = (1 / yy - I1 * K0) / I0  # Wronskian I0 K1 + I1 K0 = 1/y
    with gmpy2.context(precision=prec):
        return +K0, +K1


def _k01_asymptotic(y, prec):
    """(K0, K1) by the large-y expansion; valid when 2.885 y >> prec."""
    with gmpy2.context(precision=prec + 16):
        yy = +y
        pref = gmpy2.sqrt(gmpy2.const_pi() / (2 * yy)) * gmpy2.exp(-yy)
        lim = mpfr(2) ** (-(prec + 8))
        out = []
        for nu in (0, 1):
            m = mpfr(1)
            tot = mpfr(1)
            j = 1
            while True:
                m = m * (4 * nu * nu - (2 * j - 1) ** 2) / (8 * j * yy)
                tot += m
                if abs(m) < lim:
                    break
                if j > 4 * float(yy):
                    raise ArithmeticError("asymptotic series floor too high")
                j += 1
            out.append(pref * tot)
    with gmpy2.context(precision=prec):
        return +out[0], +out[1]


class CenterGrid:
    """Logarithmic grid c_i = (1/256) (257/256)^i with cached K0/K1 seeds
    and per-precision Taylor tables."""

    def __init__(self, chain_bits):
        self.chain_bits = chain_bits
        self.seeds = {}
        self.tables = {}
        self._load_disk()

    def _cache_path(self):
        d = os.environ.get("LCONG_CACHE_DIR")
        if not d:
            d = os.path.join(os.path.expanduser("~"), ".cache", "lcong")
        return os.path.join(d, f"k01_grid_{self.chain_bits}.json")

    def _load_disk(self):
        try:
            with open(self._cache_path()) as fh:
                raw = json.load(fh)
            with gmpy2.context(precision=self.chain_bits + 8):
                for key, vals in raw.items():
                    m0, e0, m1, e1 = vals
                    k0 = gmpy2.mul_2exp(mpfr(gmpy2.mpz(m0), self.chain_bits), e0) if e0 >= 0 \
                        else gmpy2.div_2exp(mpfr(gmpy2.mpz(m0), self.chain_bits), -e0)
                    k1 = gmpy2.mul_2exp(mpfr(gmpy2.mpz(m1), self.chain_bits), e1) if e1 >= 0 \
                        else gmpy2.div_2exp(mpfr(gmpy2.mpz(m1), self.chain_bits), -e1)
                    self.seeds[int(key)] = (k0, k1)
            self._n_loaded = len(self.seeds)
        except (OSError, ValueError):
            self._n_loaded = 0

    def save_disk(self):
        if len(self.seeds) == getattr(self, "_n_loaded", 0):
            return
        try:
            path = self._cache_path()
            os.makedirs(os.path.dirname(path), exist_ok=True)
            raw = {}
            for i, (k0, k1) in self.seeds.items():
                m0, e0 = k0.as_mantissa_exp()
                m1, e1 = k1.as_mantissa_exp()
                raw[str(i)] = (str(m0), int(e0), str(m1), int(e1))
            with open(path, "w") as fh:
                json.dump(raw, fh)
            self._n_loaded = len(self.seeds)
        except OSError:
            pass

    def center(self, i):
        with gmpy2.context(precision=self.chain_bits):
            return mpfr(1, self.chain_bits) / 256 * (mpfr(257) / 256) ** i

    @staticmethod
    def index_for(y_float):
        return max(0, int(round((math.log(y_float) - _LN_C0) / _LN_RATIO)))

    def seed(self, i):
        if i in self.seeds:
            return self.seeds[i]
        c = self.center(i)
        if 2.885 * float(c) >= self.chain_bits + 40:
            k01 = _k01_asymptotic(c, self.chain_bits)
        else:
            k01 = _k01_ascending(c, self.chain_bits)
        self.seeds[i] = k01
        return k01

    def table(self, i, prec):
        """(c, a_coeffs[K0 Taylor], deg_eff, hi_boundary_float) at working
        precision prec.  K1 coefficients are derived in the evaluator from
        b_j = -(j+1) a_{j+1}."""
        key = (i, prec)
        tab = self.tables.get(key)
        if tab is not None:
            return tab
        K0, K1 = self.seed(i)
        build_prec = prec + 24
        with gmpy2.context(precision=build_prec):
            c = self.center(i)
            a = [+K0, -K1]
            for j in range(DEG_MAX - 1):
                am1 = a[j - 1] if j >= 1 else mpfr(0)
                a.append(
                    (-((j + 1) ** 2) * a[j + 1] + c * a[j] + am1)
                    / (c * (j + 2) * (j + 1))
                )
            # effective degree: strip tail terms below 2^-(prec+6) * |K0|
            dmax = float(c) * (1 / 512.0) * 1.02
            floor = abs(K0) * mpfr(2) ** (-(prec + 6))
            deg = len(a)
            while deg > 8 and abs(a[deg - 1]) * mpfr(dmax) ** (deg - 1) < floor:
                deg -= 1
        hi = float(c) * (1 + 1 / 512.0)
        tab = (c, a[:deg + 1], hi)
        self.tables[key] = tab
        # keep the table cache bounded; families revisit nearby centers
        if len(self.tables) > 12000:
            self.tables.clear()
            self.tables[key] = tab
        return tab


_GRIDS = {}


def get_grid(chain_bits):
    g = _GRIDS.get(chain_bits)
    if g is None:
        g = CenterGrid(chain_bits)
        _GRIDS[chain_bits] = g
    return g


# ---------------------------------------------------------------------------
# zone planning

def plan_tail(A, t, k, s_list, work_bits):
    """y_end such that the neglected tail is comfortably below 2^-work_bits
    relative to the leading terms, and the matching n_max."""
    s_min = min(s_list)
    s_max = max(s_list)
    c1 = 2 * s_max - 1.5
    c2 = (k - 1) / 2 + 0.45 - s_min + 1.0
    y = 0.6931 * (work_bits + 10)
    for _ in range(8):
        n_here = max(2.0, y * y * A / (4 * t))
        y = 0.6931 * (work_bits + 10) + c1 * math.log(max(y, 3.0)) + max(0.0, c2 * math.log(n_here)) + abs(s_max * math.log(t))
    n_max = int(y * y * A / (4 * t)) + 1
    return y, n_max


def f64_boundary(C, work_bits):
    """First n handled by the float64 zone."""
    y_lo = (work_bits - F64_SAFE_BITS) / 1.4427
    if y_lo <= 0:
        return 1
    return int((y_lo / C) ** 2) + 1


# ---------------------------------------------------------------------------
# mpfr zone

def _band_prec(y, work_bits):
    p = work_bits - int(1.4427 * y) + 32
    return max(64, ((p + 63) // 64) * 64)


def mpfr_zone_sums(idx, bvals, C_hi, s_list, work_bits, grid):
    """sum over n in idx of b_n * A_{2s-1}(y_n) / y_n^{2s} for each s,
    with y_n = C sqrt(n).  Returns {s: mpfr} at work_bits + 16."""
    acc_prec = work_bits + 16
    acc = {s: mpfr(0, acc_prec) for s in s_list}
    if len(idx) == 0:
        return acc
    s_sorted = sorted(s_list)
    pq = {s: pq_lists(s) for s in s_sorted}
    saved_ctx = gmpy2.get_context()
    cur_i = -1
    c = None
    a = None
    hi = 0.0
    sub = None
    Cf = float(C_hi)

    def flush():
        nonlocal sub
        if sub is None:
            return
        with gmpy2.context(precision=acc_prec):
            for s in s_sorted:
                acc[s] = acc[s] + sub[s]
        sub = None

    n_arr = idx
    b_arr = bvals
    wide = b_arr.ndim == 2
    for pos in range(len(n_arr)):
        n = int(n_arr[pos])
        if wide:
            b = (int(b_arr[0, pos]) << 62) + int(b_arr[1, pos])
        else:
            b = int(b_arr[pos])
        y_f = Cf * math.sqrt(n)
        if y_f > hi:
            flush()
            i = CenterGrid.index_for(y_f)
            if i <= cur_i:
                i = cur_i + 1
            new_prec = _band_prec(y_f, work_bits)
            c, a, hi = grid.table(i, new_prec)
            cur_i = i
            prec = new_prec
            gmpy2.set_context(gmpy2.context(precision=prec))
            sub = {s: mpfr(0) for s in s_sorted}
        y = mpfr(C_hi) * gmpy2.sqrt(mpfr(n))
        d = y - mpfr(c)
        deg = len(a) - 1
        K0 = a[deg]
        j = deg
        while j > 0:
            j -= 1
            K0 = K0 * d + a[j]
        K1 = mpfr((deg)) * a[deg]
        j = deg
        while j > 1:
            j -= 1
            K1 = K1 * d + j * a[j]
        K1 = -K1  # K1 = -K0'
        z = y * y
        zinv = 1 / z
        pw = mpfr(1)
        last_s = 0
        yK1 = y * K1
        zK0 = z * K0
        for s in s_sorted:
            while last_s < s:
                pw = pw * zinv
                last_s += 1
            p_c, q_c = pq[s]
            # p(z), q(z) integer Horner
            pv = mpfr(p_c[-1]) if p_c else mpfr(0)
            for cc in reversed(p_c[:-1]):
                pv = pv * z + cc
            qv = mpfr(q_c[-1])
            for cc in reversed(q_c[:-1]):
                qv = qv * z + cc
            sub[s] = sub[s] + b * ((pv * zK0 + qv * yK1) * pw)
    flush()
    gmpy2.set_context(saved_ctx)
    return acc


# ---------------------------------------------------------------------------
# float64 zone

def _two_prod(a, b):
    p = a * b
    SPLIT = 134217729.0
    ca = a * SPLIT
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = b * SPLIT
    bhi = cb - (cb - b)
    blo = b - bhi
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def _asym_coeffs(nu, J):
    out = [1.0]
    m = 1.0
    for j in range(1, J + 1):
        m *= (4 * nu * nu - (2 * j - 1) ** 2) / (8.0 * j)
        out.append(m)
    return np.array(out)


def f64_zone_sums(n_arr, b_arr, C_hi, C_lo, s_list, work_bits):
    """Asymptotic-series float64 pass.  Returns {s: float} partial sums of
    b_n A_{2s-1}(y_n) / y_n^{2s}; caller adds into the mpfr accumulator."""
    s_sorted = sorted(s_list)
    pq = {s: pq_lists(s) for s in s_sorted}
    J = 18
    c0 = _asym_coeffs(0, J)
    c1 = _asym_coeffs(1, J)
    totals = {s: [] for s in s_sorted}
    BLOCK = 1 << 16
    wide = b_arr.ndim == 2
    for lo in range(0, len(n_arr), BLOCK):
        n = n_arr[lo: lo + BLOCK].astype(np.float64)
        if wide:
            sl = slice(lo, lo + BLOCK)
            b = b_arr[0, sl].astype(np.float64) * 4611686018427387904.0 \
                + b_arr[1, sl].astype(np.float64)
        else:
            b = b_arr[lo: lo + BLOCK].astype(np.float64)
        # y = C sqrt(n) in double-double, for the exponential only
        shi = np.sqrt(n)
        p, e = _two_prod(shi, shi)
        slo = ((n - p) - e) / (2.0 * shi)
        yp, ye = _two_prod(C_hi, shi)
        ye = ye + (C_hi * slo + C_lo * shi)
        yhi = yp + ye
        ylo = ye - (yhi - yp)
        E = np.exp(-yhi) * (1.0 - ylo)
        u = 1.0 / yhi
        S0 = np.polynomial.polynomial.polyval(u, c0)
        S1 = np.polynomial.polynomial.polyval(u, c1)
        pref = E * np.sqrt(np.pi * 0.5 * u)
        K0 = pref * S0
        K1 = pref * S1
        z = yhi * yhi
        zinv = u * u
        pw = np.ones_like(z)
        last_s = 0
        zK0 = z * K0
        yK1 = yhi * K1
        for s in s_sorted:
            while last_s < s:
                pw = pw * zinv
                last_s += 1
            p_c, q_c = pq[s]
            pv = np.polynomial.polynomial.polyval(z, np.array(p_c, dtype=np.float64)) if p_c else 0.0
            qv = np.polynomial.polynomial.polyval(z, np.array(q_c, dtype=np.float64))
            w = (pv * zK0 + qv * yK1) * pw
            # blockwise dot keeps the sequential-sum error below ~2^-40
            totals[s].append(float(np.dot(b, w)))
    return {s: math.fsum(v) for s, v in totals.items()}


# ---------------------------------------------------------------------------
# assembled inner sums

def inner_sums(b, A_hi, t_frac, s_list, work_bits, k):
    """T(s,t)/(4 t^s) inner sums: {s: sum b_n A_{2s-1}(y_n) y_n^{-2s}}.

    b: int64 array indexed by n (b[0] ignored).  A_hi: mpfr at high prec.
    t_frac: Fraction.  Returns {s: mpfr at work_bits+16}.
    """
    with gmpy2.context(precision=work_bits + 40):
        t_m = mpfr(t_frac.numerator) / t_frac.denominator
        C = 2 * gmpy2.sqrt(t_m / A_hi)
        C_hi_f = float(C)
        C_lo_f = float(C - C_hi_f)
    A_f = float(A_hi)
    t_f = float(t_frac)
    y_end, n_max = plan_tail(A_f, t_f, k, s_list, work_bits)
    have = b.shape[-1] - 1
    if n_max > have:
        raise ValueError(
            f"need {n_max} coefficients, have {have}"
        )
    n_split = min(f64_boundary(float(C), work_bits), n_max + 1)
    if b.ndim == 2:
        mask = (b[0, 1: n_max + 1] != 0) | (b[1, 1: n_max + 1] != 0)
        nz = np.nonzero(mask)[0]
    else:
        nz = np.nonzero(b[1: n_max + 1])[0]
    nz += 1
    split_pos = int(np.searchsorted(nz, n_split))
    grid = get_grid(work_bits + 40)
    head, tail_idx = nz[:split_pos], nz[split_pos:]
    bh = b[..., head] if b.ndim == 2 else b[head]
    bt = b[..., tail_idx] if b.ndim == 2 else b[tail_idx]
    acc = mpfr_zone_sums(head, bh, C, s_list, work_bits, grid)
    tail = f64_zone_sums(tail_idx, bt, C_hi_f, C_lo_f, s_list, work_bits)
    with gmpy2.context(precision=work_bits + 16):
        for s in s_list:
            acc[s] = acc[s] + mpfr(tail[s])
    grid.save_disk()
    return acc


def t_sums(b, A_hi, t_frac, s_list, work_bits, k):
    """Full T(s, t) = 4 t^s * inner sums."""
    inner = inner_sums(b, A_hi, t_frac, s_list, work_bits, k)
    out = {}
    with gmpy2.context(precision=work_bits + 16):
        t_m = mpfr(t_frac.numerator) / t_frac.denominator
        for s in s_list:
            out[s] = 4 * t_m ** s * inner[s]
    return out


def solve_w(T_s0_t, T_s0_it, T_k0_t, T_k0_it):
    """w from Lambda(s) = T(s,t) + w T(k-s,1/t) evaluated at two t-values."""
    num = T_s0_t - T_s0_it
    den = T_k0_t - T_k0_it
    return num / den


# ---------------------------------------------------------------------------
# degree-1 (Gamma(s)) sums, for the untwisted form and oracle checks

def t_sums_d1(a, A_hi, t_frac, s_list, work_bits):
    """T1(s,t) = sum a_n (A/n)^s Gamma(s, n t / A) for integer s >= 1."""
    out = {}
    with gmpy2.context(precision=work_bits + 16):
        t_m = mpfr(t_frac.numerator) / t_frac.denominator
        A = +A_hi
        x_end = 0.6931 * (work_bits + 10) + 12 * math.log(work_bits + 10.0)
        n_max = int(x_end / float(t_m) * float(A)) + 2
        have = np.asarray(a).shape[-1] - 1
        if n_max > have:
            raise ValueError(f"need {n_max} coefficients, have {have}")
        wide = getattr(a, "ndim", 1) == 2
        facts = {s: math.factorial(s - 1) for s in s_list}
        acc = {s: mpfr(0) for s in s_list}
        for n in range(1, n_max + 1):
            an = (int(a[0, n]) << 62) + int(a[1, n]) if wide else int(a[n])
            if an == 0:
                continue
            x = n * t_m / A
            ex = gmpy2.exp(-x)
            # Gamma(s,x) = (s-1)! e^-x sum_{i<s} x^i/i!
            for s in s_list:
                tot = mpfr(1)
                term = mpfr(1)
                for i in range(1, s):
                    term = term * x / i
                    tot += term
                acc[s] += an * (A / n) ** s * (facts[s] * ex * tot)
        for s in s_list:
            out[s] = acc[s]
    return out


# ---------------------------------------------------------------------------
# generic real-s kernel for functional-equation spot checks (slow path)

def g_kernel_generic(s, x, digits):
    """G_s(x) for d=2 at real s > 0 via the ascending series (mpmath)."""
    import mpmath as mp

    y = 2 * math.sqrt(float(x))
    extra = int(0.87 * y) + 12
    with mp.workdps(digits + extra):
        s = mp.mpf(s)
        x = mp.mpf(x)
        gg = mp.gamma(s) ** 2
        lx = mp.log(x)
        tot = mp.mpf(0)
        j = 0
        while True:
            a = s + j
            t = x ** a / mp.factorial(j) ** 2 * (2 * mp.psi(0, j + 1) / a + 1 / a ** 2 - lx / a)
            tot += t
            if j > 4 and abs(t) < mp.mpf(10) ** (-(digits + extra + 6)) * max(1, abs(tot)):
                break
            j += 1
            if j > 4000:
                raise ArithmeticError("ascending series did not settle")
        val = gg - tot
    return mp.mpf(val)
