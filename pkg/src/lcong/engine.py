"""Large-scale exact integer pipelines: prime sieve, multiplicative fill,
Kronecker-substitution products, and dual-channel (mod 2^64, mod m2)
certification.

The working representation for big coefficient arrays is a pair of numpy
channels: values mod 2^64 (uint64, wrap semantics are exactly ring
arithmetic) and values mod M2 (a 32-bit prime, stored in uint64).  A final
value g with |g| < 2^63 is recovered by bitcasting the uint64 channel to
int64; the M2 channel then certifies that no true value escaped the int64
range (any escape makes the two channels disagree, since |g| stays far
below 2^63 * M2).
"""

import numpy as np
from math import isqrt

M2 = 4294967291  # largest prime < 2^32
_R64_MOD_M2 = pow(2, 64, M2)

U64 = np.uint64


def primes_numpy(n):
    """int64 array of primes <= n; plain odd-only sieve."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    if n < 5:
        return np.array([2, 3][: 1 + (n >= 3)], dtype=np.int64)
    half = (n - 1) // 2  # odd numbers 3,5,...  index i <-> 2i+3
    sieve = np.ones(half, dtype=bool)
    for i in range((isqrt(n) - 1) // 2):
        if sieve[i]:
            q = 2 * i + 3
            start = (q * q - 3) // 2
            sieve[start::q] = False
    odds = 2 * np.nonzero(sieve)[0] + 3
    return np.concatenate(([2], odds)).astype(np.int64)


class ChannelArray:
    """Dual-modulus coefficient array, index 0..n_max."""

    __slots__ = ("u", "m", "n_max")

    def __init__(self, n_max):
        self.n_max = n_max
        self.u = np.zeros(n_max + 1, dtype=U64)
        self.m = np.zeros(n_max + 1, dtype=U64)

    def set_exact(self, idx, value):
        self.u[idx] = U64(value & 0xFFFFFFFFFFFFFFFF)
        self.m[idx] = U64(value % M2)

    def add_scaled(self, c, other, shift=1):
        """self += c * other[n/shift] (only where shift | n); c exact int."""
        cu = U64(c & 0xFFFFFFFFFFFFFFFF)
        cm = U64(c % M2)
        if shift == 1:
            self.u += cu * other.u
            self.m = (self.m + cm * other.m) % U64(M2)
        else:
            top = self.n_max // shift
            self.u[shift:: shift] += cu * other.u[1: top + 1]
            self.m[shift:: shift] = (
                self.m[shift:: shift] + cm * other.m[1: top + 1]
            ) % U64(M2)

    # finalize works in 2^24-entry chunks: full-size temporaries would double
    # the footprint of a 10^8-term fill
    _CHUNK = 1 << 24

    def finalize_int64(self, divisor=1):
        """Recover exact int64 values; certify against the M2 channel.

        Entries whose true value exceeds int64 are CRT-lifted through
        python ints (they must still be < 2^63 after the divisor split,
        or we raise).  Consumes the channels: the returned array owns the
        main buffer and self is left empty.
        """
        g = self.u.view(np.int64)
        bad = []
        for lo in range(0, len(g), self._CHUNK):
            sl = slice(lo, lo + self._CHUNK)
            okb = (g[sl] % np.int64(M2)).astype(U64) == self.m[sl]
            if not okb.all():
                bad.extend((lo + np.nonzero(~okb)[0]).tolist())
        mod = (1 << 64) * M2
        for i in bad:
            r1 = int(self.u[i])
            r2 = int(self.m[i])
            t = (r2 - r1) * pow(1 << 64, -1, M2) % M2
            val = r1 + (t << 64)
            if val > mod // 2:
                val -= mod
            q, r = divmod(val, divisor)
            if r != 0:
                raise ArithmeticError(f"coefficient at n={i} not divisible by {divisor}")
            if not (-(1 << 63) <= q < (1 << 63)):
                raise OverflowError(f"coefficient at n={i} exceeds int64")
            # patch so the vector division below is uniform
            self.u[i] = U64((q * divisor) & 0xFFFFFFFFFFFFFFFF)
        self.m = None  # certified; drop the check channel before dividing
        if divisor != 1:
            dv = np.int64(divisor)
            for lo in range(0, len(g), self._CHUNK):
                sl = slice(lo, lo + self._CHUNK)
                if (g[sl] % dv).any():
                    n_bad = lo + int(np.nonzero(g[sl] % dv)[0][0])
                    raise ArithmeticError(
                        f"not a normalized eigenform: coefficient at n={n_bad} "
                        f"not divisible by {divisor}"
                    )
                g[sl] //= dv
        self.u = None
        return g

    def finalize_wide(self, divisor=1, bound_bits=90):
        """Recover exact values as an int64 pair (hi, lo), value = hi*2^62 + lo.

        Covers |value| < 2^95 via balanced CRT of the two channels.  Unlike
        finalize_int64 there is no redundancy left to certify against, so
        callers must have an a-priori bound; bound_bits is enforced on every
        entry.  Consumes the channels.
        """
        if self.u is None or self.m is None:
            raise ValueError("wide finalize needs both channels")
        inv = pow(1 << 64, -1, M2)
        half = (M2 >> 1) + 1
        mask62 = U64((1 << 62) - 1)
        hi_cap = 1 << max(0, bound_bits - 62)
        lo_out = self.u.view(np.int64)  # rewritten in place, chunk by chunk
        hi_out = np.empty(len(lo_out), dtype=np.int64)
        for s in range(0, len(lo_out), self._CHUNK):
            sl = slice(s, s + self._CHUNK)
            u = self.u[sl]
            # t = (m - u) / 2^64 mod M2; both mulmod factors < 2^32, exact in u64
            diff = (self.m[sl].astype(U64) + U64(M2) - u % U64(M2)) % U64(M2)
            t = (diff * U64(inv)) % U64(M2)
            # balanced representative: value = u + t*2^64 - [t >= M2/2]*(M2*2^64)
            neg = t >= U64(half)
            lo62 = u & mask62
            hi = (t.astype(np.int64) << 2) + (u >> U64(62)).astype(np.int64)
            hi[neg] -= M2 << 2
            if divisor != 1:
                # (hi*2^62 + lo62)/d in 31-bit stages; only q1 carries sign
                q1, r1 = np.divmod(hi, divisor)
                t1 = (r1 << 31) + (lo62 >> U64(31)).astype(np.int64)
                qa, ra = np.divmod(t1, divisor)
                t2 = (ra << 31) + (lo62 & U64(0x7FFFFFFF)).astype(np.int64)
                qb, rb = np.divmod(t2, divisor)
                if rb.any():
                    n_bad = s + int(np.nonzero(rb)[0][0])
                    raise ArithmeticError(
                        f"not a normalized eigenform: coefficient at n={n_bad} "
                        f"not divisible by {divisor}"
                    )
                combined = (qa << 31) + qb
                hi = q1 + (combined >> 62)
                lo62 = (combined & np.int64((1 << 62) - 1)).view(np.uint64)
            if (np.abs(hi) >= hi_cap).any():
                n_bad = s + int(np.nonzero(np.abs(hi) >= hi_cap)[0][0])
                raise OverflowError(
                    f"coefficient at n={n_bad} exceeds 2^{bound_bits}"
                )
            lo_out[sl] = lo62.view(np.int64)
            hi_out[sl] = hi
        self.m = None
        self.u = None
        return hi_out, lo_out


def multiplicative_fill(n_max, local_coeffs, large_l1=None, primes=None, mode="um"):
    """Fill b[0..n_max] with the multiplicative function defined by
    b[q^e * j] = l_e(q) * b[j] for j coprime to q, b[1] = 1.

    local_coeffs(q, e_max) -> list of exact ints [l_0=1, l_1, ..., l_emax],
    used for primes q <= sqrt(n_max) (and all primes when large_l1 is None).

    large_l1(q_array) -> (u64 array, m2 array) of l_1 values for a vector
    of primes > sqrt(n_max); enables the batched cofactor pass.

    mode: "um" fills both channels; "u" or "m" fills one, leaving the other
    None -- at 10^8 terms the second channel is worth 0.8-1.6 GB.

    Returns a ChannelArray.
    """
    if primes is None:
        primes = primes_numpy(n_max)
    want_u = "u" in mode
    want_m = "m" in mode
    b = ChannelArray.__new__(ChannelArray)
    b.n_max = n_max
    b.u = np.zeros(n_max + 1, dtype=U64) if want_u else None
    b.m = np.zeros(n_max + 1, dtype=U64) if want_m else None
    if n_max < 1:
        return b
    if want_u:
        b.u[1] = 1
    if want_m:
        b.m[1] = 1
    root = isqrt(n_max)
    m2 = U64(M2)

    n_small = int(np.searchsorted(primes, root, side="right"))
    for q in primes[:n_small]:
        q = int(q)
        e_max = 0
        qe = 1
        while qe * q <= n_max:
            qe *= q
            e_max += 1
        ls = local_coeffs(q, e_max)
        qe = 1
        for e in range(1, e_max + 1):
            qe *= q
            lu = U64(ls[e] & 0xFFFFFFFFFFFFFFFF)
            lm = U64(ls[e] % M2)
            top = n_max // qe
            # rhs materializes before the strided store, so aliasing is safe
            if want_u:
                b.u[qe:: qe] = lu * b.u[1: top + 1]
            if want_m:
                b.m[qe:: qe] = (lm * b.m[1: top + 1]) % m2

    large = primes[n_small:]
    if len(large) == 0:
        return b
    if large_l1 is None:
        for q in large:
            q = int(q)
            ls = local_coeffs(q, 1)
            lu = U64(ls[1] & 0xFFFFFFFFFFFFFFFF)
            lm = U64(ls[1] % M2)
            top = n_max // q
            if want_u:
                b.u[q:: q] = lu * b.u[1: top + 1]
            if want_m:
                b.m[q:: q] = (lm * b.m[1: top + 1]) % m2
        return b

    l1u, l1m = large_l1(large)
    l1u = l1u.astype(U64, copy=False) if want_u else None
    l1m = l1m.astype(U64, copy=False) if want_m else None
    j_max = n_max // int(large[0])
    for j in range(1, j_max + 1):
        c = int(np.searchsorted(large, n_max // j, side="right"))
        if c == 0:
            continue
        idx = large[:c] * j
        if want_u:
            b.u[idx] = l1u[:c] * b.u[j]
        if want_m:
            b.m[idx] = (l1m[:c] * b.m[j]) % m2
    return b


def sigma_channels(n_max, j, primes=None, mode="um"):
    """Divisor power sums sigma_j(1..n_max) as a ChannelArray."""

    def locs(q, e_max):
        out = [1]
        s = 1
        qj = q ** j
        t = 1
        for _ in range(e_max):
            t *= qj
            s += t
            out.append(s)
        return out

    def large(qs):
        qs_u = qs.astype(U64)
        u = U64(1) + _vec_pow_u64(qs_u, j)
        m = (U64(1) + _vec_pow_mod(qs_u, j, M2)) % U64(M2)
        return u, m

    return multiplicative_fill(n_max, locs, large, primes=primes, mode=mode)


def _vec_pow_u64(x, j):
    out = np.ones_like(x)
    base = x.copy()
    e = j
    while e:
        if e & 1:
            out = out * base
        base = base * base
        e >>= 1
    return out


def _vec_pow_mod(x, j, mod):
    mod_u = U64(mod)
    out = np.ones_like(x)
    base = x % mod_u
    e = j
    while e:
        if e & 1:
            out = (out * base) % mod_u
        base = (base * base) % mod_u
        e >>= 1
    return out


# ---------------------------------------------------------------------------
# Kronecker-substitution product of nonnegative integer sequences

_FIELD_BYTES = 16  # 128-bit fields: result coefficients certified < 2^127


def _pack128(arr_lo, arr_hi):
    buf = np.empty((len(arr_lo), 2), dtype="<u8")
    buf[:, 0] = arr_lo
    buf[:, 1] = arr_hi
    return int.from_bytes(buf.tobytes(), "little")


def kronecker_product(a, b, n_out):
    """Convolution c[n] = sum a[i] b[n-i] for 0 <= n <= n_out, exact.

    a, b: uint64 numpy arrays of NONNEGATIVE values (< 2^64); treated as
    polynomial coefficients.  Exactness requires every result coefficient
    < 2^127; the caller certifies this from its own bounds.  Result is
    returned as (lo, hi) uint64 arrays (the 128-bit field split).
    """
    import gmpy2

    A = gmpy2.mpz(_pack128(a, np.zeros_like(a)))
    if b is a:
        Z = A * A
    else:
        B = gmpy2.mpz(_pack128(b, np.zeros_like(b)))
        Z = A * B
    n_fields = len(a) + len(b) - 1
    raw = int(Z).to_bytes(_FIELD_BYTES * n_fields + _FIELD_BYTES, "little")
    flat = np.frombuffer(raw, dtype="<u8")
    flat = flat[: 2 * n_fields].reshape(-1, 2)
    top = min(n_out + 1, n_fields)
    lo = flat[:top, 0].copy()
    hi = flat[:top, 1].copy()
    if top < n_out + 1:
        lo = np.pad(lo, (0, n_out + 1 - top))
        hi = np.pad(hi, (0, n_out + 1 - top))
    if (hi >> U64(63)).any():
        raise OverflowError("kronecker field overflow; widen fields")
    return lo, hi


def product_channels(a_u64, b_u64, n_max):
    """ChannelArray of the convolution of two nonneg exact uint64 arrays."""
    square = b_u64 is a_u64
    a = a_u64[: n_max + 1]
    b = a if square else b_u64[: n_max + 1]
    lo, hi = kronecker_product(a, b, n_max)
    out = ChannelArray(n_max)
    out.u = lo.astype(U64)
    m2 = U64(M2)
    out.m = (lo % m2 + (hi % m2) * U64(_R64_MOD_M2)) % m2
    return out


def _fold_m2(lo, hi):
    m2 = U64(M2)
    return (lo % m2 + (hi % m2) * U64(_R64_MOD_M2)) % m2


def conv_accumulate(gu, gm, a, b=None, scale=1, shift_bits=0, block=1 << 22):
    """gu/gm += scale * 2^shift_bits * (a conv b), blocked.

    a, b: exact nonneg uint64 arrays (b=None squares a).  gu is a uint64
    wrap-around channel, gm a uint32 mod-M2 channel; either may be None.
    Result length is capped by the channels.  Each pairwise block product
    must stay below 2^127 per coefficient, like kronecker_product, but the
    working set stays ~6x block instead of ~3x the full length.
    """
    import gmpy2

    square = b is None
    if scale <= 0:
        raise ValueError("scale must be positive (negate via channel algebra)")
    n_out = (len(gu) if gu is not None else len(gm)) - 1
    su = U64((scale << shift_bits) & 0xFFFFFFFFFFFFFFFF)
    sm = U64((scale << shift_bits) % M2)
    s2u = U64((scale << (shift_bits + 1)) & 0xFFFFFFFFFFFFFFFF)
    s2m = U64((scale << (shift_bits + 1)) % M2)
    m2 = U64(M2)

    def pack(arr, i0):
        seg = arr[i0: i0 + block]
        return gmpy2.mpz(_pack128(seg, np.zeros_like(seg))), len(seg)

    bb = a if square else b
    for i0 in range(0, min(len(a), n_out + 1), block):
        Ai, la = pack(a, i0)
        for j0 in range(i0 if square else 0, min(len(bb), n_out + 1 - i0), block):
            if square and j0 == i0:
                Bj, lb = Ai, la
                Z = Ai * Ai
            else:
                Bj, lb = pack(bb, j0)
                Z = Ai * Bj
            n_fields = la + lb - 1
            raw = int(Z).to_bytes(_FIELD_BYTES * n_fields + _FIELD_BYTES, "little")
            flat = np.frombuffer(raw, dtype="<u8")[: 2 * n_fields].reshape(-1, 2)
            lo = flat[:, 0]
            hi = flat[:, 1]
            if (hi >> U64(63)).any():
                raise OverflowError("kronecker field overflow; widen fields")
            t0 = i0 + j0
            t1 = min(t0 + n_fields, n_out + 1)
            w = t1 - t0
            if w <= 0:
                continue
            doubled = square and j0 > i0
            if gu is not None:
                gu[t0:t1] += (s2u if doubled else su) * lo[:w]
            if gm is not None:
                mm = _fold_m2(lo[:w], hi[:w])
                mm = ((s2m if doubled else sm) * mm) % m2
                gm[t0:t1] = ((gm[t0:t1] + mm) % m2).astype(gm.dtype)
            del raw, flat, lo, hi
