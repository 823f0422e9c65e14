"""Exact integer/rational utilities shared across the package.

Everything here is pure-Python integer arithmetic (plus Fraction); no
floating point.  These are the primitives the arithmetic layers are
built on, so they are kept deliberately boring.
"""

from fractions import Fraction
from math import gcd, isqrt


def valuation(n, p):
    """Exponent of the prime p in n (n rational or integer, n != 0)."""
    if isinstance(n, Fraction):
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    n = int(n)
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def factorize(n):
    """Trial-division factorization, returns {prime: exponent}.

    Fine for the conductor-sized integers we meet (< ~10^12); anything
    bigger would deserve Pollard rho, but nothing here needs it.
    """
    n = abs(int(n))
    if n <= 1:
        return {}
    out = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    # wheel over 6k+-1
    d = 7
    while d * d <= n:
        for q in (d, d + 4):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_part(n):
    n = int(n)
    s = 1
    for p, e in factorize(n).items():
        if e % 2:
            s *= p
    return s if n > 0 else -s


def is_prime(n):
    n = int(n)
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def legendre(a, p):
    """Legendre symbol (a/p) in {-1,0,1} for odd prime p."""
    a %= p
    if a == 0:
        return 0
    t = pow(a, (p - 1) // 2, p)
    return 1 if t == 1 else -1


def kronecker(a, n):
    """Kronecker symbol (a/n), n any nonzero integer."""
    if n == 0:
        raise ValueError("Kronecker symbol needs n != 0")
    if n < 0:
        s = -1 if a < 0 else 1
        return s * kronecker(a, -n)
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        # (a/2) = (2/a) for the Kronecker extension
        t = 1 if (a % 8) in (1, 7) else -1
        return t * kronecker(a, n // 2)
    a %= n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def crt_pair(r1, m1, r2, m2):
    """x with x=r1 (mod m1), x=r2 (mod m2); moduli must be coprime."""
    g = gcd(m1, m2)
    if g != 1:
        raise ValueError("crt_pair wants coprime moduli")
    h = (r2 - r1) * pow(m1, -1, m2) % m2
    return (r1 + h * m1) % (m1 * m2)


def centered_lift(r, m):
    """Representative of r mod m in (-m/2, m/2]."""
    r %= m
    if r > m // 2:
        r -= m
    return r


_bernoulli_cache = {0: Fraction(1), 1: Fraction(-1, 2)}


def bernoulli(n):
    """Bernoulli number B_n (B_1 = -1/2), exact Fraction.

    Recurrence sum_{j<=n} C(n+1,j) B_j = 0.  Only small even n are ever
    requested (weights 4 and 6), so no acceleration needed.
    """
    if n in _bernoulli_cache:
        return _bernoulli_cache[n]
    if n % 2 == 1:
        return Fraction(0)
    from math import comb
    for m in range(2, n + 1):
        if m not in _bernoulli_cache:
            s = sum(Fraction(comb(m + 1, j)) * _bernoulli_cache[j] for j in range(m))
            _bernoulli_cache[m] = -s / (m + 1)
    return _bernoulli_cache[n]


def sigma(n, k):
    """Divisor power sum sigma_k(n)."""
    n = int(n)
    total = 1
    for p, e in factorize(n).items():
        total *= sum(p ** (k * j) for j in range(e + 1))
    return total


def mult_order(a, n):
    """Multiplicative order of a modulo n (gcd(a,n)=1)."""
    if gcd(a, n) != 1:
        raise ValueError("mult_order needs gcd(a, n) = 1")
    a %= n
    o, x = 1, a
    while x != 1:
        x = x * a % n
        o += 1
    return o


def primes_upto(n):
    """Sorted list of primes <= n (sieve of Eratosthenes, list-based)."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i:: i] = bytearray(len(sieve[i * i:: i]))
    return [i for i in range(2, n + 1) if sieve[i]]


def cornacchia_4p_11(p):
    """Solve 4p = x^2 + 11 y^2 for p a prime split in Q(sqrt(-11)).

    Returns (x, y) with x, y > 0, or None when no representation exists
    (p inert or ramified).  Standard Cornacchia on the doubled form:
    find r^2 = -11 mod 4p via a sqrt mod p lifted to mod 4p, then run
    the Euclidean chain.
    """
    if p == 11:
        return None
    if legendre(-11, p) != 1:
        return None
    # sqrt of -11 mod p (p odd here; p=2: 4*2=8 has no x^2+11y^2 rep)
    if p == 2:
        return None
    s = _sqrt_mod_p(-11 % p, p)
    if s % 2 == 0:
        s = p - s  # odd representative, so s^2 = -11 mod 4 as well
    # modified Cornacchia (Cohen alg. 1.5.3): Euclid from (2p, s), bound 2*sqrt(p)
    a, b = 2 * p, s
    limit = isqrt(4 * p)
    while b > limit:
        a, b = b, a % b
    y2, rem = divmod(4 * p - b * b, 11)
    if rem != 0:
        return None
    y = isqrt(y2)
    if y * y != y2 or y == 0:
        return None
    return (b, y)


def _sqrt_mod_p(a, p):
    """Tonelli-Shanks; assumes (a/p) = 1."""
    a %= p
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # general case
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t = t * c % p
        r = r * b % p
    return r
