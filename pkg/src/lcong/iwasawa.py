"""Cyclotomic-tower place bookkeeping and the lambda growth formula.

Places of Q(mu_{p^infty}) above a rational prime q != p are counted by the
index of the closure of <q> in Z_p^x; membership of the degenerate sets P1
and P2 is decided by the base-change Frobenius trace b_v mod p.  The
lambda transition is a pure formula evaluator: lambda over the base tower
is an input, not something computed here.
"""

from fractions import Fraction
from typing import NamedTuple, Optional

from .exact import factorize, mult_order, valuation
from .poly import base_change_trace


class PlaceClass(NamedTuple):
    q: int
    r_q: int                    # order of q mod p
    place_count: int            # places of Q(mu_{p^infty}) above q
    b_v: int                    # Frobenius trace on the base-changed fiber
    membership: Optional[str]   # None | "P1" | "P2"


def place_count(q, p):
    """Number of places above q: index of the closed subgroup generated by
    q inside Z_p^x ~ mu_{p-1} x (1 + pZ_p)."""
    if q == p:
        raise ValueError("q = p is totally ramified, not counted here")
    r = mult_order(q, p)
    c = valuation(q ** r - 1, p)
    return ((p - 1) // r) * p ** (c - 1)


def classify_place(form, p, q, m):
    """P1/P2/None classification of the places above q | m, q != p."""
    if q == p:
        raise ValueError("q = p is the interpolation prime, not a tower place")
    if m % q != 0:
        raise ValueError(f"q = {q} does not divide m = {m}")
    r = mult_order(q, p)
    count = place_count(q, p)
    e_n = valuation(form.level, q) if form.level % q == 0 else 0
    aq = form.coeff(q)
    if e_n == 0:
        b = base_change_trace(aq, q, form.weight, r)
        member = "P2" if (2 - b) % p == 0 else None
    elif e_n == 1:
        b = aq ** r
        member = "P1" if (b - 1) % p == 0 else None
    else:
        b = 0  # supercuspidal-type: inertia kills the fiber
        member = None
    return PlaceClass(q, r, count, b, member)


def lambda_transition(lambda_base, classified, p):
    """p * lambda_base + sum over P2 places of 2(p-1) + sum over P1 of (p-1);
    each classified prime contributes place_count places."""
    lam = p * lambda_base
    for pc in classified:
        if pc.membership == "P2":
            lam += 2 * (p - 1) * pc.place_count
        elif pc.membership == "P1":
            lam += (p - 1) * pc.place_count
    return lam


def lambda_for_m(form, m, lambda_base=0, p=3):
    """-> (lambda, [PlaceClass]) for the degree-p layer attached to m."""
    qs = [q for q in sorted(factorize(m)) if q != p]
    if qs and form.n_max <= max(qs):
        form = form.ensure(max(qs) + 1)
    cls = [classify_place(form, p, q, m) for q in qs]
    return lambda_transition(lambda_base, cls, p), cls


def euler_divisibility_crosscheck(form, p, q, n_range, m=None):
    """Membership against ord_p of the sigma-twisted local factor value:
    the places above q are degenerate iff P_q(f, sigma, q^{-n}) = 0 mod p,
    and this must hold at every n simultaneously."""
    from . import artin, padic

    sig = artin.sigma_rep(p)
    pc = classify_place(form, p, q, m if m is not None else q)
    want = pc.membership in ("P1", "P2")
    for n in n_range:
        val = padic.twisted_factor_rational(form, sig, q, n)
        divisible = val == 0 or valuation(Fraction(val), p) > 0
        if divisible != want:
            return False
    return True
