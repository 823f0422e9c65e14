"""Coefficient caches and the QSER1 interchange format.

QSER1, one file per (form, n_max):
    line 1:  QSER1 <level> <weight> <n_max>     (decimal ASCII)
    lines 2..n_max+1:  a_1 .. a_n_max, one decimal integer per line
(a_0 is omitted; it is always 0 for these forms.)

The on-disk cache itself is .npy (text parse of 10^8 coefficients costs
more than the build); QSER1 is for export/import.  The CM prime-trace
table is cached as .npz, keyed by bound.

Cache directory: $LCONG_CACHE_DIR, else ~/.cache/lcong.  Missing directory
disables caching silently (results are just rebuilt).
"""

import os
import re

import numpy as np

MAGIC = "QSER1"

_FORM_LEVELS = {"5w4": (5, 4), "7w4": (7, 4), "5w6": (5, 6), "121w4": (121, 4)}

_MMAP_MIN = 6 * 10 ** 7  # terms; above this, cached reads stay memory-mapped


def cache_dir(create=False):
    d = os.environ.get("LCONG_CACHE_DIR")
    if not d:
        d = os.path.join(os.path.expanduser("~"), ".cache", "lcong")
    if create:
        os.makedirs(d, exist_ok=True)
    return d


def write_qser(path, level, weight, a):
    """Write coefficients a (index 0..n_max, a[0] ignored) in QSER1 format.

    Accepts int64 arrays or wide (2, n+1) hi/lo pairs; lines are exact
    decimals either way.
    """
    n_max = a.shape[-1] - 1
    if a.ndim == 2:
        vals = (str((int(h) << 62) + int(l)) for h, l in zip(a[0, 1:], a[1, 1:]))
    else:
        vals = (str(int(v)) for v in a[1:])
    with open(path, "w") as fh:
        fh.write(f"{MAGIC} {level} {weight} {n_max}\n")
        fh.write("\n".join(vals))
        fh.write("\n")


def read_qser(path):
    """-> (level, weight, array indexed 0..n_max with a[0] = 0).

    int64 when every value fits; else the wide (2, n+1) hi/lo pair layout.
    """
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != MAGIC:
            raise ValueError(f"not a {MAGIC} file: {path}")
        level, weight, n_max = (int(x) for x in header[1:])
        body = fh.read().split()
    if len(body) != n_max:
        raise ValueError(f"{path}: expected {n_max} coefficients, found {len(body)}")
    vals = [int(s) for s in body]
    if all(-(2 ** 63) <= v < 2 ** 63 for v in vals):
        a = np.empty(n_max + 1, dtype=np.int64)
        a[0] = 0
        a[1:] = vals
        return level, weight, a
    a = np.zeros((2, n_max + 1), dtype=np.int64)
    for i, v in enumerate(vals, start=1):
        a[0, i] = v >> 62
        a[1, i] = v & ((1 << 62) - 1)
    return level, weight, a


def _npy_name(form_id, n_max):
    return f"{form_id}_n{n_max}.npy"


def cached_coefficients(form_id, n_max, builder):
    """Fetch a_0..a_n_max from cache, or build and store.

    Any cached file for the same form with n_max' >= n_max is accepted;
    the prefix is copied out of a memory map, so a long cached run costs
    only the terms actually requested.
    """
    d = cache_dir()
    level, weight = _FORM_LEVELS[form_id]
    pat = re.compile(re.escape(form_id) + r"_n(\d+)\.npy$")
    if os.path.isdir(d):
        best = None
        for name in os.listdir(d):
            m = pat.match(name)
            if m and int(m.group(1)) >= n_max:
                if best is None or int(m.group(1)) < best[0]:
                    best = (int(m.group(1)), name)
        if best is not None:
            arr = np.load(os.path.join(d, best[1]), mmap_mode="r")
            if n_max >= _MMAP_MIN:
                # hand back the map itself: half-GB-plus arrays are read
                # once per prime index and never mutated, so resident pages
                # stay reclaimable instead of pinned
                return arr[..., : n_max + 1]
            a = np.empty(arr.shape[:-1] + (n_max + 1,), dtype=arr.dtype)
            a[...] = arr[..., : n_max + 1]
            del arr
            return a
    a = builder(n_max)
    try:
        cache_dir(create=True)
        if n_max >= 10 ** 5:  # small builds are cheaper than the disk round-trip
            final = os.path.join(d, _npy_name(form_id, n_max))
            tmp = final + f".tmp{os.getpid()}"
            np.save(tmp, a)
            # np.save appends .npy when missing; tmp already ends in .tmp<pid>
            os.replace(tmp + ".npy", final)
            # a longer run supersedes every shorter one for the same form
            for name in os.listdir(d):
                m = pat.match(name)
                if m and int(m.group(1)) < n_max:
                    os.unlink(os.path.join(d, name))
    except OSError:
        pass
    return a


def cached_cm_prime_table(bound, builder):
    """(primes, a_q) int64 arrays for primes <= bound; cached as npz."""
    d = cache_dir()
    path = os.path.join(d, f"cm121_primes_{bound}.npz")
    if os.path.isfile(path):
        z = np.load(path)
        return z["primes"], z["aq"]
    primes, aq = builder(bound)
    try:
        cache_dir(create=True)
        tmp = path + f".tmp{os.getpid()}.npz"
        np.savez(tmp, primes=primes, aq=aq)
        os.replace(tmp, path)
    except OSError:
        pass
    return primes, aq
