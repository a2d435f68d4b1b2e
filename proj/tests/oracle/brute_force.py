#!/usr/bin/env python3
"""Independent brute-force oracle for K_{m,n} orientation probabilities.

Enumerates every orientation with plain BFS over an explicit adjacency list,
and evaluates the f/g/h recursions with Python Fractions. Used to freeze
expected values in the C++ test suites; shares no code with the library.
"""
import itertools
import sys
from fractions import Fraction
from functools import lru_cache
from math import comb


def vertices(m, n):
    return [("X", i) for i in range(m)] + [("Y", j) for j in range(n)]


def orientation(m, n, index):
    # bit (i*n + j) set => X_i -> Y_j
    adj = {v: [] for v in vertices(m, n)}
    for i in range(m):
        for j in range(n):
            if (index >> (i * n + j)) & 1:
                adj[("X", i)].append(("Y", j))
            else:
                adj[("Y", j)].append(("X", i))
    return adj


def reach(adj, s):
    seen = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def prob(m, n, atoms):
    """P(all atoms (u, v) satisfy u -/-> v)."""
    hits = 0
    for idx in range(1 << (m * n)):
        adj = orientation(m, n, idx)
        cache = {}
        ok = True
        for u, v in atoms:
            if u not in cache:
                cache[u] = reach(adj, u)
            if v in cache[u]:
                ok = False
                break
        hits += ok
    return Fraction(hits, 1 << (m * n))


X = lambda i: ("X", i)
Y = lambda j: ("Y", j)


def family_event(fam, m, n, size):
    a, b, d = X(0), X(1), Y(0)
    if fam == "FX":
        return [(X(1 + i), a) for i in range(size)]
    if fam == "FY":
        return [(Y(i), a) for i in range(size)]
    if fam == "GX":
        return [(X(2 + i), b) for i in range(size)] + [(b, a)]
    if fam == "GY":
        return [(Y(i), b) for i in range(size)] + [(b, a)]
    if fam == "HX":
        return [(X(1 + i), d) for i in range(size)] + [(d, a)]
    if fam == "HY":
        return [(Y(1 + i), d) for i in range(size)] + [(d, a)]


def make_system(printed):
    @lru_cache(None)
    def fx(m, n, k):
        if k == 0:
            return Fraction(1)
        return sum(comb(n, l) * Fraction((2**k - 1) ** l, 2 ** (n * k)) * fy(m - k, n, l) for l in range(n + 1))

    @lru_cache(None)
    def fy(m, n, l):
        if l == 0:
            return Fraction(1)
        if printed:
            return sum(comb(m - 1, l) * Fraction((2**k - 1) ** l, 2 ** (m * k)) * fx(m, n - l, k) for k in range(m))
        return sum(comb(m - 1, k) * Fraction((2**l - 1) ** k, 2 ** (l * m)) * fx(m, n - l, k) for k in range(m))

    @lru_cache(None)
    def gx(m, n, k):
        if k == 0:
            return fx(m, n, 1)
        return sum(comb(n, l) * Fraction((2**k - 1) ** l, 2 ** (n * k)) * gy(m - k, n, l) for l in range(n + 1))

    @lru_cache(None)
    def gy(m, n, l):
        if l == 0:
            return fx(m, n, 1)
        return sum(comb(m - 2, k) * Fraction((2**l - 1) ** k, 2 ** (l * m)) * gx(m, n - l, k) for k in range(m - 1))

    @lru_cache(None)
    def hx(m, n, k):
        if k == 0:
            return fy(m, n, 1)
        return sum(comb(n - 1, l) * Fraction((2**k - 1) ** l, 2 ** (n * k)) * hy(m - k, n, l) for l in range(n))

    @lru_cache(None)
    def hy(m, n, l):
        if l == 0:
            return fy(m, n, 1)
        den = (lambda k: 2 ** (m * k)) if printed else (lambda k: 2 ** (l * m))
        return sum(comb(m - 1, k) * Fraction((2**l - 1) ** k, den(k)) * hx(m, n - l, k) for k in range(m))

    return {"FX": fx, "FY": fy, "GX": gx, "GY": gy, "HX": hx, "HY": hy}


def bounds(fam, m, n):
    if fam in ("FX", "FY") and m < 1:
        return None
    if fam in ("GX", "GY") and m < 2:
        return None
    if fam in ("HX", "HY") and (m < 1 or n < 1):
        return None
    return {"FX": m - 1, "FY": n, "GX": m - 2, "GY": n, "HX": m - 1, "HY": n - 1}[fam]


def dyadic(fr):
    den = fr.denominator
    e = den.bit_length() - 1
    assert den == 1 << e
    return f"{fr.numerator}/2^{e}"


def check(max_mn):
    sysv = make_system(False)
    bad = 0
    for m in range(1, max_mn + 1):
        for n in range(1, max_mn // m + 1):
            for fam in sysv:
                hi = bounds(fam, m, n)
                if hi is None:
                    continue
                for s in range(hi + 1):
                    ev = family_event(fam, m, n, s)
                    want = prob(m, n, ev) if ev else Fraction(1)
                    got = sysv[fam](m, n, s)
                    if want != got:
                        bad += 1
                        print("MISMATCH", fam, m, n, s, want, got)
    print("mismatches:", bad)


def rational(fr):
    return f"{fr.numerator}/{fr.denominator}"


def recursion_golden(max_mn):
    print("family,mode,m,n,size,value")
    for mode, printed in (("printed", True), ("validated", False)):
        sysv = make_system(printed)
        for fam in sysv:
            for m in range(1, max_mn + 1):
                for n in range(1, max_mn // m + 1):
                    hi = bounds(fam, m, n)
                    if hi is None:
                        continue
                    for s in range(hi + 1):
                        print(f"{fam},{mode},{m},{n},{s},{dyadic(sysv[fam](m, n, s))}")


def pair_triple_golden(max_mn):
    """GX and HX: P(pair event) against P(pair event plus K -/-> a)."""
    print("family,m,n,size,pair,triple")
    a = X(0)
    for fam in ("GX", "HX"):
        for m in range(1, max_mn + 1):
            for n in range(1, max_mn // m + 1):
                hi = bounds(fam, m, n)
                if hi is None:
                    continue
                for s in range(1, hi + 1):
                    pair = family_event(fam, m, n, s)
                    sources = [u for u, _ in pair[:-1]]
                    triple = pair + [(u, a) for u in sources]
                    print(f"{fam},{m},{n},{s},{dyadic(prob(m, n, pair))},{dyadic(prob(m, n, triple))}")


def rc_parts(sysv, kind, m, n):
    if kind == "all-x":
        return sysv["FX"](m, n, 1), sysv["FX"](m, n, 1), sysv["GX"](m, n, 1)
    if kind == "xxy":
        return sysv["FX"](m, n, 1), sysv["FY"](m, n, 1), sysv["GY"](m, n, 1)
    return sysv["FY"](m, n, 1), sysv["FY"](m, n, 1), sysv["HX"](m, n, 1)


def sign(fr):
    return "negative" if fr < 0 else ("positive" if fr > 0 else "zero")


def convergence_golden(n_lo, n_hi):
    sysv = make_system(False)
    print("placement,m,n,rc,rc_decimal")
    for kind in ("all-x", "xxy", "xyx"):
        for n in range(n_lo, n_hi + 1):
            pa, pb, pj = rc_parts(sysv, kind, n, n)
            rc = 1 - pa * pb / pj
            print(f"{kind},{n},{n},{rational(rc)},{float(rc):.15g}")


def q2_golden():
    """AllInX rc with n = 2^m for m = 2, 3: enumeration where it is cheap,
    recursion everywhere, and both must agree when both run."""
    sysv = make_system(False)
    print("m,rows,cols,p_ac,p_bc,p_joint,rc,sign")
    for m in (2, 3):
        for rows, cols in ((m, 2**m), (2**m, m)):
            if rows < 3:
                continue
            pa, pb, pj = rc_parts(sysv, "all-x", rows, cols)
            if rows * cols <= 8:
                assert pa == prob(rows, cols, [(X(0), X(1))])
                assert pj == prob(rows, cols, [(X(0), X(1)), (X(1), X(2))])
            rc = 1 - pa * pb / pj
            print(f"{m},{rows},{cols},{dyadic(pa)},{dyadic(pb)},{dyadic(pj)},{rational(rc)},{sign(rc)}")


if __name__ == "__main__":
    cmd = sys.argv[1] if len(sys.argv) > 1 else "check"
    arg = int(sys.argv[2]) if len(sys.argv) > 2 else None
    if cmd == "check":
        check(arg or 9)
    elif cmd == "recursion":
        recursion_golden(arg or 20)
    elif cmd == "pair-triple":
        pair_triple_golden(arg or 12)
    elif cmd == "convergence":
        convergence_golden(8, 24)
    elif cmd == "q2":
        q2_golden()
    else:
        sys.exit(f"unknown command {cmd}")
