"""Independent brute-force Betti oracle for small Sullivan algebras.

Enumerates monomials directly, builds the differential matrices with
Python Fractions and computes ranks with sympy. Used once to freeze the
golden Betti vectors under ../golden/.
"""
from fractions import Fraction
from itertools import product
import sys

import sympy


def monomials(degs, n):
    out = []
    bounds = [1 if d % 2 else n // d for d in degs]
    for exps in product(*[range(b + 1) for b in bounds]):
        if sum(e * d for e, d in zip(exps, degs)) == n:
            out.append(exps)
    return out


def mul_mono(degs, a, b):
    # sign from moving odd letters of b past odd letters of a
    sign = 1
    for i, ea in enumerate(a):
        if ea and degs[i] % 2:
            for j in range(i):
                if b[j] and degs[j] % 2:
                    sign = -sign
    for i in range(len(a)):
        if degs[i] % 2 and a[i] and b[i]:
            return 0, None
    return sign, tuple(x + y for x, y in zip(a, b))


def mul(degs, x, y):
    out = {}
    for ma, ca in x.items():
        for mb, cb in y.items():
            s, m = mul_mono(degs, ma, mb)
            if s:
                out[m] = out.get(m, 0) + s * ca * cb
    return {m: c for m, c in out.items() if c != 0}


def d_mono(degs, dgen, m):
    # expand m as ordered product of letters and apply Leibniz
    letters = []
    for i, e in enumerate(m):
        letters += [i] * e
    total = {}
    for k, g in enumerate(letters):
        pre = [0] * len(degs)
        for l in letters[:k]:
            pre[l] += 1
        post = [0] * len(degs)
        for l in letters[k + 1:]:
            post[l] += 1
        sign = (-1) ** sum(degs[l] for l in letters[:k])
        term = mul(degs, mul(degs, {tuple(pre): Fraction(sign)}, dgen[g]), {tuple(post): Fraction(1)})
        for mm, c in term.items():
            total[mm] = total.get(mm, 0) + c
    return {m: c for m, c in total.items() if c != 0}


def betti(degs, dgen, top):
    bases = [monomials(degs, n) for n in range(top + 2)]
    ranks = []
    for n in range(top + 1):
        src, tgt = bases[n], bases[n + 1]
        idx = {m: i for i, m in enumerate(tgt)}
        mat = sympy.zeros(len(tgt), len(src))
        for j, m in enumerate(src):
            for mm, c in d_mono(degs, dgen, m).items():
                mat[idx[mm], j] = sympy.Rational(c.numerator, c.denominator)
        ranks.append(mat.rank() if len(src) and len(tgt) else 0)
    out = []
    for n in range(top + 1):
        ker = len(bases[n]) - ranks[n]
        im = ranks[n - 1] if n > 0 else 0
        out.append(ker - im)
    return out


def poly(degs, terms):
    return {tuple(e): Fraction(c) for c, e in terms}


if __name__ == "__main__":
    which = sys.argv[1]
    if which == "su6":
        degs = [4, 6, 7, 9, 11]
        dg = [{}, {},
              poly(degs, [(1, [2, 0, 0, 0, 0])]),
              poly(degs, [(2, [1, 1, 0, 0, 0])]),
              poly(degs, [(1, [0, 2, 0, 0, 0])])]
        print(betti(degs, dg, 30))
    elif which == "yamaguchi":
        # x y z a b c
        degs = [2, 3, 3, 4, 5, 7]
        dg = [{}, {},
              poly(degs, [(1, [2, 0, 0, 0, 0, 0])]),
              poly(degs, [(1, [1, 1, 0, 0, 0, 0])]),
              poly(degs, [(1, [1, 0, 0, 1, 0, 0]), (1, [0, 1, 1, 0, 0, 0])]),
              poly(degs, [(1, [0, 0, 0, 2, 0, 0]), (2, [0, 1, 0, 0, 1, 0])])]
        print(betti(degs, dg, 21))
    elif which == "su2_u1":
        degs = [2, 3]
        dg = [{}, poly(degs, [(1, [2, 0])])]
        print(betti(degs, dg, 6))
