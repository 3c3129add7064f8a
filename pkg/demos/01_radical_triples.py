"""Deciding radical membership for triples of quadratic forms.

Builds one example of each structural flavour — a pencil member, a
square-pencil neighbour, and a bound form living over a shared 2-dim
space of linear forms — then runs the fast decision procedure and the
classifier on each and prints the outcomes.

Run from the repository root:  python3 demos/01_radical_triples.py
"""

import json

from gmpy2 import mpq

from qsg.quadforms import QuadForm, lin_mul, lin_square
from qsg.radical import classify_triple, radical_membership


def unit(n, i):
    return [mpq(1) if t == i else mpq(0) for t in range(n)]


def show(title, A, B, C):
    print(f"--- {title}")
    mem = radical_membership(C, A, B)
    print(f"  decision: {mem['decision']}  (method: {mem['method']})")
    cls = classify_triple(A, B, C, membership=mem)
    print(f"  cases: {cls.cases()}  exclusive: {cls.exclusive}")
    print(f"  detail: {json.dumps(cls.to_json(), sort_keys=True)[:120]}...")
    print()


def main():
    n = 5
    # a rank-5 anchor
    A = QuadForm.from_monomials(n, {(0, 0): mpq(1), (1, 1): mpq(1),
                                    (2, 2): mpq(1), (3, 3): mpq(1),
                                    (4, 4): mpq(1), (0, 3): mpq(1)})

    # flavour 1: C is a rational combination of A and B
    B = QuadForm.from_monomials(n, {(0, 1): mpq(1), (2, 3): mpq(1),
                                    (4, 4): mpq(2)})
    show("pencil member: C = 2A + 3B", A, B,
         A.scale(mpq(2)) + B.scale(mpq(3)))

    # flavour 2: the pencil of (A, B) contains a square, and C is built
    # from its linear root
    ell = [mpq(1), mpq(-1), mpq(0), mpq(2), mpq(0)]
    c = [mpq(0), mpq(1), mpq(1), mpq(0), mpq(-1)]
    show("square pencil: B = A + l^2, C = A + l*c",
         A, A + lin_square(ell), A + lin_mul(ell, c))

    # flavour 3: P and Q both lie in the ideal of the 2-dim space
    # <x1, x2>, and T is bound to them through that space
    a = [mpq(0), mpq(0), mpq(1), mpq(2), mpq(0)]
    b = [mpq(0), mpq(0), mpq(0), mpq(1), mpq(-1)]
    P = lin_mul(unit(n, 0), a) + lin_square(unit(n, 1))
    Q = lin_mul(unit(n, 0), b) - lin_square(unit(n, 1))
    T = lin_mul(unit(n, 1), [x + y for x, y in zip(a, b)]) + P
    show("shared 2-dim space: T bound to (P, Q)", P, Q, T)

    # a negative: an unrelated form is rejected
    D = QuadForm.from_monomials(n, {(0, 0): mpq(1), (1, 2): mpq(-1),
                                    (3, 4): mpq(1)})
    mem = radical_membership(D, P, Q)
    print(f"--- unrelated form: decision {mem['decision']} "
          f"(method: {mem['method']})")


if __name__ == "__main__":
    main()
