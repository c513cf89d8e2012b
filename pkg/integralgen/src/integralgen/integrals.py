"""Gaussian integrals over contracted Cartesian functions.

Hermite-Gaussian expansion (McMurchie-Davidson): overlap, kinetic, nuclear
attraction, and electron repulsion for s and p shells.
"""

from __future__ import annotations

import numpy as np
from scipy.special import hyp1f1

from .basis import BasisFunction


def hermite_expansion(i: int, j: int, t: int, q_x: float, a: float, b: float) -> float:
    """Coefficient E_t^{ij} coupling a Gaussian pair to Hermite Gaussians.

    q_x is the center separation A_x - B_x along this axis.
    """
    p = a + b
    mu = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return np.exp(-mu * q_x * q_x)
    if j == 0:
        return ((1.0 / (2.0 * p)) * hermite_expansion(i - 1, j, t - 1, q_x, a, b)
                - (mu * q_x / a) * hermite_expansion(i - 1, j, t, q_x, a, b)
                + (t + 1) * hermite_expansion(i - 1, j, t + 1, q_x, a, b))
    return ((1.0 / (2.0 * p)) * hermite_expansion(i, j - 1, t - 1, q_x, a, b)
            + (mu * q_x / b) * hermite_expansion(i, j - 1, t, q_x, a, b)
            + (t + 1) * hermite_expansion(i, j - 1, t + 1, q_x, a, b))


def primitive_overlap(a, lmn1, origin1, b, lmn2, origin2) -> float:
    value = 1.0
    for axis in range(3):
        value *= hermite_expansion(lmn1[axis], lmn2[axis], 0,
                                   origin1[axis] - origin2[axis], a, b)
    return value * (np.pi / (a + b)) ** 1.5


def primitive_kinetic(a, lmn1, origin1, b, lmn2, origin2) -> float:
    l2, m2, n2 = lmn2

    def s_shift(dl, dm, dn):
        shifted = (l2 + dl, m2 + dm, n2 + dn)
        if min(shifted) < 0:
            return 0.0
        return primitive_overlap(a, lmn1, origin1, b, shifted, origin2)

    term0 = b * (2 * (l2 + m2 + n2) + 3) * s_shift(0, 0, 0)
    term1 = -2.0 * b * b * (s_shift(2, 0, 0) + s_shift(0, 2, 0) + s_shift(0, 0, 2))
    term2 = -0.5 * (l2 * (l2 - 1) * s_shift(-2, 0, 0)
                    + m2 * (m2 - 1) * s_shift(0, -2, 0)
                    + n2 * (n2 - 1) * s_shift(0, 0, -2))
    return term0 + term1 + term2


def boys(n: int, x: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_coulomb(t: int, u: int, v: int, n: int, p: float, pc) -> float:
    """Integral R_{tuv}^{(n)} of a Hermite Gaussian with a point charge."""
    if t == u == v == 0:
        r2 = pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2]
        return (-2.0 * p) ** n * boys(n, p * r2)
    if t > 0:
        value = pc[0] * hermite_coulomb(t - 1, u, v, n + 1, p, pc)
        if t > 1:
            value += (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pc)
        return value
    if u > 0:
        value = pc[1] * hermite_coulomb(t, u - 1, v, n + 1, p, pc)
        if u > 1:
            value += (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pc)
        return value
    value = pc[2] * hermite_coulomb(t, u, v - 1, n + 1, p, pc)
    if v > 1:
        value += (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pc)
    return value


def _product_center(a, origin1, b, origin2):
    p = a + b
    return tuple((a * origin1[axis] + b * origin2[axis]) / p for axis in range(3))


def primitive_nuclear(a, lmn1, origin1, b, lmn2, origin2, nucleus) -> float:
    p = a + b
    center = _product_center(a, origin1, b, origin2)
    pc = tuple(center[axis] - nucleus[axis] for axis in range(3))
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    value = 0.0
    for t in range(l1 + l2 + 1):
        et = hermite_expansion(l1, l2, t, origin1[0] - origin2[0], a, b)
        if et == 0.0:
            continue
        for u in range(m1 + m2 + 1):
            eu = hermite_expansion(m1, m2, u, origin1[1] - origin2[1], a, b)
            if eu == 0.0:
                continue
            for v in range(n1 + n2 + 1):
                ev = hermite_expansion(n1, n2, v, origin1[2] - origin2[2], a, b)
                if ev == 0.0:
                    continue
                value += et * eu * ev * hermite_coulomb(t, u, v, 0, p, pc)
    return 2.0 * np.pi / p * value


def primitive_eri(a, lmn1, o1, b, lmn2, o2, c, lmn3, o3, d, lmn4, o4) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    center_p = _product_center(a, o1, b, o2)
    center_q = _product_center(c, o3, d, o4)
    pq = tuple(center_p[axis] - center_q[axis] for axis in range(3))

    def exp_coefs(i, j, x1, x2, e1, e2, top):
        return [hermite_expansion(i, j, t, x1 - x2, e1, e2) for t in range(top + 1)]

    e_bra = [exp_coefs(lmn1[ax], lmn2[ax], o1[ax], o2[ax], a, b,
                       lmn1[ax] + lmn2[ax]) for ax in range(3)]
    e_ket = [exp_coefs(lmn3[ax], lmn4[ax], o3[ax], o4[ax], c, d,
                       lmn3[ax] + lmn4[ax]) for ax in range(3)]

    value = 0.0
    for t, et in enumerate(e_bra[0]):
        if et == 0.0:
            continue
        for u, eu in enumerate(e_bra[1]):
            if eu == 0.0:
                continue
            for v, ev in enumerate(e_bra[2]):
                if ev == 0.0:
                    continue
                for tau, ft in enumerate(e_ket[0]):
                    if ft == 0.0:
                        continue
                    for nu, fu in enumerate(e_ket[1]):
                        if fu == 0.0:
                            continue
                        for phi, fv in enumerate(e_ket[2]):
                            if fv == 0.0:
                                continue
                            sign = -1.0 if (tau + nu + phi) % 2 else 1.0
                            value += (et * eu * ev * ft * fu * fv * sign
                                      * hermite_coulomb(t + tau, u + nu, v + phi,
                                                        0, alpha, pq))
    return value * 2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))


def _contract2(func, bf1: BasisFunction, bf2: BasisFunction, *extra) -> float:
    value = 0.0
    for a, ca in zip(bf1.exps, bf1.coefs):
        for b, cb in zip(bf2.exps, bf2.coefs):
            value += ca * cb * func(a, bf1.lmn, bf1.origin,
                                    b, bf2.lmn, bf2.origin, *extra)
    return value


def overlap(bf1, bf2) -> float:
    return _contract2(primitive_overlap, bf1, bf2)


def kinetic(bf1, bf2) -> float:
    return _contract2(primitive_kinetic, bf1, bf2)


def nuclear(bf1, bf2, nucleus) -> float:
    return _contract2(primitive_nuclear, bf1, bf2, nucleus)


def eri(bf1, bf2, bf3, bf4) -> float:
    """Chemists' (12|34) repulsion integral over contracted functions."""
    value = 0.0
    for a, ca in zip(bf1.exps, bf1.coefs):
        for b, cb in zip(bf2.exps, bf2.coefs):
            for c, cc in zip(bf3.exps, bf3.coefs):
                for d, cd in zip(bf4.exps, bf4.coefs):
                    value += ca * cb * cc * cd * primitive_eri(
                        a, bf1.lmn, bf1.origin, b, bf2.lmn, bf2.origin,
                        c, bf3.lmn, bf3.origin, d, bf4.lmn, bf4.origin)
    return value


def ao_integrals(basis, nuclei):
    """AO matrices (S, T, V) and the full chemists' ERI tensor."""
    n = len(basis)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = overlap(basis[i], basis[j])
            t[i, j] = t[j, i] = kinetic(basis[i], basis[j])
            attraction = sum(-charge * nuclear(basis[i], basis[j], xyz)
                             for charge, xyz in nuclei)
            v[i, j] = v[j, i] = attraction

    g = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                l_top = j if k == i else k
                for l in range(l_top + 1):
                    value = eri(basis[i], basis[j], basis[k], basis[l])
                    for a, b, c, d in ((i, j, k, l), (j, i, k, l),
                                       (i, j, l, k), (j, i, l, k),
                                       (k, l, i, j), (l, k, i, j),
                                       (k, l, j, i), (l, k, j, i)):
                        g[a, b, c, d] = value
    return s, t, v, g


def nuclear_repulsion(nuclei) -> float:
    value = 0.0
    for i, (zi, ri) in enumerate(nuclei):
        for zj, rj in nuclei[i + 1:]:
            r = np.linalg.norm(np.subtract(ri, rj))
            value += zi * zj / r
    return value
