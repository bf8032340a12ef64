"""Mixed determinants over symmetric matrices.

``D_n(M_1, ..., M_n)`` is the symmetric n-linear form whose diagonal
restriction is ``det``. Two independent algorithms are provided:

* :func:`mixed_det` -- the signed polarization sum over ``2^n`` sign vectors;
* :func:`mixed_det_oracle` -- the average over permutations of determinants
  whose ``j``-th column is taken from ``M_sigma(j)``.

Every function accepts ``SymMat`` arguments or dense ``(..., n, n)`` arrays;
arrays broadcast over their leading axes.
"""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple, Sequence

import numpy as np

from . import symmat
from .exceptions import DimensionMismatch, NotPSD
from .symmat import SymMat

TOL = 1e-10


class Gap(NamedTuple):
    lhs: float | np.ndarray
    rhs: float | np.ndarray


def _stack(ms: Sequence) -> tuple[np.ndarray, bool]:
    scalar = all(isinstance(m, SymMat) for m in ms)
    dense = [symmat._dense(m) for m in ms]
    n = dense[0].shape[-1]
    if any(d.shape[-1] != n for d in dense):
        raise DimensionMismatch("all matrices must share one dimension")
    if len(dense) != n:
        raise DimensionMismatch(f"D_n needs exactly n={n} arguments, got {len(dense)}")
    return np.stack(np.broadcast_arrays(*dense)), scalar


def _out(value, scalar):
    return float(value) if scalar else value


def _signs(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def mixed_det(ms: Sequence):
    """Polarization formula ``(1 / (2^n n!)) sum_eps eps_1..eps_n det(sum eps_k M_k)``."""
    stack, scalar = _stack(ms)
    n = stack.shape[-1]
    signs = _signs(n)
    combos = np.tensordot(signs, stack, axes=(1, 0))
    weights = signs.prod(axis=1)
    dets = symmat.det(combos)
    value = np.tensordot(weights, dets, axes=(0, 0)) / (2**n * math.factorial(n))
    return _out(value, scalar)


def mixed_det_oracle(ms: Sequence):
    """Brute-force mixed determinant: mean over permutations of column-mixed determinants."""
    stack, scalar = _stack(ms)
    n = stack.shape[-1]
    acc = 0.0
    for perm in itertools.permutations(range(n)):
        cols = [stack[perm[j], ..., :, j] for j in range(n)]
        acc = acc + symmat.det(np.stack(cols, axis=-1))
    return _out(acc / math.factorial(n), scalar)


def mixed_det_one_off(b, m):
    """``D_n(B, M, ..., M) = Tr(B^T cof(M)) / n``."""
    bd, md = symmat._dense(b), symmat._dense(m)
    if bd.shape[-1] != md.shape[-1]:
        raise DimensionMismatch("B and M must share one dimension")
    n = md.shape[-1]
    value = np.einsum("...ij,...ij->...", bd, symmat.cofactor(md)) / n
    return _out(value, isinstance(b, SymMat) and isinstance(m, SymMat))


def _check_psd(as_: Sequence, tol: float) -> None:
    for k, a in enumerate(as_):
        if not np.all(symmat.is_psd(a, tol)):
            raise NotPSD(k)


def garding_gap(as_: Sequence, tol: float = TOL) -> Gap:
    """Reverse Hoelder pair: ``lhs = (prod det A_j)^(1/n)``, ``rhs = D_n(A_1..A_n)``."""
    _check_psd(as_, tol)
    stack, scalar = _stack(as_)
    n = stack.shape[-1]
    dets = np.clip(symmat.det(stack), 0.0, None)
    lhs = np.prod(dets, axis=0) ** (1.0 / n)
    rhs = mixed_det(as_)
    return Gap(_out(lhs, scalar), rhs)


def multilinear_upper(as_: Sequence, tol: float = TOL) -> Gap:
    """``lhs = D_n(A_1..A_n)``, ``rhs = det(A_1 + ... + A_n) / n!``."""
    _check_psd(as_, tol)
    stack, scalar = _stack(as_)
    n = stack.shape[-1]
    lhs = mixed_det(as_)
    rhs = symmat.det(stack.sum(axis=0)) / math.factorial(n)
    return Gap(lhs, _out(rhs, scalar))


def within(value, reference, tol: float = TOL):
    """``|value - reference| <= tol * (1 + |reference|)``, elementwise."""
    return np.abs(np.asarray(value) - np.asarray(reference)) <= tol * (1.0 + np.abs(reference))


# --- sampling campaigns -------------------------------------------------


def random_symmetric(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    g = rng.standard_normal((size, n, n))
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def random_psd(rng: np.random.Generator, n: int, size: int, rank_deficient: float = 0.2) -> np.ndarray:
    """Random PSD matrices ``G G^T``; a fraction get rank ``< n``."""
    g = rng.standard_normal((size, n, n))
    ranks = np.full(size, n)
    low = rng.random(size) < rank_deficient
    ranks[low] = rng.integers(0, n, size=int(low.sum()))
    mask = np.arange(n)[None, :] < ranks[:, None]
    g = g * mask[:, None, :]
    scale = np.exp(rng.uniform(-1.0, 1.0, size))[:, None, None]
    return scale * (g @ np.swapaxes(g, -1, -2))


def cross_validate(n: int, samples: int, seed: int = 0) -> dict:
    """Polarization vs permutation oracle and the one-off trace identity on random tuples."""
    rng = np.random.default_rng(seed)
    ms = [random_symmetric(rng, n, samples) for _ in range(n)]
    pol = mixed_det(ms)
    ora = mixed_det_oracle(ms)
    scale = np.prod([np.linalg.norm(m, axis=(-2, -1)) for m in ms], axis=0)
    rel = np.abs(pol - ora) / (1.0 + np.abs(ora))
    diag = mixed_det([ms[0]] * n)
    diag_rel = np.abs(diag - symmat.det(ms[0])) / (1.0 + np.abs(symmat.det(ms[0])))
    one = mixed_det_one_off(ms[1], ms[0])
    one_ref = mixed_det([ms[1]] + [ms[0]] * (n - 1))
    one_rel = np.abs(one - one_ref) / (1.0 + np.abs(one_ref))
    return {
        "n": n,
        "samples": samples,
        "max_rel_polarization_vs_oracle": float(rel.max()),
        "max_rel_diagonal": float(diag_rel.max()),
        "max_rel_one_off": float(one_rel.max()),
        "median_scale": float(np.median(scale)),
    }


def garding_campaign(n: int, samples: int, seed: int = 0, slack: float = TOL) -> dict:
    """Count violations of the reverse Hoelder and n!-upper bounds on random PSD tuples."""
    rng = np.random.default_rng(seed)
    as_ = [random_psd(rng, n, samples) for _ in range(n)]
    lhs, rhs = garding_gap(as_, tol=1e-8)
    up_lhs, up_rhs = multilinear_upper(as_, tol=1e-8)
    garding_viol = lhs > rhs + slack * (1.0 + np.abs(rhs))
    upper_viol = up_lhs > up_rhs + slack * (1.0 + np.abs(up_rhs))
    same = [as_[0]] * n
    eq_lhs, eq_rhs = garding_gap(same, tol=1e-8)
    return {
        "n": n,
        "samples": samples,
        "garding_violations": int(garding_viol.sum()),
        "upper_violations": int(upper_viol.sum()),
        "min_rhs": float(rhs.min()),
        "max_equality_gap": float(np.max(np.abs(eq_lhs - eq_rhs) / (1.0 + np.abs(eq_rhs)))),
    }
