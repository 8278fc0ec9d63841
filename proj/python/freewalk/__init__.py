"""Random matrix products in SL_d over R and Q_p: decompositions, ping-pong
certificates and walk statistics.  Matrices are lists of rows; entries may be
int, float, Fraction or strings like "-1/9".  Exact results come back as
Fraction."""

from fractions import Fraction

from . import _core

__all__ = [
    "kak",
    "iwasawa",
    "certify",
    "free_word_oracle",
    "find_relations",
    "lyapunov",
    "run_config",
    "philox4x32_10",
    "rng_name",
]

rng_name = _core.rng_name
philox4x32_10 = _core.philox4x32_10
run_config = _core.run_config


def _rows(m):
    return [[str(x) for x in row] for row in m]


def _exact(x):
    return Fraction(x) if isinstance(x, str) else x


def _unpack(d):
    return {
        key: [_exact(x) for x in val] if key == "a" else [[_exact(x) for x in row] for row in val]
        for key, val in d.items()
    }


def kak(matrix, p=0):
    """g = k diag(a) u.  p = 0: reals, otherwise the p-adic field."""
    return _unpack(_core.kak(_rows(matrix), p))


def iwasawa(matrix, p=0):
    """g = k diag(a) n with n upper unitriangular."""
    return _unpack(_core.iwasawa(_rows(matrix), p))


def certify(generators, r, eps, p=0, exact=False):
    return _core.certify([_rows(g) for g in generators], r, eps, p, exact)


def free_word_oracle(generators, max_len):
    """(relation_found, shortest relation) over reduced words up to max_len."""
    return _core.free_word_oracle([_rows(g) for g in generators], max_len)


def find_relations(generators, max_len, limit=1000):
    return _core.find_relations([_rows(g) for g in generators], max_len, limit)


def lyapunov(atoms, probs, n, reps, seed, p=0, threads=1):
    return _core.lyapunov([_rows(a) for a in atoms], [str(x) for x in probs], n, reps, seed, p, threads)
