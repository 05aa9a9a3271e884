"""Brute-force ground truth for the closed-form counts.

Étale: count g-tuples in F_{q^n} whose entries generate F_{q^n} over F_q
(lcm of the subfield degrees equals n). Matrix: count g-tuples generating
M_m(F_{q^n}) by span closure. Tuples are indexed 0 .. total-1 in lexicographic
order of their concatenated coordinate vectors, so any split of that range
into chunks gives the same total.
"""

from __future__ import annotations

import concurrent.futures
import functools
import hashlib
import logging
import math
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from statistics import NormalDist

import numpy as np

from .counting import exact_div, group_order_c
from .errors import Infeasible
from .finite_field import DEFAULT_GUARD, as_prime_power, make_field, subfield_degree_table
from .matrix_algebra import (
    MatrixAlgebra,
    MatrixTuple,
    _closure_inputs,
    closure_rank,
    matrix_algebra,
)

log = logging.getLogger(__name__)

_CHUNK = 1 << 18


@dataclass(frozen=True)
class OracleResult:
    kind: str  # "etale" | "matrix"
    q: int
    n: int
    m: int
    g: int
    mode: str  # "exhaustive" | "montecarlo"
    raw_count: int  # generating tuples found (hits, for Monte Carlo)
    normalized: int | None = None  # raw / n or raw / C; exhaustive only
    group_order: int | None = None
    samples: int | None = None
    seed: int | None = None
    point: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "q": str(self.q), "n": str(self.n), "m": str(self.m), "g": str(self.g), "mode": self.mode}
        if self.mode == "exhaustive":
            out.update({"S_g": str(self.raw_count), "N": str(self.normalized), "C": str(self.group_order)})
        else:
            out.update(
                {
                    "hits": str(self.raw_count),
                    "samples": str(self.samples),
                    "seed": str(self.seed),
                    "point": f"{self.point:.10f}",
                    "ci_low": f"{self.ci_low:.10f}",
                    "ci_high": f"{self.ci_high:.10f}",
                    "confidence": "0.99",
                }
            )
        return out


def partition(total: int, parts: int) -> list[tuple[int, int]]:
    """Split range(total) into ``parts`` contiguous, nearly equal chunks."""
    parts = max(1, parts)
    step, extra = divmod(total, parts)
    out, start = [], 0
    for i in range(parts):
        stop = start + step + (1 if i < extra else 0)
        out.append((start, stop))
        start = stop
    return out


def _run_chunks(fn, args_list, workers: int) -> int:
    if workers <= 1 or len(args_list) <= 1:
        return sum(fn(*a) for a in args_list)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(fn, *zip(*args_list)))


# -- étale --------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _degree_table(q: int, n: int) -> np.ndarray:
    qq = as_prime_power(q)
    F = make_field(qq.p, qq.e * n)
    return subfield_degree_table(F, qq, n, guard=2**62)


def _etale_chunk(q: int, n: int, g: int, start: int, stop: int) -> int:
    deg = _degree_table(q, n)
    size = len(deg)
    hits = 0
    for lo in range(start, stop, _CHUNK):
        idx = np.arange(lo, min(stop, lo + _CHUNK), dtype=np.int64)
        acc = np.ones(len(idx), dtype=np.int64)
        for i in range(g):
            digit = (idx // size ** (g - 1 - i)) % size
            acc = np.lcm(acc, deg[digit])
        hits += int((acc == n).sum())
    return hits


def count_etale(q, n: int, g: int, *, guard: int = DEFAULT_GUARD, parts: int = 1, workers: int = 1) -> OracleResult:
    """Enumerate (F_{q^n})^g and count tuples with F_q[a_1..a_g] = F_{q^n}."""
    qv = as_prime_power(q).value
    total = qv ** (n * g)
    if total > guard:
        raise Infeasible(f"enumerating (F_{qv}^{n})^{g}", total, guard)
    raw = _run_chunks(_etale_chunk, [(qv, n, g, a, b) for a, b in partition(total, parts)], workers)
    return OracleResult("etale", qv, n, 1, g, "exhaustive", raw, exact_div(raw, n, "etale orbit count"), n)


# -- matrices ------------------------------------------------------------------------

def _digits(idx: np.ndarray, base: int, width: int) -> np.ndarray:
    out = np.empty((len(idx), width), dtype=np.int64)
    rest = idx.copy()
    for j in range(width - 1, -1, -1):
        out[:, j] = rest % base
        rest //= base
    return out


def _generates_vectors(alg: MatrixAlgebra, vecs: np.ndarray) -> bool:
    t = MatrixTuple.from_vectors(alg, vecs)
    seed, maps = _closure_inputs(t)
    return closure_rank(seed, maps, alg.p, alg.dim) == alg.dim


def _matrix_chunk(q: int, n: int, m: int, g: int, start: int, stop: int) -> int:
    alg = matrix_algebra(q, n, m)
    width = g * alg.dim
    hits = 0
    for lo in range(start, stop, _CHUNK):
        block = _digits(np.arange(lo, min(stop, lo + _CHUNK), dtype=np.int64), alg.p, width)
        for row in block:
            if _generates_vectors(alg, row.reshape(g, alg.dim)):
                hits += 1
    return hits


def matrix_tuple_count(q, n: int, m: int, g: int) -> int:
    qv = as_prime_power(q).value
    return qv ** (n * m * m * g)


def count_matrix(q, n: int, m: int, g: int, *, guard: int = DEFAULT_GUARD, parts: int = 1, workers: int = 1) -> OracleResult:
    """|S_g| by exhaustive span closure, and N_{q,n,m}(g) = |S_g| / C."""
    qv = as_prime_power(q).value
    total = matrix_tuple_count(qv, n, m, g)
    if total > guard:
        raise Infeasible(f"enumerating M_{m}(F_{qv}^{n})^{g}", total, guard)
    C = group_order_c(qv, n, m)
    raw = _run_chunks(_matrix_chunk, [(qv, n, m, g, a, b) for a, b in partition(total, parts)], workers)
    return OracleResult("matrix", qv, n, m, g, "exhaustive", raw, exact_div(raw, C, "|S_g| / C"), C)


_Z99 = NormalDist().inv_cdf(0.995)


def wilson_interval(hits: int, samples: int, z: float = _Z99) -> tuple[float, float]:
    phat = hits / samples
    denom = 1 + z * z / samples
    centre = (phat + z * z / (2 * samples)) / denom
    half = z / denom * math.sqrt(phat * (1 - phat) / samples + z * z / (4 * samples * samples))
    return max(0.0, centre - half), min(1.0, centre + half)


def estimate_matrix_fraction(q, n: int, m: int, g: int, samples: int, seed: int) -> OracleResult:
    """Estimate |S_g| / q^(g n m^2) from uniform random tuples, with a 99% Wilson interval."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    alg = matrix_algebra(q, n, m)
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, alg.p, size=(samples, g, alg.dim))
    hits = sum(_generates_vectors(alg, d) for d in draws)
    lo, hi = wilson_interval(hits, samples)
    point = hits / samples
    return OracleResult(
        "matrix", alg.q.value, n, m, g, "montecarlo", hits,
        group_order=group_order_c(alg.q.value, n, m),
        samples=samples, seed=seed, point=point, ci_low=min(lo, point), ci_high=max(hi, point),
    )


# -- cache ----------------------------------------------------------------------------

DEFAULT_CACHE_DIR = ".sepgen-cache"


def resolve_cache_dir(flag: str | None = None) -> Path:
    """Flag beats SEPGEN_CACHE beats the local default."""
    return Path(flag or os.environ.get("SEPGEN_CACHE") or DEFAULT_CACHE_DIR)


def cache_key(kind: str, q: int, n: int, m: int, g: int, mode: str, samples=None, seed=None) -> str:
    key = f"{kind}-q{q}-n{n}-m{m}-g{g}-{mode}"
    if mode == "montecarlo":
        key += f"-s{samples}-seed{seed}"
    return key


def _encode(result: OracleResult) -> str:
    body = "".join(f"{k}={'' if v is None else repr(v) if isinstance(v, float) else v}\n" for k, v in asdict(result).items())
    return body + "checksum=" + hashlib.sha256(body.encode()).hexdigest() + "\n"


def _decode(text: str) -> OracleResult | None:
    body, sep, tail = text.rpartition("checksum=")
    if not sep or hashlib.sha256(body.encode()).hexdigest() != tail.strip():
        return None
    raw = dict(line.split("=", 1) for line in body.splitlines())
    kw = {}
    for f in fields(OracleResult):
        v = raw.get(f.name)
        if v is None:
            return None
        if v == "":
            kw[f.name] = None
        elif f.name in ("kind", "mode"):
            kw[f.name] = v
        elif f.name in ("point", "ci_low", "ci_high"):
            kw[f.name] = float(v)
        else:
            kw[f.name] = int(v)
    return OracleResult(**kw)


class CacheStore:
    """One text file per key: ``field=value`` lines then a sha256 checksum line."""

    def __init__(self, directory):
        self.directory = Path(directory)

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.txt"

    def get(self, key: str) -> OracleResult | None:
        try:
            text = self.path(key).read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        except OSError as exc:
            log.warning("cache read failed for %s: %s", key, exc)
            return None
        result = _decode(text)
        if result is None:
            log.warning("corrupt cache entry %s; will recompute", key)
        return result

    def put(self, key: str, result: OracleResult) -> bool:
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            tmp = self.path(key).with_suffix(".tmp")
            tmp.write_text(_encode(result), encoding="utf-8")
            tmp.replace(self.path(key))
            return True
        except OSError as exc:
            log.warning("cache unavailable (%s); continuing uncached", exc)
            return False


def cache_get(store: CacheStore, key: str) -> OracleResult | None:
    return store.get(key)


def cache_put(store: CacheStore, key: str, result: OracleResult) -> bool:
    return store.put(key, result)


def cached(store: CacheStore | None, key: str, compute):
    """Return the stored result for ``key`` or compute, store and return it."""
    if store is not None:
        hit = store.get(key)
        if hit is not None:
            return hit
    result = compute()
    if store is not None:
        store.put(key, result)
    return result
