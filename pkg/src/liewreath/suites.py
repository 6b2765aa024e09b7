"""Verification suites run by the ``verify`` command.

Each suite is split into independent cells. A cell is a pure function of
picklable arguments returning a list of result dicts, so cells can be spread
over a process pool; results are sorted by key before reporting.
"""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor

from .action import load_action, make_action, pointwise_bracket
from .extension import (
    EXTENSION_FIXTURES,
    h_closed_form_nilpotent,
    h_series,
    h_series_C,
    load_extension,
    nilpotency_of_R,
    proof_identities,
    verify_embedding,
)
from .fundamental import fundamental_action, identity_suite, nilpotent_fundamental_jet
from .lie import FIXTURES, abelian, load_lie, nilpotency_bound
from .polyjet import Jet
from .sampling import random_poly_jet, random_vector
from .spaces import SpaceDesc
from .vectorfield import bracket_S, derive
from .wreath import (
    WreathElement,
    abelian_closed_form,
    fundamental_wreath,
    random_element,
    sigma_derivation_check,
    triangular_cells,
    wreath_bracket,
)

SUITES = ("jacobi", "identities", "fundamental", "wreath", "embedding")


def worker_count() -> int:
    raw = os.environ.get("LIEW_WORKERS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _cell(suite, key, ok, witness=None, **extra):
    out = {"suite": suite, "key": key, "ok": bool(ok), "witness": witness}
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# jacobi: S(X), pointwise brackets, fixture tables


def jacobi_S_cell(seed: int, samples: int, max_dim: int = 3, max_deg: int = 4) -> list:
    rng = random.Random(seed)
    out = []
    for k in range(samples):
        n = rng.randint(1, max_dim)
        X = SpaceDesc.standard("X", n, "x")
        xi, eta, zeta = (random_poly_jet(rng, X, X, rng.randint(0, max_deg), density=0.4) for _ in range(3))
        lhs = bracket_S(xi, bracket_S(eta, zeta))
        rhs = bracket_S(bracket_S(xi, eta), zeta) - bracket_S(bracket_S(xi, zeta), eta)
        diff = lhs.first_difference(rhs)
        f = random_poly_jet(rng, X, SpaceDesc.standard("F", 1, "f"), max_deg, density=0.4)
        lhs2 = derive(bracket_S(xi, eta), f)
        rhs2 = derive(xi, derive(eta, f)) - derive(eta, derive(xi, f))
        diff2 = lhs2.first_difference(rhs2)
        out.append(_cell("jacobi", f"S(X) seed={seed} sample={k:03d}", diff is None and diff2 is None,
                         None if diff is None and diff2 is None else
                         {"jacobi_degree": diff and diff[0], "bracket_degree": diff2 and diff2[0]}))
    return out


def jacobi_pointwise_cell(name: str, seed: int, samples: int) -> list:
    L = load_lie(name)
    rng = random.Random(seed)
    Y = SpaceDesc.standard("Y", 2, "y")
    out = []
    for k in range(samples):
        f, g, h = (random_poly_jet(rng, Y, L.space, 3, density=0.4) for _ in range(3))
        pb = lambda a, b: pointwise_bracket(a, b, L)
        lhs = pb(f, pb(g, h))
        rhs = pb(pb(f, g), h) - pb(pb(f, h), g)
        diff = lhs.first_difference(rhs)
        out.append(_cell("jacobi", f"A[[Y]] {name} sample={k:03d}", diff is None,
                         None if diff is None else {"degree": diff[0]}))
    return out


def fixture_table_cell(name: str) -> list:
    try:
        load_lie(name)
        return [_cell("jacobi", f"table {name}", True)]
    except ValueError as exc:
        return [_cell("jacobi", f"table {name}", False, {"error": str(exc)})]


# ---------------------------------------------------------------------------
# identities


def identities_cell(max_m: int, seed: int) -> list:
    algs = [load_lie(n) for n in ("sl2", "heisenberg_3", "solvable_2")]
    out = []
    for c in identity_suite(max_m, algs, seed=seed):
        params = ",".join(f"{k}={v}" for k, v in c["params"].items())
        out.append(_cell("identities", f"{c['identity']} [{params}]", c["ok"], c["witness"]))
    return out


# ---------------------------------------------------------------------------
# fundamental action


def fundamental_cell(name: str, N: int) -> list:
    B = load_lie(name)
    d = fundamental_action(B, N, check=False)
    out = []
    for i in range(B.dim):
        for j in range(i + 1, B.dim):
            lhs = d.image(B.table[i][j])
            rhs = bracket_S(d.images[i], d.images[j])
            diff = lhs.first_difference(rhs)
            top = "all" if lhs.polynomial and rhs.polynomial else str(min(lhs.valid_order, rhs.valid_order))
            out.append(_cell("fundamental", f"{name} d_[{B.labels[i]},{B.labels[j]}] N={N}",
                             diff is None, None if diff is None else {"degree": diff[0]},
                             compared_up_to=top))
    k = nilpotency_bound(B)
    if k is not None and k <= 3:
        ok = all(nilpotent_fundamental_jet(B, B.element(lab), N).agrees_with(img)
                 for lab, img in zip(B.labels, d.images))
        out.append(_cell("fundamental", f"{name} nilpotent shortcut", ok))
    return out


# ---------------------------------------------------------------------------
# wreath products


def abelian_closed_form_cell(seed: int, samples: int, N: int) -> list:
    rng = random.Random(seed)
    A = abelian(1)
    W = fundamental_wreath(A, abelian(1), N)
    out = []
    for k in range(samples):
        f = random_poly_jet(rng, W.Y, A.space, N, density=0.6)
        g = random_poly_jet(rng, W.Y, A.space, N, density=0.6)
        b, c = random_vector(rng, 1), random_vector(rng, 1)
        res = wreath_bracket(WreathElement(f, b), WreathElement(g, c), W)
        expect = abelian_closed_form(f, g, b[0], c[0])
        ok = res.b == (0,) and res.f.agrees_with(expect)
        out.append(_cell("wreath", f"abelian closed form sample={k:03d}", ok))
    return out


def wreath_jacobi_cell(pair: tuple, seed: int, samples: int, N: int) -> list:
    A, B = load_lie(pair[0]), load_lie(pair[1])
    W = fundamental_wreath(A, B, N)
    rng = random.Random(seed)
    out = []
    for k in range(samples):
        u, v, w = (random_element(W, rng, max_deg=2) for _ in range(3))
        br = lambda x, y: wreath_bracket(x, y, W)
        lhs = br(u, br(v, w))
        rhs = br(br(u, v), w) - br(br(u, w), v)
        anti = br(u, v) + br(v, u)
        ok = lhs.agrees_with(rhs) and not any(anti.b) and anti.f.is_zero(anti.f.valid_order)
        out.append(_cell("wreath", f"W({pair[0]},{pair[1]}) jacobi sample={k:03d}", ok,
                         None if ok else {"first_difference": _deg(lhs.f.first_difference(rhs.f))}))
    sigma = sigma_derivation_check(W, seed=seed, samples=2)
    out.append(_cell("wreath", f"W({pair[0]},{pair[1]}) sigma laws", not sigma, sigma or None))
    return out


def _deg(diff):
    return None if diff is None else diff[0]


def triangular_setup(which: str, N: int):
    """The two (D, d) fixture pairs: abelian on abelian, and sl2 acting on a line
    with the fundamental action of heisenberg_3."""
    if which == "abelian":
        A = abelian(1)
        X = SpaceDesc.standard("X", 1, "x")
        D = make_action(A, X, [Jet.from_terms(X, X, 1, [((1,), 0, 1)], polynomial=True)])
        return fundamental_wreath(A, abelian(1, prefix="b"), N), D
    D = load_action("sl2_projective_action")
    return fundamental_wreath(D.algebra, load_lie("heisenberg_3"), N), D


def triangular_cell(which: str, seed: int, samples: int, N: int) -> list:
    W, D = triangular_setup(which, N)
    rng = random.Random(seed)
    out = []
    for k in range(samples):
        u, v = random_element(W, rng, max_deg=2), random_element(W, rng, max_deg=2)
        for c in triangular_cells(W, D, u, v):
            out.append(_cell("wreath", f"triangular {which} seed={seed} sample={k:03d} {c['identity']}",
                             c["ok"], None if c["ok"] else {"degree": c["degree"]},
                             compared_up_to=c["compared_up_to"]))
    return out


# ---------------------------------------------------------------------------
# embeddings of extensions


def embedding_cell(name: str, N: int, seed: int, max_m: int) -> list:
    ext = load_extension(name)
    rep = verify_embedding(ext, N)
    out = [_cell("embedding", f"{name} hom {c['pair'][0]},{c['pair'][1]} N={N}", c["ok"],
                 None if c["ok"] else {"degree": c["degree"], "defect": c["defect"]})
           for c in rep["homomorphism"]]
    out.append(_cell("embedding", f"{name} injective", rep["injective"], {"rank": rep["rank"]}))
    rng = random.Random(seed)
    for k in range(3):
        c = random_vector(rng, ext.C.dim)
        hc = h_series_C(ext, c, N)
        ok = all(not any(ext.p(v)) for comp in hc.components for v in comp.coeffs.values())
        out.append(_cell("embedding", f"{name} p(h_c)=0 sample={k}", ok))
    for c in proof_identities(ext, min(max_m, 6)):
        out.append(_cell("embedding", f"{name} proof {c['identity']} {c['pair'][0]},{c['pair'][1]}",
                         c["ok"], None if c["ok"] else {"degree": c["degree"]}))
    if nilpotency_of_R(ext) is not None:
        ok = all(h_closed_form_nilpotent(ext, lab, N).agrees_with(h_series(ext, lab, N))
                 for lab in ext.C.labels)
        out.append(_cell("embedding", f"{name} nilpotent closed form", ok))
    return out


# ---------------------------------------------------------------------------


def suite_tasks(suite: str, order: int, seed: int, max_m: int) -> list:
    """(function, args) pairs making up ``suite``."""
    N = order
    if suite == "jacobi":
        tasks = [(jacobi_S_cell, (seed * 1000 + s, 20)) for s in range(10)]
        tasks += [(jacobi_pointwise_cell, (n, seed, 5)) for n in ("heisenberg_3", "sl2", "solvable_2")]
        tasks += [(fixture_table_cell, (n,)) for n in FIXTURES]
        return tasks
    if suite == "identities":
        return [(identities_cell, (max_m, seed))]
    if suite == "fundamental":
        return [(fundamental_cell, (n, min(N, 6) if n == "sl2" else N)) for n in FIXTURES]
    if suite == "wreath":
        tasks = [(abelian_closed_form_cell, (seed, 30, min(N, 6)))]
        tasks += [(wreath_jacobi_cell, (p, seed, 3, min(N, 5)))
                  for p in (("heisenberg_3", "abelian_2"), ("sl2", "heisenberg_3"), ("abelian_1", "solvable_2"))]
        tasks += [(triangular_cell, (w, seed * 100 + s, 5, N)) for w in ("abelian", "sl2") for s in range(5)]
        return tasks
    if suite == "embedding":
        return [(embedding_cell, (n, N, seed, max_m)) for n in EXTENSION_FIXTURES]
    raise ValueError(f"unknown suite {suite!r}")


def _run(task):
    fn, args = task
    return fn(*args)


def run_suites(names, order: int = 8, seed: int = 0, max_m: int = 12, workers: int | None = None) -> dict:
    if order < 2:
        raise ValueError("order must be >= 2")
    tasks = []
    for name in names:
        tasks.extend(suite_tasks(name, order, seed, max_m))
    workers = min(workers or worker_count(), len(tasks))
    if workers <= 1:
        results = [_run(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, tasks))
    cells = sorted((c for r in results for c in r), key=lambda c: (c["suite"], c["key"]))
    return {"status": "pass" if all(c["ok"] for c in cells) else "fail",
            "suites": list(names), "order": order, "seed": seed, "max_m": max_m,
            "cells": cells, "failed": [c for c in cells if not c["ok"]]}
