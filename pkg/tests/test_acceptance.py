"""End-to-end acceptance battery.

Each test prints one verdict line so a full run reads as a ten-point
checklist; every criterion also asserts its runtime budget.
"""

import bisect
import contextlib
import io
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from prooflab.algorithms import proximal_point, trace_report
from prooflab.cli import main as cli_main
from prooflab.finite_types import ZERO, degree
from prooflab.formula_engine import (
    And,
    Exists,
    Forall,
    Implies,
    Or,
    check_interpretation_soundness,
    dialectica,
    generate_corpus,
)
from prooflab.majorization import (
    MajSamples,
    NOT_BOUNDED,
    bobs_uniform_majorant,
    check_majorizes,
    chi_majorant,
    monotone_hull,
    resolvent_majorant,
)
from prooflab.operator_lab import (
    COMONOTONE_GAMMAS,
    PreconditionViolated,
    STANDARD_GAMMAS,
    abs_subdifferential,
    build_catalog,
    check_minimal_norm_selection,
    check_resolvent_properties,
    identity_operator,
    l2,
    matrix_operator,
    resolvent,
    resolvent_param_modulus,
    verify_resolvent_param_modulus,
)
from prooflab.real_codes import canonical_rep, pair_j, rat_value
from prooflab.finite_types import parse_type


def verdict(num: int, label: str, ok: bool, elapsed: float, budget: float) -> None:
    state = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"criterion {num:>2} ({label}): {state} [{elapsed:.2f}s]")
    assert ok, f"criterion {num} ({label}) failed"
    assert elapsed < budget, f"criterion {num} over budget: {elapsed:.2f}s >= {budget}s"


def test_c01_pairing_exactness():
    start = time.perf_counter()
    cap = 81_000
    seen = set()
    ok = True
    for n in range(201):
        for m in range(201):
            target = (n + m) ** 2 + 3 * n + m
            # least u with 2u >= target; parity makes it exact
            u = bisect.bisect_left(range(cap), target, key=lambda v: 2 * v)
            ok = ok and target % 2 == 0 and 2 * u == target
            ok = ok and pair_j(n, m) == u and u not in seen
            seen.add(u)
    verdict(1, "pairing_exactness", ok, time.perf_counter() - start, 1.0)


def test_c02_canonical_code_fidelity():
    start = time.perf_counter()
    grid = [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(7, 5), Fraction(10)]
    ok = True
    tables = []
    for r in grid:
        rep = canonical_rep(r)
        codes = [rep(n).code for n in range(17)]
        vals = [rat_value(c) for c in codes]
        ok = ok and all(abs(v - r) <= Fraction(1, 2 ** (n + 1)) for n, v in enumerate(vals))
        ok = ok and all(a <= b for a, b in zip(codes, codes[1:]))
        tables.append((vals, codes))
    for (va, ca), (vb, cb) in zip(tables, tables[1:]):
        ok = ok and all(x <= y for x, y in zip(va, vb))
        ok = ok and all(x <= y for x, y in zip(ca, cb))
    verdict(2, "canonical_code_fidelity", ok, time.perf_counter() - start, 1.0)


def quantifier_depth(f) -> int:
    if isinstance(f, (Forall, Exists)):
        return 1 + quantifier_depth(f.body)
    if isinstance(f, (And, Or, Implies)):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 0


def binder_types(f):
    if isinstance(f, (Forall, Exists)):
        yield f.vtype
        yield from binder_types(f.body)
    elif isinstance(f, (And, Or, Implies)):
        yield from binder_types(f.left)
        yield from binder_types(f.right)


def test_c03_translation_soundness():
    start = time.perf_counter()
    corpus = generate_corpus(0, count=30)
    ok = len(corpus) >= 30
    for f in corpus:
        ok = ok and quantifier_depth(f) <= 2
        ok = ok and all(t == ZERO for t in binder_types(f))
        ok = ok and all(degree(t) <= 1 for _, t in dialectica(f).ex_vars)
        report = check_interpretation_soundness(f)
        ok = ok and report.model_size <= 3 and report.all_agree
    verdict(3, "translation_soundness", ok, time.perf_counter() - start, 60.0)


def test_c04_resolvent_property_suite():
    start = time.perf_counter()
    ops = build_catalog(0)
    plan = {
        "identity": (STANDARD_GAMMAS, 400),
        "psd_skew": (STANDARD_GAMMAS, 400),
        "abs_subdiff": (STANDARD_GAMMAS, 400),
        "box_normal_cone": (STANDARD_GAMMAS, 400),
        "neg_half_identity": (COMONOTONE_GAMMAS, 1000),
    }
    ok = True
    for name, (gammas, samples) in plan.items():
        op = ops[name]
        rng = np.random.default_rng(0)
        reports = check_resolvent_properties(op, rng, gammas, samples=samples)
        pair_budget = sum(samples // 2 for _ in gammas)
        ok = ok and pair_budget >= 1000
        for rep in reports.values():
            ok = ok and rep.passed and rep.worst_slack >= -1e-8
        if name == "neg_half_identity":
            ok = ok and "nonexpansive" not in reports
        else:
            needed = {
                "firmly_nonexpansive_norm_form",
                "firmly_nonexpansive_inner_form",
                "nonexpansive",
                "averaged_form",
                "conical_form",
                "resolvent_identity",
                "displacement_bound",
                "yosida_lipschitz",
                "yosida_norm_minimality",
            }
            ok = ok and needed <= set(reports)
    verdict(4, "resolvent_property_suite", ok, time.perf_counter() - start, 30.0)


def test_c05_parameter_modulus():
    start = time.perf_counter()
    instances = [
        abs_subdifferential(),
        identity_operator(2),
        matrix_operator(np.diag([2.0, 0.5])),
    ]
    rng = np.random.default_rng(11)
    checks = 0
    violations = 0
    ok = True
    for b in (1.0, 2.0, 4.0):
        for l_prime in (0, 1, 2):
            for k in range(7):
                j = resolvent_param_modulus(b, l_prime, k)
                ok = ok and j == math.floor(k + l_prime + math.log2(b))
                for op in instances:
                    for _ in range(6):
                        gamma_prime = 2.0**-l_prime + rng.random() * 2
                        x = rng.uniform(-1, 1, size=op.dim)
                        x = x / max(l2(x), 1e-9) * rng.random() * b
                        gamma = gamma_prime + (rng.random() * 2 - 1) * 2.0**-j
                        if gamma <= 0:
                            continue
                        try:
                            chk = verify_resolvent_param_modulus(
                                op, x, gamma, gamma_prime, b, l_prime, k
                            )
                        except PreconditionViolated:
                            continue
                        checks += 1
                        if not (chk.premise_holds and chk.bound_holds):
                            violations += 1
    ok = ok and checks >= 1000 and violations == 0
    verdict(5, "parameter_modulus", ok, time.perf_counter() - start, 10.0)


MAJ_TYPE = parse_type("0(0)(0(0))")


def hull_code(r, cap=64):
    return monotone_hull(lambda n: canonical_rep(r)(n).code, cap=cap)


def test_c06_majorant_formula():
    start = time.perf_counter()
    ops = build_catalog(0)
    # per instance: witnesses (n, m, l, k), reference parameter, gamma sampler
    plans = {
        "identity": ((0, 0, 2, 0), 1, lambda rng: rng.uniform(1.0, 4.0)),
        "psd_skew": ((0, 0, 2, 0), 1, lambda rng: rng.uniform(1.0, 4.0)),
        "abs_subdiff": ((0, 0, 2, 0), 1, lambda rng: rng.uniform(1.0, 4.0)),
        "box_normal_cone": ((0, 0, 2, 0), 1, lambda rng: rng.uniform(1.0, 4.0)),
        "neg_half_identity": ((0, 0, 4, 0), 8, lambda rng: rng.uniform(4.001, 16.0)),
        "tan_subgradient": ((2, 1, 1, 2), 1, lambda rng: rng.uniform(0.5, 2.0)),
    }
    ok = True
    for name, ((n_w, m_w, l_w, k_w), gamma_ref, draw) in plans.items():
        op = ops[name]
        rng = np.random.default_rng(13)
        records = []
        for _ in range(1000):
            gamma = draw(rng)
            if name == "tan_subgradient":
                x = np.array([gamma + rng.random() * 8 + 1e-6])
            else:
                x = rng.uniform(-8, 8, size=op.dim)
            records.append((l2(x), l2(resolvent(op, gamma, x))))
        ok = ok and len(records) >= 1000

        def value(_code, records=records):
            def at(x_star):
                return max((out for xin, out in records if xin <= x_star), default=0.0)

            return at

        candidate = resolvent_majorant(n_w, m_w, l_w, k_w)
        samples = (
            MajSamples()
            .add_mixed(parse_type("0(0)"), [(hull_code(gamma_ref), lambda n: canonical_rep(gamma_ref)(n).code)])
            .add_hat(parse_type("0(0)"), [(hull_code(2 * gamma_ref), hull_code(gamma_ref))])
            .add_mixed(ZERO, [(s, s) for s in (0, 1, 2, 5, 8, 11)])
            .add_hat(ZERO, [(5, 3), (8, 8), (2, 0)])
        )
        report = check_majorizes(candidate, value, MAJ_TYPE, samples)
        ok = ok and report.ok
    chi_samples = (
        MajSamples()
        .add_mixed(ZERO, [(3, 2), (5, 5), (0, 0), (7, 1)])
        .add_hat(ZERO, [(4, 2), (6, 6)])
    )
    rng = np.random.default_rng(4)
    for _ in range(20):
        bits = rng.integers(0, 2, size=(16, 16))
        chi = lambda x, bits=bits: lambda y: int(bits[x % 16, y % 16])
        rep = check_majorizes(chi_majorant(), chi, parse_type("0(0)(0)"), chi_samples)
        ok = ok and rep.ok
    verdict(6, "majorant_formula", ok, time.perf_counter() - start, 10.0)


def test_c07_minimal_norm_selection():
    start = time.perf_counter()
    ops = build_catalog(0)
    ok = True
    for name in ("abs_subdiff", "box_normal_cone"):
        reports = check_minimal_norm_selection(ops[name], np.random.default_rng(3), samples=100)
        for rep in reports.values():
            ok = ok and rep.passed
    for name, op in ops.items():
        rng = np.random.default_rng(5)
        sel_sup = [0.0] * 9
        min_sup = [0.0] * 9
        for _ in range(300):
            if name == "tan_subgradient":
                x = np.array([rng.uniform(1e-3, math.pi / 2 - 1e-3)])
            elif name == "box_normal_cone":
                x = rng.uniform(-1, 1, size=op.dim)
            else:
                x = rng.uniform(-8, 8, size=op.dim)
            ball = math.ceil(l2(x))
            if ball > 8 or not op.in_domain(x):
                continue
            mn = l2(op.minimal_norm(x))
            sl = l2(op.selection(x))
            ok = ok and mn <= sl + 1e-9
            for i in range(ball, 9):
                min_sup[i] = max(min_sup[i], mn)
                sel_sup[i] = max(sel_sup[i], sl)
        ok = ok and all(a <= b + 1e-9 for a, b in zip(min_sup, sel_sup))
    verdict(7, "minimal_norm_selection", ok, time.perf_counter() - start, 5.0)


def test_c08_proximal_point():
    start = time.perf_counter()
    trace = proximal_point(abs_subdifferential(), 3.5, "const:1.0", steps=50)
    ok = trace.reached_zero_at == 4
    ok = ok and [p[0] for p in trace.points] == [3.5, 2.5, 1.5, 0.5, 0.0]
    ops = build_catalog(0)
    rng = np.random.default_rng(17)
    for op in ops.values():
        if "monotone" not in op.declared_classes or op.zero_point is None:
            continue
        if op.rho is not None and op.rho < 0:
            continue
        for _ in range(3):
            x0 = rng.uniform(-3, 3, size=op.dim)
            run = proximal_point(op, x0, "const:1.0", steps=200)
            report = trace_report(run, zero=op.zero_point)
            ok = ok and report["fejer_monotone"] and not run.diverged
    verdict(8, "proximal_point", ok, time.perf_counter() - start, 5.0)


def test_c09_non_majorizable_witness():
    start = time.perf_counter()
    ops = build_catalog(0)
    ok = bobs_uniform_majorant(ops["tan_subgradient"]) is NOT_BOUNDED
    abs_table = bobs_uniform_majorant(ops["abs_subdiff"])
    ok = ok and [abs_table(n) for n in range(9)] == [1] * 9
    for name in ("identity", "psd_skew"):
        op = ops[name]
        basis = np.eye(op.dim)
        mat = np.column_stack([op.selection(basis[:, i]) for i in range(op.dim)])
        norm = float(np.linalg.norm(mat, 2))
        table = bobs_uniform_majorant(op)
        ok = ok and all(table(n) == math.ceil(norm * n) for n in range(9))
    verdict(9, "non_majorizable_witness", ok, time.perf_counter() - start, 1.0)


def run_battery(tmp_path):
    formula = tmp_path / "formula.sexp"
    formula.write_text("(forall (x 0) (exists (y 0) (= y (succ x))))")
    delta = tmp_path / "delta.sexp"
    delta.write_text("(forall (a 0) (existsleq (b 0) a (forall (c 0) (<= b a))))")
    trace_json = tmp_path / "trace.json"
    trace_csv = tmp_path / "trace.csv"
    battery = [
        ["types", "X(X)(0)"],
        ["types", "2"],
        ["translate", "--nt", str(formula)],
        ["translate", "--dialectica", str(formula)],
        ["delta", str(delta)],
        ["real", "canon", "7/5", "--prec", "6"],
        ["majorant", "resolvent", "--n", "2", "--m", "1", "--l", "1", "--k", "3"],
        ["majorant", "bobs", "soft_threshold"],
        ["majorant", "bobs", "tan_subgradient"],
        ["oplab", "verify", "soft_threshold", "--samples", "60", "--seed", "7"],
        ["oplab", "verify", "neg_half", "--samples", "40", "--seed", "5"],
        ["oplab", "verify", "psd_skew", "--samples", "40", "--seed", "2", "--jobs", "3"],
        ["run", "ppa", "--instance", "soft_threshold", "--x0", "3.5",
         "--out", str(trace_json)],
        ["run", "ppa", "--instance", "box", "--x0", "2,2,2", "--gamma", "harmonic:2",
         "--steps", "30"],
        ["run", "ppa", "--instance", "psd_skew", "--x0", "1,1,1,1,1,1",
         "--steps", "40", "--format", "csv", "--out", str(trace_csv)],
        ["run", "moudafi", "--instance", "identity", "--x0", "8,0", "--steps", "10"],
        ["report", str(trace_json), "--zero", "0"],
    ]
    chunks = []
    for argv in battery:
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli_main(argv)
        chunks.append(f"$ {' '.join(argv)}\n{code}\n{out.getvalue()}{err.getvalue()}")
    chunks.append(trace_json.read_text())
    chunks.append(trace_csv.read_text())
    return "".join(chunks)


def test_c10_cli_determinism(tmp_path):
    start = time.perf_counter()
    first = run_battery(tmp_path)
    second = run_battery(tmp_path)
    ok = first == second and len(first) > 0
    verdict(10, "cli_determinism", ok, time.perf_counter() - start, 60.0)
