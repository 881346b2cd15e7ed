"""Command-line front end.

Commands: check, analyze, simulate, extract-im, embed, example.
Exit codes: 0 all properties hold, 1 a property failed, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import random
import sys as _sys

import numpy as np

from .. import __version__
from ..errors import (
    DecompositionError,
    ImkError,
    InputError,
    NoEmbeddingError,
    NoInternalModelError,
    NumericalError,
)
from ..grading import Grade, weakest
from ..expr import to_string
from ..exo import Exosystem, check_no_stable_modes, check_poisson_stable, exo_char_poly
from ..linpoly import (
    Poly,
    RationalFn,
    check_linear_adaptation,
    extract_internal_model_linear,
    solve_embedding,
    transfer_function,
)
from ..nform import affine_from_linear, build_normal_form, internal_model_output
from ..sim import (
    IntegratorControls,
    check_adaptation,
    integrate_cascade,
    omega_limit_sample,
    verify_im_reproduction,
    verify_output_zeroing,
)
from ..vfield import check_assumptions
from .presets import PRESETS
from .report import (
    complex_json,
    emit_json,
    matrix_json,
    num_json,
    poly_json,
    sha256_file,
    write_atomic,
)
from .schemas import LoadedSystem, load_exosystem_file, load_system

DEFAULTS = {
    "horizon": 50.0,
    "tol_y": 1e-6,
    "trials": 5,
    "seed": 0,
    "eps_stab": 1e-9,
    "pairing_tol": 1e-6,
    "witness_threshold": 1e-8,
    "transient_fraction": 0.5,
    "radius_factor": 1e-4,
}

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _base_report(seed: int, **inputs) -> dict:
    report = {
        "tool": {"name": "imkit", "version": __version__},
        "timestamp": _timestamp(),
        "seed": seed,
        "defaults": dict(DEFAULTS),
        "inputs": {},
    }
    for name, path in inputs.items():
        report["inputs"][name] = {"path": path, "sha256": sha256_file(path)}
    return report


def _emit(report: dict, path: str | None):
    text = emit_json(report) + "\n"
    _sys.stdout.write(text)
    if path:
        write_atomic(path, text)


def _zero_status_json(status) -> dict:
    out = {"kind": status.kind, "grade": status.grade}
    if status.constant is not None:
        out["constant"] = num_json(status.constant)
    if status.kind == "sampled_zero":
        out["samples"] = status.samples
        out["max_abs"] = status.max_abs
    if status.witness is not None:
        out["witness"] = list(status.witness)
        out["witness_value"] = status.witness_value
    return out


def _assumptions_section(loaded: LoadedSystem, seed: int) -> tuple[dict, bool, Grade]:
    sys_aff = loaded.as_affine()
    rep = check_assumptions(sys_aff, seed=seed)
    rel = rep.rel
    section: dict = {
        "relative_degree": {
            "status": "found" if rel.found else "no_uniform",
            "r": rel.r,
            "grade": rel.quality,
            "chain": [to_string(e) for e in rel.chain],
            "decisive": to_string(rel.decisive) if rel.decisive is not None else None,
        }
    }
    if rel.reason:
        section["relative_degree"]["reason"] = rel.reason
    if rel.witness is not None:
        section["relative_degree"]["witness"] = list(rel.witness)
    if sys_aff.warnings:
        section["warnings"] = list(sys_aff.warnings)
    if rep.taus is not None:
        section["tau_fields"] = [
            [to_string(c) for c in tau.components] for tau in rep.taus.taus
        ]
        section["g_tilde"] = [to_string(c) for c in rep.taus.g_tilde.components]
        section["completeness"] = list(rep.completeness)
        comm = {"status": rep.commutativity.status}
        if rep.commutativity.witness_pair is not None:
            comm["witness_pair"] = list(rep.commutativity.witness_pair)
            comm["witness_component"] = to_string(rep.commutativity.witness_component)
        section["commutativity"] = comm
    failed = not rep.all_hold
    return section, failed, rep.overall_grade


def cmd_check(args) -> int:
    loaded = load_system(args.system)
    report = _base_report(args.seed, system=args.system)
    report["command"] = "check"
    section, failed, grade = _assumptions_section(loaded, args.seed)
    report["assumptions"] = section
    report["overall"] = {"ok": not failed, "grade": Grade.FAILED if failed else grade}
    _emit(report, args.report)
    return EXIT_FAILED if failed else EXIT_OK


def _sample_boxes(rng: random.Random, box, dim: int, count: int):
    box = box or tuple((-1.0, 1.0) for _ in range(dim))
    return [tuple(rng.uniform(lo, hi) for lo, hi in box) for _ in range(count)]


def _adaptation_section(report, loaded, exo, args, controls):
    sys_aff = loaded.as_affine()
    rng = random.Random(args.seed)
    x0s = _sample_boxes(rng, sys_aff.domain, sys_aff.n, args.trials)
    w0s = _sample_boxes(rng, exo.initial_box, exo.m, args.trials)
    pairs = list(zip(x0s, w0s))
    adak = check_adaptation(
        sys_aff,
        exo,
        [p[0] for p in pairs],
        [p[1] for p in pairs],
        horizon=args.horizon,
        tol_y=args.tol,
        controls=controls,
        params=loaded.param_floats,
        pairs=pairs,
    )
    trials_json = []
    for t in adak.trials:
        entry = {
            "x0": list(t.x0),
            "w0": list(t.w0),
            "passed": t.passed,
            "max_final_y": t.max_final_y,
            "max_state_norm": t.max_state_norm,
            "horizon_used": t.horizon_used,
            "extensions": t.extensions,
        }
        if t.failure:
            entry["failure"] = t.failure
        trials_json.append(entry)
    report["adaptation"] = {
        "passed": adak.passed,
        "grade": Grade.SAMPLED if adak.passed else Grade.FAILED,
        "tol_y": adak.tol_y,
        "horizon": adak.horizon,
        "trials": trials_json,
    }
    return adak


def _omega_sections(report, loaded, exo, adak, args, controls):
    sys_aff = loaded.as_affine()
    seen = []
    for t in adak.trials:
        if t.w0 not in [w for w, _ in seen]:
            seen.append((t.w0, t))
        if len(seen) >= 3:
            break
    omega_json = []
    zero_json = []
    samples = []
    all_zeroed = True
    for w0, trial in seen:
        horizon = 4.0 * trial.horizon_used
        sample = omega_limit_sample(
            sys_aff, exo, trial.x0, w0, horizon=horizon,
            transient_fraction=DEFAULTS["transient_fraction"],
            radius_factor=DEFAULTS["radius_factor"],
            controls=controls, params=loaded.param_floats,
        )
        samples.append((w0, trial, sample))
        entry = {
            "w0": list(w0),
            "horizon": horizon,
            "candidates": [
                {"w": list(w), "x": list(x)} for w, x in sample.candidates
            ],
            "visit_counts": list(sample.visit_counts),
            "near_w0": list(sample.near_w0),
        }
        if sample.diagnostic:
            entry["diagnostic"] = sample.diagnostic
        omega_json.append(entry)
        verdict = verify_output_zeroing(
            sys_aff, exo, sample, tol=args.tol, controls=controls, params=loaded.param_floats
        )
        all_zeroed &= verdict.passed
        zero_json.append(
            {
                "w0": list(w0),
                "passed": verdict.passed,
                "checks": [
                    {
                        "x": list(c.x),
                        "h_value": c.h_value,
                        "max_h_along_flow": c.max_h_along,
                        "passed": c.passed,
                        **({"detail": c.detail} if c.detail else {}),
                    }
                    for c in verdict.checks
                ],
            }
        )
    report["omega_limit"] = {"grade": Grade.SAMPLED, "per_w0": omega_json}
    report["output_zeroing"] = {
        "passed": all_zeroed,
        "grade": Grade.SAMPLED if all_zeroed else Grade.FAILED,
        "tol": args.tol,
        "per_w0": zero_json,
    }
    return samples, all_zeroed


def _linear_im_section(loaded, exo, args, controls, samples):
    linear = loaded.linear
    S = transfer_function(linear)
    pi = exo_char_poly(exo)
    section: dict = {
        "pipeline": "linear",
        "transfer_function": {"num": poly_json(S.num), "den": poly_json(S.den)},
        "pi": poly_json(pi),
    }
    nsm_ok, nsm_eigs = check_no_stable_modes(exo, DEFAULTS["eps_stab"])
    section["exosystem_no_stable_modes"] = {
        "ok": nsm_ok,
        "eigenvalues": [complex_json(z) for z in nsm_eigs],
    }
    G = RationalFn(Poly([1]), pi)
    gs = check_linear_adaptation(S, G, DEFAULTS["eps_stab"], DEFAULTS["pairing_tol"])
    section["gs_stability"] = {
        "stable": gs.stable,
        "poles": [complex_json(z) for z in gs.poles],
        "cancelled_pairs": [[complex_json(a), complex_json(b)] for a, b in gs.cancelled],
        "eps_stab": gs.eps_stab,
        "pairing_tol": gs.pairing_tol,
    }
    result = extract_internal_model_linear(S, pi, DEFAULTS["eps_stab"], DEFAULTS["pairing_tol"])
    fd_a, fd_b = result.a, result.b
    section["division"] = {"a": poly_json(fd_a), "b": poly_json(fd_b)}
    section["p0"] = poly_json(result.p0)
    section["b1"] = poly_json(result.b1)
    section["b2"] = poly_json(result.b2)
    section["realization"] = {
        "companion": matrix_json(result.realization.A_float()),
        "input_column": [float(v) for v in result.realization.b_float()],
        "output_row": [float(v) for v in result.realization.c_float()],
    }
    emb = solve_embedding(
        exo.Q_float(), exo.theta_float(), result.realization.A_float(),
        result.realization.c_float(), tol=1e-8,
    )
    section["embedding"] = {
        "residual_sylvester": emb.residual_sylvester,
        "residual_output": emb.residual_output,
        "min_singular_value": emb.min_singular_value,
        "T": matrix_json(emb.T),
        "block_form": matrix_json(emb.block_form),
        "q_block_offset": emb.q_block_offset,
        "orientation": "upper block-triangular, exosystem block leading after any unobservable block",
    }

    # reproduction: simulate the internal model from z0 = T w0 for each trial w0
    repro_json = []
    all_ok = True
    F = result.realization.A_float()
    phi_row = result.realization.c_float()
    im_aff = affine_from_linear(F, np.zeros(F.shape[0]), phi_row)
    phi_expr = im_aff.h
    for w0, trial, _sample in samples:
        z0 = emb.T @ np.asarray(w0, dtype=float)
        verdict = verify_im_reproduction(
            im_aff.f.components, phi_expr, exo, list(w0), z0,
            horizon=min(20.0, args.horizon), tol=1e-6, controls=controls,
        )
        all_ok &= verdict.passed
        repro_json.append(
            {"w0": list(w0), "passed": verdict.passed, "max_deviation": verdict.max_deviation,
             "tol": verdict.tol}
        )
    section["reproduction"] = {"passed": all_ok, "per_w0": repro_json}
    section["grade"] = Grade.PROVEN if S.exact and pi.exact else Grade.SAMPLED
    if not all_ok or not gs.stable:
        section["grade"] = Grade.FAILED
    return section, all_ok and gs.stable


def _nform_im_section(loaded, exo, args, controls, samples):
    sys_aff = loaded.as_affine()
    from ..expr import subst_params, normalize
    from ..vfield import AffineSystem, VectorField

    defaults = loaded.param_defaults
    if defaults:
        f = [normalize(subst_params(c, defaults)) for c in sys_aff.f.components]
        g = [normalize(subst_params(c, defaults)) for c in sys_aff.g.components]
        h = normalize(subst_params(sys_aff.h, defaults))
        bound = AffineSystem.build(f, g, h, sys_aff.n, (), sys_aff.domain)
    else:
        bound = sys_aff
    nf = build_normal_form(bound, seed=args.seed)
    im = internal_model_output(nf, seed=args.seed)
    section = {
        "pipeline": "normal_form",
        "r": nf.r,
        "zeta": [to_string(e) for e in nf.zeta],
        "W": [[num_json(v) for v in row] for row in nf.W],
        "z2": [to_string(e) for e in nf.z2],
        "a": to_string(nf.a_z),
        "b": to_string(nf.b_z),
        "f2": [to_string(e) for e in nf.f2],
        "phi": to_string(im.phi),
        "output_driven": nf.output_driven,
        "construction": nf.mode,
        "invariants": {name: {"grade": c.grade, "detail": c.detail} for name, c in nf.checks},
        "grade": weakest([nf.grade, im.grade]),
    }
    repro_json = []
    all_ok = True
    im_rhs = nf.f2_internal()
    for w0, _trial, sample in samples:
        if not sample.found:
            all_ok = False
            repro_json.append({"w0": list(w0), "passed": False, "detail": "no omega-limit candidate"})
            continue
        cand_idx = sample.near_w0[0] if sample.near_w0 else 0
        _w, x_cand = sample.candidates[cand_idx]
        z2_0 = [float(sum(float(wj) * xv for wj, xv in zip(row, x_cand))) for row in nf.W]
        verdict = verify_im_reproduction(
            im_rhs, im.phi, exo, list(w0), z2_0,
            horizon=min(50.0, args.horizon), tol=1e-6, controls=controls,
        )
        all_ok &= verdict.passed
        repro_json.append(
            {"w0": list(w0), "z2_0": z2_0, "passed": verdict.passed,
             "max_deviation": verdict.max_deviation, "tol": verdict.tol}
        )
    section["reproduction"] = {"passed": all_ok, "per_w0": repro_json}
    if not all_ok:
        section["grade"] = Grade.FAILED
    return section, all_ok


def cmd_analyze(args) -> int:
    loaded = load_system(args.system)
    exo = load_exosystem_file(args.exosystem)
    report = _base_report(args.seed, system=args.system, exosystem=args.exosystem)
    report["command"] = "analyze"
    report["defaults"]["horizon"] = args.horizon
    report["defaults"]["tol_y"] = args.tol
    report["defaults"]["trials"] = args.trials
    controls = IntegratorControls()
    grades: list[Grade] = []

    section, failed, grade = _assumptions_section(loaded, args.seed)
    report["assumptions"] = section
    grades.append(grade)
    if failed:
        report["failed_stage"] = "assumptions"
        report["overall"] = {"ok": False, "grade": Grade.FAILED}
        _emit(report, args.report)
        return EXIT_FAILED

    poisson = check_poisson_stable(exo, horizon=args.horizon, seed=args.seed)
    report["poisson"] = {
        "label": poisson.label,
        "grade": poisson.status,
        "detail": poisson.detail,
        "eigenvalues": [complex_json(z) for z in poisson.eigenvalues],
    }
    if poisson.return_distances:
        report["poisson"]["return_distances"] = list(poisson.return_distances)
    # a non-Poisson-stable exosystem does not stop the pipeline; the verdict
    # stands on its own next to the constructive sections

    adak = _adaptation_section(report, loaded, exo, args, controls)
    if not adak.passed:
        report["failed_stage"] = "adaptation"
        report["overall"] = {"ok": False, "grade": Grade.FAILED}
        _emit(report, args.report)
        _write_traces(args, loaded, exo, adak, controls)
        return EXIT_FAILED
    grades.append(Grade.SAMPLED)

    samples, zeroed = _omega_sections(report, loaded, exo, adak, args, controls)
    if not zeroed:
        report["failed_stage"] = "output_zeroing"
        report["overall"] = {"ok": False, "grade": Grade.FAILED}
        _emit(report, args.report)
        _write_traces(args, loaded, exo, adak, controls)
        return EXIT_FAILED
    grades.append(Grade.SAMPLED)

    try:
        if loaded.kind == "linear" and exo.is_linear:
            im_section, im_ok = _linear_im_section(loaded, exo, args, controls, samples)
        else:
            im_section, im_ok = _nform_im_section(loaded, exo, args, controls, samples)
    except (NoInternalModelError, NoEmbeddingError, DecompositionError) as err:
        report["internal_model"] = {"error": str(err), "grade": Grade.FAILED}
        report["failed_stage"] = "internal_model"
        report["overall"] = {"ok": False, "grade": Grade.FAILED}
        _emit(report, args.report)
        return EXIT_FAILED
    report["internal_model"] = im_section
    grades.append(im_section["grade"])
    if not im_ok:
        report["failed_stage"] = "internal_model"
        report["overall"] = {"ok": False, "grade": Grade.FAILED}
        _emit(report, args.report)
        return EXIT_FAILED

    report["overall"] = {"ok": True, "grade": weakest(grades)}
    _emit(report, args.report)
    _write_traces(args, loaded, exo, adak, controls)
    return EXIT_OK


def _write_traces(args, loaded, exo, adak, controls):
    if not getattr(args, "trace_dir", None):
        return
    os.makedirs(args.trace_dir, exist_ok=True)
    sys_aff = loaded.as_affine()
    for i, t in enumerate(adak.trials):
        try:
            trace = integrate_cascade(
                sys_aff, exo, t.x0, t.w0, t.horizon_used, controls, loaded.param_floats
            )
        except ImkError:
            continue
        trace.to_csv(os.path.join(args.trace_dir, f"trial_{i:03d}.csv"))


def cmd_simulate(args) -> int:
    loaded = load_system(args.system)
    exo = load_exosystem_file(args.exosystem)
    sys_aff = loaded.as_affine()
    x0 = _parse_vector(args.x0, sys_aff.n, "x0") if args.x0 else _box_center(sys_aff.domain, sys_aff.n)
    w0 = _parse_vector(args.w0, exo.m, "w0") if args.w0 else _box_center(exo.initial_box, exo.m)
    controls = IntegratorControls(grid_points=args.points)
    trace = integrate_cascade(sys_aff, exo, x0, w0, args.horizon, controls, loaded.param_floats)
    trace.to_csv(args.out)
    summary = {
        "out": args.out,
        "points": int(trace.t.shape[0]),
        "steps": trace.meta["steps"],
        "backend": trace.meta["backend"],
        "final_y": float(trace.y[-1]),
    }
    _sys.stdout.write(emit_json(summary) + "\n")
    return EXIT_OK


def _box_center(box, dim: int):
    if box is None:
        return [1.0] * dim
    return [0.5 * (lo + hi) for lo, hi in box]


def _parse_vector(text: str, dim: int, name: str):
    try:
        vals = [float(tok) for tok in text.split(",")]
    except ValueError as err:
        raise InputError(f"--{name} must be comma-separated numbers") from err
    if len(vals) != dim:
        raise InputError(f"--{name} must have {dim} components")
    return vals


def cmd_extract_im(args) -> int:
    loaded = load_system(args.system)
    if loaded.kind != "linear":
        raise InputError("extract-im requires a linear system file")
    exo = load_exosystem_file(args.exosystem)
    if not exo.is_linear:
        raise InputError("extract-im requires a linear exosystem")
    report = _base_report(args.seed, system=args.system, exosystem=args.exosystem)
    report["command"] = "extract-im"
    controls = IntegratorControls()
    try:
        section, ok = _linear_im_section(loaded, exo, args, controls, samples=[])
    except (NoInternalModelError, DecompositionError, NoEmbeddingError) as err:
        report["internal_model"] = {"error": str(err), "grade": Grade.FAILED}
        report["overall"] = {"ok": False, "grade": Grade.FAILED}
        _emit(report, args.report)
        return EXIT_FAILED
    report["internal_model"] = section
    report["overall"] = {"ok": ok, "grade": section["grade"]}
    _emit(report, args.report)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_embed(args) -> int:
    with open(args.file, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise InputError(f"{args.file} is not valid JSON: {err}") from err
    for key in ("Q", "theta", "F", "phi"):
        if key not in data:
            raise InputError(f"embedding file needs '{key}'")
    report = _base_report(args.seed, problem=args.file)
    report["command"] = "embed"
    try:
        emb = solve_embedding(data["Q"], data["theta"], data["F"], data["phi"], tol=args.tol)
    except NoEmbeddingError as err:
        report["embedding"] = {"error": str(err), "residual": err.residual, "grade": Grade.FAILED}
        report["overall"] = {"ok": False, "grade": Grade.FAILED}
        _emit(report, args.report)
        return EXIT_FAILED
    report["embedding"] = {
        "T": matrix_json(emb.T),
        "P": matrix_json(emb.P),
        "block_form": matrix_json(emb.block_form),
        "q_block_offset": emb.q_block_offset,
        "residual_sylvester": emb.residual_sylvester,
        "residual_output": emb.residual_output,
        "min_singular_value": emb.min_singular_value,
        "f_reduced": emb.f_reduced,
        "exo_reduced": emb.exo_reduced,
        "grade": Grade.SAMPLED,
    }
    report["overall"] = {"ok": True, "grade": Grade.SAMPLED}
    _emit(report, args.report)
    return EXIT_OK


def cmd_example(args) -> int:
    preset = PRESETS.get(args.name)
    if preset is None:
        raise InputError(f"unknown example {args.name!r}; choose from {sorted(PRESETS)}")
    os.makedirs(args.dir, exist_ok=True)
    written = []
    for key in ("system", "exosystem"):
        fname, payload = preset[key]
        path = os.path.join(args.dir, fname)
        write_atomic(path, emit_json(payload) + "\n")
        written.append(path)
    fname, text = preset["readme"]
    path = os.path.join(args.dir, fname)
    write_atomic(path, text)
    written.append(path)
    _sys.stdout.write(emit_json({"written": written}) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imk",
        description="Internal-model analysis toolkit for input-affine and linear systems",
    )
    parser.add_argument("--version", action="version", version=f"imkit {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_check = subs.add_parser("check", help="verify relative degree and the structural hypotheses")
    p_check.add_argument("system")
    p_check.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    p_check.add_argument("--report", default=None)
    p_check.set_defaults(func=cmd_check)

    p_an = subs.add_parser("analyze", help="full pipeline: hypotheses, adaptation, internal model")
    p_an.add_argument("system")
    p_an.add_argument("exosystem")
    p_an.add_argument("--horizon", type=float, default=DEFAULTS["horizon"])
    p_an.add_argument("--tol", type=float, default=DEFAULTS["tol_y"])
    p_an.add_argument("--trials", type=int, default=DEFAULTS["trials"])
    p_an.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    p_an.add_argument("--trace-dir", default=None)
    p_an.add_argument("--report", default=None)
    p_an.set_defaults(func=cmd_analyze)

    p_sim = subs.add_parser("simulate", help="integrate one cascade trajectory to CSV")
    p_sim.add_argument("system")
    p_sim.add_argument("exosystem")
    p_sim.add_argument("--x0", default=None, help="comma-separated initial state")
    p_sim.add_argument("--w0", default=None, help="comma-separated exosystem initial state")
    p_sim.add_argument("--horizon", type=float, default=DEFAULTS["horizon"])
    p_sim.add_argument("--points", type=int, default=1001)
    p_sim.add_argument("--out", default="trace.csv")
    p_sim.set_defaults(func=cmd_simulate)

    p_ex = subs.add_parser("extract-im", help="linear pipeline: divide, factor, realize")
    p_ex.add_argument("system")
    p_ex.add_argument("exosystem")
    p_ex.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    p_ex.add_argument("--horizon", type=float, default=DEFAULTS["horizon"])
    p_ex.add_argument("--report", default=None)
    p_ex.set_defaults(func=cmd_extract_im)

    p_emb = subs.add_parser("embed", help="solve F T = T Q, phi T = theta from a JSON problem file")
    p_emb.add_argument("file")
    p_emb.add_argument("--tol", type=float, default=1e-8)
    p_emb.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    p_emb.add_argument("--report", default=None)
    p_emb.set_defaults(func=cmd_embed)

    p_exa = subs.add_parser("example", help="write a built-in example (ecoli, linear-integrator, linear-harmonic)")
    p_exa.add_argument("name")
    p_exa.add_argument("--dir", default=".")
    p_exa.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as err:
        _sys.stderr.write(f"input error: {err}\n")
        return EXIT_INPUT
    except NumericalError as err:
        _sys.stderr.write(f"numerical failure: {err}\n")
        return EXIT_NUMERICAL
    except ImkError as err:
        _sys.stderr.write(f"error: {err}\n")
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
