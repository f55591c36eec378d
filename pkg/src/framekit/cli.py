"""framekit command-line interface.

Exit codes: 0 ok, 1 audit violated, 2 input error, 3 nothing applicable.
Reports are deterministic: identical inputs and flags produce byte-identical
output files. FRAMEKIT_TOL overrides the identity-residual tolerance.
"""

from __future__ import annotations

import json
import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from .linalg import DEFAULT_TOL, InputError, TolerancePolicy, operator_norm
from .frames import (
    Frame,
    canonical_dual,
    excess,
    frame_bounds,
    frame_norm_distance,
    is_frame,
    synthesis_matrix,
)
from .approxdual import ApproxDualParams, validate_params
from .perturbation import (
    BoundAudit,
    PreconditionFailure,
    best_approx_dual,
    closeness,
    deviation_bound_audit,
    dis_identity_residual,
    gamma_inverse,
    gamma_map,
    gap_bound_audit,
    make_audit,
    per1200_audit,
)
from .gabor import (
    GaborSystem,
    LatticeError,
    build_gabor_frame,
    commuting_operator,
    envelope_audit,
    gabor_approx_dual_window,
    gabor_perturbation_audit,
    walnut_report,
)
from .exam import generate_exam
from .harness import CorpusProfile, run_corpus
from .rand import random_kernel_theta, stream_rng
from . import serialization as ser

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INPUT = 2
EXIT_NOTHING_APPLICABLE = 3

ALL_KINDS = ("gap-11", "per1200-d", "per1200-c", "per1200-mu", "dis",
             "cad", "prop-dis", "best-app", "d-quad", "c-quad", "gamma")
KIND_ALIASES = {"mu-only": ("per1200-mu", "cad", "prop-dis", "best-app", "gamma"),
                "mu": ("per1200-mu", "cad", "prop-dis", "best-app", "gamma")}


def _tolerance() -> TolerancePolicy:
    override = os.environ.get("FRAMEKIT_TOL")
    if override is None:
        return DEFAULT_TOL
    try:
        return TolerancePolicy(identity_residual_rel=float(override))
    except (ValueError, InputError):
        raise click.ClickException(f"bad FRAMEKIT_TOL value {override!r}")


def _load(path, parser):
    try:
        return parser(ser.load_json(path))
    except (OSError, json.JSONDecodeError, InputError, ValueError) as e:
        click.echo(f"error: cannot read {path}: {e}", err=True)
        sys.exit(EXIT_INPUT)


def _emit(payload, out) -> None:
    text = ser.dumps(payload)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _audit_exit(audits: list[BoundAudit]) -> int:
    effective = [a for a in audits if not a.diagnostic]
    if any(a.violated for a in effective):
        return EXIT_VIOLATED
    if effective and not any(a.preconditions_met for a in effective):
        return EXIT_NOTHING_APPLICABLE
    return EXIT_OK


@click.group()
def main():
    """Finite frame toolkit: duals, perturbation audits, discrete Gabor systems."""


# ---------------------------------------------------------------------------
# frame subcommands


@main.group()
def frame():
    """Analyze frame files."""


@frame.command("analyze")
@click.argument("input_path", type=click.Path(exists=True))
@click.option("--emit-dual", is_flag=True, help="include the canonical dual")
@click.option("-o", "--output", type=click.Path(), default=None)
def frame_analyze(input_path, emit_dual, output):
    """Bounds, tightness, excess, and optionally the canonical dual."""
    tol = _tolerance()
    F = _load(input_path, ser.frame_from_dict)
    b = frame_bounds(F)
    report = {
        "dim": F.dim,
        "n_vectors": F.n_vectors,
        "lower_opt": b.lower_opt,
        "upper_opt": b.upper_opt,
        "tight": b.tight,
        "excess": excess(F, tol),
        "is_frame": is_frame(F, tol),
    }
    if emit_dual:
        if not is_frame(F, tol):
            click.echo("error: non-frame input has no canonical dual", err=True)
            sys.exit(EXIT_INPUT)
        report["canonical_dual"] = ser.frame_to_dict(canonical_dual(F, tol))
    _emit(report, output)
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# perturbation audits


def _default_params(F: Frame) -> ApproxDualParams:
    return ApproxDualParams(A=np.eye(F.dim, dtype=np.complex128),
                            Theta=np.zeros((F.n_vectors, F.dim), dtype=np.complex128))


def _na(*names) -> list[BoundAudit]:
    return [make_audit(n, float("nan"), float("nan"), False) for n in names]


def run_perturb_audits(F: Frame, G: Frame, P1: ApproxDualParams,
                       kinds, seed: int, trials: int,
                       tol: TolerancePolicy) -> list[BoundAudit]:
    audits: list[BoundAudit] = []
    A1 = P1.A
    for kind in kinds:
        if kind == "gap-11":
            audits.append(gap_bound_audit(F, G, tol))
        elif kind == "per1200-d":
            audits.extend(per1200_audit(F, G, "d-quad", tol=tol))
        elif kind == "per1200-c":
            audits.extend(per1200_audit(F, G, "c-quad", tol=tol))
        elif kind == "per1200-mu":
            audits.extend(per1200_audit(F, G, "mu", tol=tol))
        elif kind == "dis":
            residual, scale = dis_identity_residual(F, G, P1, _default_params(G), tol)
            audits.append(make_audit("dis.identity", residual, 1e-9 * scale))
        elif kind == "cad":
            audits.extend(deviation_bound_audit("cad", F, G, A1, A1, tol=tol))
        elif kind == "prop-dis":
            audits.extend(deviation_bound_audit("prop-dis", F, G, A1, A1, tol=tol))
        elif kind == "d-quad":
            audits.extend(deviation_bound_audit("d-quad", F, G, A1, A1,
                                                theta=P1.Theta, tol=tol))
        elif kind == "c-quad":
            audits.extend(deviation_bound_audit("c-quad", F, G, A1, A1,
                                                theta=P1.Theta, tol=tol))
        elif kind == "best-app":
            try:
                result = best_approx_dual(F, G, P1, A1, trials=trials,
                                          seed=seed, tol=tol)
                audits.append(result.lambda_bound)
                audits.append(result.optimality)
            except PreconditionFailure:
                audits.extend(_na("best-app.lambda", "best-app.optimality"))
        elif kind == "gamma":
            mu = frame_norm_distance(F, G)
            if mu < math.sqrt(frame_bounds(F).lower_opt) / 2:
                Pv = validate_params(F, P1, tol)
                image = gamma_map(F, G, Pv, tol)
                back = gamma_inverse(F, G, image.Theta, Pv.A, tol)
                audits.append(make_audit("gamma.roundtrip",
                                         operator_norm(back - Pv.Theta), 1e-9))
            else:
                audits.extend(_na("gamma.roundtrip"))
        else:
            raise click.ClickException(f"unknown audit kind {kind!r}")
    return audits


@main.group()
def perturb():
    """Perturbation-bound audits for frame pairs."""


@perturb.command("audit")
@click.argument("frame_a", type=click.Path(exists=True))
@click.argument("frame_b", type=click.Path(exists=True))
@click.option("--params", "params_path", type=click.Path(exists=True), default=None)
@click.option("--kinds", default=",".join(ALL_KINDS), show_default=False,
              help="comma-separated audit kinds (default: all)")
@click.option("--seed", default=0, type=int)
@click.option("--trials", default=100, type=int)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv-summary"]),
              default="json")
def perturb_audit(frame_a, frame_b, params_path, kinds, seed, trials, output, fmt):
    """Run the selected deviation-bound audits on a frame pair."""
    tol = _tolerance()
    F = _load(frame_a, ser.frame_from_dict)
    G = _load(frame_b, ser.frame_from_dict)
    if F.dim != G.dim or F.n_vectors != G.n_vectors:
        click.echo("error: frame shape mismatch", err=True)
        sys.exit(EXIT_INPUT)
    if params_path:
        P1 = _load(params_path, ser.params_from_dict)
    else:
        P1 = _default_params(F)
    try:
        P1 = validate_params(F, P1, tol)
    except (InputError, ValueError) as e:
        click.echo(f"error: bad params: {e}", err=True)
        sys.exit(EXIT_INPUT)

    kind_list: list[str] = []
    for k in kinds.split(","):
        k = k.strip()
        if not k:
            continue
        kind_list.extend(KIND_ALIASES.get(k, (k,)))

    rep = closeness(F, G, "canonical", tol)
    bF, bG = frame_bounds(F), frame_bounds(G)
    audits = run_perturb_audits(F, G, P1, kind_list, seed, trials, tol)
    payload = {
        "closeness": {"q": rep.q, "q_weighted": rep.q_weighted, "q0": rep.q0,
                      "mu": rep.mu, "d_quad_flag": rep.d_quad_flag,
                      "c_quad_flag": rep.c_quad_flag},
        "bounds_a": {"lower_opt": bF.lower_opt, "upper_opt": bF.upper_opt,
                     "tight": bF.tight},
        "bounds_b": {"lower_opt": bG.lower_opt, "upper_opt": bG.upper_opt,
                     "tight": bG.tight},
        "audits": ser.audits_to_list(audits),
    }
    if fmt == "csv-summary":
        text = ser.audits_to_csv(audits)
        if output:
            Path(output).write_text(text)
        else:
            click.echo(text, nl=False)
    else:
        _emit(payload, output)
    sys.exit(_audit_exit(audits))


# ---------------------------------------------------------------------------
# instance generation


@main.group()
def generate():
    """Generate built-in instance families."""


@generate.command("exam")
@click.option("--blocks", "-k", type=int, required=True)
@click.option("-o", "--output", type=click.Path(), required=True,
              help="output directory for the frame pair")
def generate_exam_cmd(blocks, output):
    """Emit the geometric-block frame pair (original + perturbed)."""
    try:
        pair = generate_exam(blocks)
    except InputError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    outdir = Path(output)
    outdir.mkdir(parents=True, exist_ok=True)
    ser.dump_json(ser.frame_to_dict(pair.original), outdir / "original.json")
    ser.dump_json(ser.frame_to_dict(pair.perturbed), outdir / "perturbed.json")
    ser.dump_json({
        "blocks": pair.blocks,
        "q_limit": pair.q_limit,
        "q0_limit": pair.q0_limit,
        "mu": pair.mu,
        "q_truncation_tail": pair.q_truncation_tail,
        "q0_truncation_tail": pair.q0_truncation_tail,
    }, outdir / "metadata.json")
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# gabor subcommands


@main.group()
def gabor():
    """Discrete Gabor system analysis and audits."""


def _load_gabor(path) -> GaborSystem:
    try:
        return ser.gabor_from_dict(ser.load_json(path))
    except (OSError, json.JSONDecodeError, InputError, LatticeError, ValueError) as e:
        click.echo(f"error: cannot read {path}: {e}", err=True)
        sys.exit(EXIT_INPUT)


@gabor.command("analyze")
@click.argument("input_path", type=click.Path(exists=True))
@click.option("-o", "--output", type=click.Path(), default=None)
def gabor_analyze(input_path, output):
    """Frame bounds, Walnut estimates and the envelope audit."""
    sys_ = _load_gabor(input_path)
    F = build_gabor_frame(sys_)
    b = frame_bounds(F)
    w = walnut_report(sys_)
    env = envelope_audit(sys_)
    payload = {
        "L": sys_.L, "a": sys_.a, "b": sys_.b,
        "n_vectors": sys_.n_vectors,
        "redundancy": sys_.redundancy,
        "lower_opt": b.lower_opt, "upper_opt": b.upper_opt, "tight": b.tight,
        "walnut": {"lower_est": w.lower_est, "upper_est": w.upper_est},
        "envelope": env.to_dict(),
    }
    _emit(payload, output)
    sys.exit(EXIT_OK if env.holds else EXIT_VIOLATED)


@gabor.command("dual-window")
@click.argument("input_path", type=click.Path(exists=True))
@click.option("--scalar", type=float, default=None,
              help="A = scalar * identity (default 1.0)")
@click.option("--poly", default=None,
              help="comma-separated coefficients of a polynomial in the frame operator")
@click.option("--h-window", type=click.Path(exists=True), default=None,
              help="gabor JSON file supplying the free Bessel window h")
@click.option("-o", "--output", type=click.Path(), default=None)
def gabor_dual_window(input_path, scalar, poly, h_window, output):
    """Structured approximately dual window for a lattice-commuting A."""
    sys_ = _load_gabor(input_path)
    tol = _tolerance()
    try:
        if poly is not None:
            A = commuting_operator(sys_, [float(c) for c in poly.split(",")])
        else:
            A = commuting_operator(sys_, 1.0 if scalar is None else scalar)
        h = (np.zeros(sys_.L) if h_window is None
             else _load_gabor(h_window).window)
        window, report = gabor_approx_dual_window(sys_, A, h, tol)
    except (InputError, ValueError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    payload = {
        "window": ser.vector_to_pairs(window),
        "rate": report.rate,
        "is_alternate_dual": report.is_alternate_dual,
    }
    _emit(payload, output)
    sys.exit(EXIT_OK)


@gabor.command("perturb")
@click.argument("input_path", type=click.Path(exists=True))
@click.option("--g2", "g2_path", type=click.Path(exists=True), required=True,
              help="gabor JSON supplying the perturbed window (same lattice)")
@click.option("--scalar-a1", type=float, default=1.0)
@click.option("--scalar-a2", type=float, default=1.0)
@click.option("--seed", default=0, type=int)
@click.option("--trials", default=50, type=int)
@click.option("-o", "--output", type=click.Path(), default=None)
def gabor_perturb(input_path, g2_path, scalar_a1, scalar_a2, seed, trials, output):
    """Window-perturbation audit batch for the generated frames."""
    sys1 = _load_gabor(input_path)
    sys2 = _load_gabor(g2_path)
    if (sys1.L, sys1.a, sys1.b) != (sys2.L, sys2.a, sys2.b):
        click.echo("error: lattice mismatch between the two systems", err=True)
        sys.exit(EXIT_INPUT)
    tol = _tolerance()
    A1 = scalar_a1 * np.eye(sys1.L, dtype=np.complex128)
    A2 = scalar_a2 * np.eye(sys1.L, dtype=np.complex128)
    audits = gabor_perturbation_audit(sys1, sys2.window, A1, A2, tol=tol,
                                      trials=trials, seed=seed)
    _emit(ser.audits_to_list(audits), output)
    sys.exit(_audit_exit(audits))


# ---------------------------------------------------------------------------
# randomized corpus


@main.command("corpus")
@click.option("--seed", type=int, required=True)
@click.option("--trials", type=int, required=True)
@click.option("--dims", default="2,3,4,5,6")
@click.option("--extra-vectors", default="1,2,3,4,5,6")
@click.option("--gabor-lengths", default="8,12,16")
@click.option("-o", "--output", type=click.Path(), default=None,
              help="output directory for audit batch + summary")
def corpus(seed, trials, dims, extra_vectors, gabor_lengths, output):
    """Deterministic randomized audit corpus with a per-audit summary."""
    if trials < 1:
        click.echo("error: trials must be >= 1", err=True)
        sys.exit(EXIT_INPUT)
    profile = CorpusProfile(
        dims=tuple(int(x) for x in dims.split(",")),
        extra_vectors=tuple(int(x) for x in extra_vectors.split(",")),
        gabor_lengths=tuple(int(x) for x in gabor_lengths.split(",")),
    )
    result = run_corpus(seed, trials, profile, _tolerance())
    summary = result.summary()
    if output:
        outdir = Path(output)
        outdir.mkdir(parents=True, exist_ok=True)
        ser.dump_json(ser.audits_to_list(result.audits), outdir / "audits.json")
        ser.dump_json(summary, outdir / "summary.json")
    else:
        click.echo(ser.dumps(summary), nl=False)
    sys.exit(EXIT_VIOLATED if result.violated_total > 0 else EXIT_OK)


if __name__ == "__main__":
    main()
