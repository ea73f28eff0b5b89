"""Batch front-end: run verdicts, witnesses, matrices and spectra from a
JSON job file and emit text, JSON and CSV reports.

Job file layout (complex scalars are [re, im] pairs; bare numbers are
accepted as reals)::

    {
      "space":   {"kind": "hardy" | "bergman", "dim": 2, "alpha": 0.0},
      "maps":    {"phi": {"A": [[...]], "B": [...], "C": [...], "d": [2, 0]},
                  "psi": {...}},
      "command": "verdict" | "witness" | "matrix" | "spectrum" | "geometry-check",
      "params":  {"phi": "phi", "psi": "psi", "degree": 10, "top": 10,
                  "witness": {"kind": "parabolic", "k": 1.0}},
      "seed":    0
    }

Exit codes: 0 success (the verdict itself lives in the JSON report),
2 parse errors, 3 precondition violations, 4 numerical failure or an
inconclusive certificate search.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geometry
from .errors import (
    ClassificationError,
    CompDiffError,
    GeometryDomainError,
    InconclusiveError,
    NotSelfMapError,
    PoleError,
    SliceReductionError,
    WitnessHypothesisError,
)
from .linfrac import LinFracMap, apply, maps_equal, random_automorphism
from .operators import composition_matrix, difference_singular_values
from .spaces import SpaceSpec
from .witness import (
    Verdict,
    VerdictKind,
    WitnessCertificate,
    WitnessConfig,
    boundary_witness,
    compactness_verdict,
    parabolic_witness,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4

_PRECONDITION_ERRORS = (
    NotSelfMapError,
    WitnessHypothesisError,
    ClassificationError,
    GeometryDomainError,
    PoleError,
    SliceReductionError,
)


class JobParseError(CompDiffError):
    """Malformed job file."""


# ---------------------------------------------------------------------------
# parsing


def _parse_complex(v, where: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) for x in v
    ):
        return complex(v[0], v[1])
    raise JobParseError(f"{where}: expected a number or [re, im] pair, got {v!r}")


def _parse_cvector(v, where: str) -> np.ndarray:
    if not isinstance(v, list):
        raise JobParseError(f"{where}: expected a list")
    return np.array([_parse_complex(x, f"{where}[{i}]") for i, x in enumerate(v)])


def _parse_map(desc, where: str) -> LinFracMap:
    if not isinstance(desc, dict):
        raise JobParseError(f"{where}: expected an object")
    for key in ("A", "B", "C", "d"):
        if key not in desc:
            raise JobParseError(f"{where}: missing field {key!r}")
    A_rows = desc["A"]
    if not isinstance(A_rows, list) or not A_rows:
        raise JobParseError(f"{where}.A: expected a nonempty matrix")
    A = np.array([
        [_parse_complex(x, f"{where}.A[{i}][{j}]") for j, x in enumerate(row)]
        for i, row in enumerate(A_rows)
    ])
    n = A.shape[0]
    if A.ndim != 2 or A.shape != (n, n):
        raise JobParseError(f"{where}.A: expected a square matrix, got shape {A.shape}")
    B = _parse_cvector(desc["B"], f"{where}.B")
    C = _parse_cvector(desc["C"], f"{where}.C")
    if B.shape != (n,) or C.shape != (n,):
        raise JobParseError(
            f"{where}: B and C must have length {n}, got {B.shape[0]} and {C.shape[0]}"
        )
    d = _parse_complex(desc["d"], f"{where}.d")
    if d == 0:
        raise JobParseError(f"{where}.d must be nonzero")
    return LinFracMap(A, B, C, d)


def _parse_space(desc) -> SpaceSpec:
    if not isinstance(desc, dict) or "kind" not in desc or "dim" not in desc:
        raise JobParseError("space: expected an object with 'kind' and 'dim'")
    kind = desc["kind"]
    dim = desc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise JobParseError(f"space.dim: expected a positive integer, got {dim!r}")
    try:
        if kind == "hardy":
            return SpaceSpec.hardy(dim)
        if kind == "bergman":
            return SpaceSpec.bergman(dim, float(desc.get("alpha", 0.0)))
    except GeometryDomainError as exc:
        raise JobParseError(f"space: {exc}") from exc
    raise JobParseError(f"space.kind: unknown kind {kind!r}")


@dataclass(frozen=True, eq=False)
class JobSpec:
    space: SpaceSpec
    maps: dict
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0


COMMANDS = ("verdict", "witness", "matrix", "spectrum", "geometry-check")


def parse_job(path: Path) -> JobSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise JobParseError(f"cannot read job file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise JobParseError(f"job file is not valid JSON (line {exc.lineno}): {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise JobParseError("job file must contain a JSON object")
    command = raw.get("command")
    if command not in COMMANDS:
        raise JobParseError(f"command: expected one of {COMMANDS}, got {command!r}")
    space = _parse_space(raw.get("space", {}))
    maps = {}
    for name, desc in (raw.get("maps") or {}).items():
        m = _parse_map(desc, f"maps.{name}")
        if m.dim != space.dim:
            raise JobParseError(
                f"maps.{name}: dimension {m.dim} does not match space dim {space.dim}"
            )
        maps[name] = m
    params = raw.get("params") or {}
    if not isinstance(params, dict):
        raise JobParseError("params: expected an object")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise JobParseError(f"seed: expected a nonnegative integer, got {seed!r}")
    return JobSpec(space=space, maps=maps, command=command, params=params, seed=seed)


def _named_map(job: JobSpec, role: str, default: str) -> LinFracMap:
    name = job.params.get(role, default)
    if name not in job.maps:
        raise JobParseError(f"params.{role}: map {name!r} is not defined")
    return job.maps[name]


# ---------------------------------------------------------------------------
# serialization


def _enc_complex(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _enc_vector(v) -> list:
    return [_enc_complex(z) for z in np.asarray(v).reshape(-1)]


def _enc_matrix(M) -> list:
    return [[_enc_complex(z) for z in row] for row in np.asarray(M)]


def _enc_map(m: LinFracMap) -> dict:
    return {
        "A": _enc_matrix(m.A),
        "B": _enc_vector(m.B),
        "C": _enc_vector(m.C),
        "d": _enc_complex(m.d),
    }


def _enc_value(v):
    if isinstance(v, complex):
        return _enc_complex(v)
    if isinstance(v, np.ndarray):
        return _enc_vector(v) if v.ndim == 1 else _enc_matrix(v)
    if isinstance(v, (np.floating, np.integer)):
        return float(v)
    if isinstance(v, dict):
        return {k: _enc_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_enc_value(x) for x in v]
    return v


def _enc_certificate(cert: WitnessCertificate | None):
    if cert is None:
        return None
    return {
        "kind": cert.kind,
        "chain": list(cert.chain),
        "claimed_inf": cert.claimed_inf,
        "witnessed_inf": cert.witnessed_inf(),
        "details": _enc_value(cert.details),
        "pair": [_enc_map(m) for m in cert.pair],
        "records": [
            {
                "point": _enc_vector(r.point),
                "abs_z": r.abs_z,
                "rho": r.rho,
                "ratio1": r.ratio1,
                "ratio2": r.ratio2,
                "eq1": r.eq1_value,
                "kernel_diff_sq": r.kernel_diff_sq,
            }
            for r in cert.records
        ],
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _write_witness_csv(path: Path, cert: WitnessCertificate) -> None:
    lines = ["n,abs_z,rho,ratio1,ratio2,eq1,kernel_norm_sq"]
    for n, r in enumerate(cert.records):
        kd = r.kernel_diff_sq if r.kernel_diff_sq is not None else float("nan")
        lines.append(
            f"{n},{r.abs_z:.17g},{r.rho:.17g},{r.ratio1:.17g},"
            f"{r.ratio2:.17g},{r.eq1_value:.17g},{kd:.17g}"
        )
    path.write_text("\n".join(lines) + "\n")


def _cert_summary_lines(cert: WitnessCertificate | None) -> list:
    if cert is None:
        return []
    lines = [
        f"certificate kind : {cert.kind}",
        f"points recorded  : {len(cert.records)}",
        f"claimed inf      : {cert.claimed_inf:.6g}",
        f"last |z|         : {cert.records[-1].abs_z:.12g}",
    ]
    if cert.chain:
        lines.append("reduction chain  : " + " -> ".join(cert.chain))
    for key, val in sorted(cert.details.items()):
        if isinstance(val, float):
            lines.append(f"  {key}: {val:.10g}")
    return lines


# ---------------------------------------------------------------------------
# commands


def _run_verdict(job: JobSpec, out: Path) -> int:
    phi = _named_map(job, "phi", "phi")
    psi = _named_map(job, "psi", "psi")
    verdict = compactness_verdict(phi, psi, job.space, _witness_config(job))
    payload = {
        "command": "verdict",
        "space": job.space.describe(),
        "seed": job.seed,
        "verdict": verdict.kind.value,
        "sup_norm_phi": verdict.sup_norm_phi,
        "sup_norm_psi": verdict.sup_norm_psi,
        "certificate": _enc_certificate(verdict.certificate),
        "diagnostics": _enc_value(verdict.diagnostics),
        "maps": {"phi": _enc_map(phi), "psi": _enc_map(psi)},
    }
    _write_json(out / "report.json", payload)
    lines = [
        f"verdict: {verdict.kind.value}",
        f"space  : {job.space.describe()}",
        f"sup-norms: phi {verdict.sup_norm_phi:.12g}, psi {verdict.sup_norm_psi:.12g}",
    ]
    lines += _cert_summary_lines(verdict.certificate)
    if verdict.kind is VerdictKind.INCONCLUSIVE:
        lines.append(f"diagnostics: {verdict.diagnostics}")
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    if verdict.certificate is not None:
        _write_witness_csv(out / "witness.csv", verdict.certificate)
    return EXIT_NUMERICAL if verdict.kind is VerdictKind.INCONCLUSIVE else EXIT_OK


def _witness_config(job: JobSpec) -> WitnessConfig:
    opts = job.params.get("witness") or {}
    kwargs = {}
    if "k" in opts:
        kwargs["k"] = float(opts["k"])
    if "c" in opts:
        kwargs["c"] = tuple(_parse_complex(x, "witness.c") for x in opts["c"])
    if "aperture" in opts:
        kwargs["aperture"] = float(opts["aperture"])
    if "t_grid" in opts:
        kwargs["t_grid"] = tuple(float(t) for t in opts["t_grid"])
    return WitnessConfig(**kwargs)


def _run_witness(job: JobSpec, out: Path) -> int:
    phi = _named_map(job, "phi", "phi")
    psi = _named_map(job, "psi", "psi")
    opts = job.params.get("witness") or {}
    kind = opts.get("kind", "parabolic")
    cfg = _witness_config(job)
    if kind == "parabolic":
        cert = parabolic_witness(phi, psi, cfg, job.space)
    elif kind == "boundary":
        if "zeta" not in opts:
            raise JobParseError("witness.zeta is required for a boundary witness")
        zeta = _parse_cvector(opts["zeta"], "witness.zeta")
        cert = boundary_witness(phi, psi, zeta, job.space, cfg)
    else:
        raise JobParseError(f"witness.kind: unknown kind {kind!r}")
    payload = {
        "command": "witness",
        "space": job.space.describe(),
        "seed": job.seed,
        "certificate": _enc_certificate(cert),
        "maps": {"phi": _enc_map(phi), "psi": _enc_map(psi)},
    }
    _write_json(out / "report.json", payload)
    (out / "report.txt").write_text("\n".join(_cert_summary_lines(cert)) + "\n")
    _write_witness_csv(out / "witness.csv", cert)
    return EXIT_OK


def _run_matrix(job: JobSpec, out: Path) -> int:
    phi = _named_map(job, "phi", "phi")
    degree = int(job.params.get("degree", 8))
    top = composition_matrix(phi, job.space, degree)
    svals = np.linalg.svd(top.matrix, compute_uv=False)
    payload = {
        "command": "matrix",
        "space": job.space.describe(),
        "seed": job.seed,
        "degree": degree,
        "basis_size": top.size,
        "matrix": _enc_matrix(top.matrix),
        "singular_values": [float(s) for s in svals],
    }
    _write_json(out / "report.json", payload)
    (out / "report.txt").write_text(
        "\n".join(
            [
                f"composition matrix on {job.space.describe()}, degree <= {degree}",
                f"basis size : {top.size}",
                f"largest singular value : {svals[0]:.12g}",
            ]
        )
        + "\n"
    )
    return EXIT_OK


def _run_spectrum(job: JobSpec, out: Path) -> int:
    phi = _named_map(job, "phi", "phi")
    psi = _named_map(job, "psi", "psi")
    degree = int(job.params.get("degree", 10))
    top = int(job.params.get("top", 10))
    svals = difference_singular_values(phi, psi, job.space, degree, top)
    payload = {
        "command": "spectrum",
        "space": job.space.describe(),
        "seed": job.seed,
        "degree": degree,
        "singular_values": [float(s) for s in svals],
    }
    _write_json(out / "report.json", payload)
    lines = [f"difference spectrum, degree <= {degree}"]
    lines += [f"sigma_{i + 1} = {s:.12g}" for i, s in enumerate(svals)]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def _run_geometry_check(job: JobSpec, out: Path) -> int:
    rng = np.random.default_rng(job.seed)
    n = job.space.dim
    worst_invariance = 0.0
    for _ in range(20):
        aut = random_automorphism(n, rng)
        for _ in range(50):
            z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            z *= rng.uniform(0, 0.95) / np.linalg.norm(z)
            w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            w *= rng.uniform(0, 0.95) / np.linalg.norm(w)
            d0 = geometry.pseudo_hyperbolic_distance(z, w)
            d1 = geometry.pseudo_hyperbolic_distance(apply(aut, z), apply(aut, w))
            worst_invariance = max(worst_invariance, abs(d0 - d1))
    worst_roundtrip = 0.0
    worst_ellipsoid = 0.0
    for _ in range(500):
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        z *= rng.uniform(0, 0.98) / np.linalg.norm(z)
        back = geometry.cayley_inverse(geometry.cayley(z))
        worst_roundtrip = max(worst_roundtrip, float(np.linalg.norm(back - z)))
        k = float(rng.uniform(0.1, 10.0))
        t = float(rng.uniform(-50, 50))
        wp = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        pt = geometry.ellipsoid_point(k, t, wp)
        worst_ellipsoid = max(
            worst_ellipsoid, abs(geometry.ellipsoid_membership(geometry.EllipsoidSpec(k), pt))
        )
    ok = worst_invariance < 1e-10 and worst_roundtrip < 1e-12 and worst_ellipsoid < 1e-10
    payload = {
        "command": "geometry-check",
        "space": job.space.describe(),
        "seed": job.seed,
        "pass": bool(ok),
        "max_metric_invariance_error": worst_invariance,
        "max_cayley_roundtrip_error": worst_roundtrip,
        "max_ellipsoid_residual": worst_ellipsoid,
    }
    _write_json(out / "report.json", payload)
    (out / "report.txt").write_text(
        "\n".join(
            [
                f"geometry check: {'pass' if ok else 'FAIL'}",
                f"metric invariance error : {worst_invariance:.3e}",
                f"cayley roundtrip error  : {worst_roundtrip:.3e}",
                f"ellipsoid residual      : {worst_ellipsoid:.3e}",
            ]
        )
        + "\n"
    )
    return EXIT_OK if ok else EXIT_NUMERICAL


_RUNNERS = {
    "verdict": _run_verdict,
    "witness": _run_witness,
    "matrix": _run_matrix,
    "spectrum": _run_spectrum,
    "geometry-check": _run_geometry_check,
}


def run(job: JobSpec, out_dir) -> int:
    """Execute a parsed job, writing report.txt / report.json (and
    witness.csv when a certificate is produced) into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[job.command](job, out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="compdiff",
        description=(
            "Decide compactness of differences of linear-fractional composition "
            "operators and emit witness certificates."
        ),
    )
    parser.add_argument("--job", required=True, help="path to the JSON job file")
    parser.add_argument("--out", default=".", help="output directory for reports")
    parser.add_argument("--seed", type=int, default=None, help="override the job seed")
    parser.add_argument("--degree", type=int, default=None, help="override params.degree")
    parser.add_argument("--quiet", action="store_true", help="suppress the stdout summary")
    args = parser.parse_args(argv)

    try:
        job = parse_job(Path(args.job))
        if args.seed is not None:
            job = JobSpec(job.space, job.maps, job.command, job.params, args.seed)
        if args.degree is not None:
            params = dict(job.params)
            params["degree"] = args.degree
            job = JobSpec(job.space, job.maps, job.command, params, job.seed)
        code = run(job, args.out)
    except JobParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _PRECONDITION_ERRORS as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InconclusiveError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if not args.quiet:
        report = Path(args.out) / "report.txt"
        if report.exists():
            print(report.read_text(), end="")
    return code


if __name__ == "__main__":
    sys.exit(main())
