"""``homcert`` command line.

Exit codes: 0 everything verified, 1 usage or resource error, 2 a
verification flag failed.  Reports go to stdout, diagnostics to stderr and
certificates to ``--output`` (or stdout with ``--json``).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from homcert import __version__, certio
from homcert.counterexample import (
    GlobalCertificate,
    EnvelopeTensorReport,
    StageCertificate,
    algebra_hash,
    check_hypothesis,
    remark_checks,
    run_stage,
    verify_envelope_tensor,
    verify_theorem,
)
from homcert.errors import HomcertError, IncompleteStages, ParseError
from homcert.linalg import use_backend
from homcert.resolution import resolve_residue
from homcert.ringspec import load_ring

log = logging.getLogger("homcert")

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    p: int
    ring: str
    backend: str
    output: Path | None
    json: bool
    sweep_b: bool
    jobs: int
    baer_budget: int
    memory_mb: int | None
    timings: bool
    allow_stage3: bool
    method: str = "auto"

    def __post_init__(self):
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")
        if self.baer_budget < 1 or (self.memory_mb is not None and self.memory_mb < 1):
            raise UsageError("budgets must be positive")


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--p", type=int, default=2, help="field characteristic (default 2)")
    g.add_argument("--ring", default=None, help="preset trunc:E, sq0:M, field, or a JSON ring spec (default trunc:p)")
    g.add_argument("--backend", choices=("auto", "dense", "sparse"), default="auto")
    g.add_argument("--output", "-o", type=Path, help="write the certificate document here")
    g.add_argument("--json", action="store_true", help="print the certificate document instead of the report")
    g.add_argument("--sweep-b", action="store_true", help="repeat the obstruction for every socle line of I^1")
    g.add_argument("--jobs", type=int, default=1, help="stages verified in parallel")
    g.add_argument("--baer-budget", type=int, default=200_000, help="max ideals enumerated by the Baer test")
    g.add_argument("--memory-budget-mb", type=int, default=None, help="overrides HOMCERT_MEMORY_BUDGET_MB")
    g.add_argument("--timings", action="store_true", help="record timings (certificates stop being reproducible)")
    g.add_argument("--allow-stage3", action="store_true", help="permit stages >= 3")
    g.add_argument("--method", choices=("auto", "full", "restricted"), default="auto",
                   help="full window, restricted kernel check, or pick by memory budget")
    g.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="homcert", description="Exact certificates for a non-left-complete t-structure.")
    parser.add_argument("--version", action="version", version=f"homcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("verify-stage", parents=[common], help="certify one stage")
    s.add_argument("--i", type=int, required=True)
    s = sub.add_parser("verify-theorem", parents=[common], help="certify stages 1..imax and assemble")
    s.add_argument("--imax", type=int, default=2)
    s = sub.add_parser("verify-envelope-tensor", parents=[common], help="tensor of injective envelopes")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s = sub.add_parser("resolve", parents=[common], help="minimal resolution of k and its dual")
    s.add_argument("--length", type=int, default=4)
    s = sub.add_parser("remark-checks", parents=[common], help="finite direct-sum identities")
    s.add_argument("--nmax", type=int, default=8)
    s.add_argument("--total", type=int, default=None, help="N for the splitting/truncation checks (default min(nmax, 6))")
    s = sub.add_parser("check-certificate", parents=[common], help="recompute a stored certificate and compare")
    s.add_argument("path", type=Path)
    return parser


# rendering --------------------------------------------------------------------------


def slot_diagram(slots: str, S) -> str:
    width = len(str(len(slots)))
    idx = " ".join(str(k + 1).rjust(width) for k in range(len(slots)))
    row = " ".join(ch.rjust(width) for ch in slots)
    return f"  slot  {idx}\n  elem  {row}\n  S = {{{', '.join(map(str, S))}}}"


def _flag(ok: bool) -> str:
    return "ok" if ok else "FAILED"


def render_stage(c: StageCertificate) -> str:
    lines = [
        f"stage {c.stage}: n = {c.n}, ring {c.ring}, cocycle in degree {c.slots.count('b')}, method {c.method}",
        slot_diagram(c.slots, c.S),
        "  window dims  " + ", ".join(f"J^{k} = {v}" for k, v in c.window_dims.items()),
        f"  cycle                     {_flag(c.cycle_ok)}",
        f"  killed by every Phi_j(m)  {_flag(c.annihilated_by_all_factors)}",
        f"  boundary                  {_flag(c.boundary_exists)} "
        + (f"(preimage set of dimension {c.boundary_affine_dim})" if c.boundary_affine_dim is not None
           else "(explicit preimage checked)"),
        f"  obstruction               {_flag(c.obstruction_ok)}",
    ]
    w = c.witness
    if w.get("mode") == "enumeration":
        lines.append(
            f"  enumerated {w['candidates']} preimages, {w['candidates_killed_on_S']} killed on S; "
            f"first witness factors {w['first_witness_factor_counts']}"
        )
    elif w.get("mode") in ("rank", "restricted-rank"):
        if w["mode"] == "restricted-rank":
            lines.append(f"  restricted to ker B: {w['restricted_dim']} columns, full window not built")
        lines.append(
            f"  rank proof: restricted rank {w['rank_restricted']} < augmented rank {w['rank_augmented']}"
            if w["rank_augmented"] > w["rank_restricted"]
            else f"  rank proof FAILED: ranks {w['rank_restricted']} / {w['rank_augmented']}"
        )
    if c.b_sweep is not None:
        good = sum(item["obstruction_ok"] for item in c.b_sweep)
        lines.append(f"  b sweep: {good}/{len(c.b_sweep)} socle lines obstructed")
    for k, h in c.hashes.items():
        lines.append(f"  sha256 {k:<12} {h[:16]}")
    if c.timings:
        lines.append("  timings " + ", ".join(f"{k} {v:.3f}s" for k, v in c.timings.items()))
    return "\n".join(lines)


def render_envelope_tensor(r: EnvelopeTensorReport) -> str:
    return "\n".join(
        [
            f"envelope of k over {r.left} ⊗ {r.right}:",
            f"  dims {r.dim_left} x {r.dim_right} -> {r.dim_tensor_envelope}  {_flag(r.dims_multiply)}",
            f"  socle dimension {r.socle_dim}  {_flag(r.socle_dim == 1)}",
            f"  Baer test: {r.baer} ({r.baer_ideals} ideals)",
            f"  isomorphism E(R⊗S) ≅ E(R)⊗E(S): {_flag(r.isomorphism_found)}",
        ]
    )


def render_theorem(g: GlobalCertificate) -> str:
    parts = [f"homcert {g.version}: {g.ring}, stages 1..{g.i_max}"]
    parts += [render_stage(s) for s in g.stages]
    parts += [render_envelope_tensor(r) for r in g.envelope_tensor]
    parts.append(f"index sets disjoint: {_flag(g.disjointness['ok'])}")
    parts.append(g.inference)
    return "\n\n".join(parts)


def _element(vec, labels) -> str:
    terms = []
    for c, lab in zip(vec, labels):
        if c:
            terms.append(lab if c == 1 else f"{c}{lab}" if lab != "1" else str(c))
    return "+".join(terms) or "0"


def resolution_document(alg, length: int) -> dict:
    res, ir = resolve_residue(alg, length)
    labels = alg.basis_labels
    diffs = {}
    for i, ent in res.entries.items():
        diffs[str(i)] = [[_element(ent[b, c], labels) for c in range(ent.shape[1])] for b in range(ent.shape[0])]
    return {
        "ring": alg.name,
        "ring_hash": algebra_hash(alg),
        "length": length,
        "ranks": list(res.ranks),
        "minimal": res.is_minimal(),
        "exact": res.check_exact(),
        "differentials": diffs,
        "injective_dims": [ir.complex.dim(j) for j in range(length + 1)],
        "hashes": {str(j): ir.complex.d(j).digest() for j in range(length)},
    }


def render_resolution(doc: dict) -> str:
    lines = [f"minimal free resolution of k over {doc['ring']}", f"  ranks {doc['ranks']}"]
    for i, m in doc["differentials"].items():
        lines.append(f"  d_{i}: " + "; ".join("[" + ", ".join(row) + "]" for row in m))
    lines.append(f"  minimal {_flag(doc['minimal'])}, exact {_flag(doc['exact'])}")
    lines.append(f"  injective resolution dims {doc['injective_dims']}")
    return "\n".join(lines)


def render_remark(doc: dict) -> str:
    return "\n".join(
        [
            f"finite direct sums of shifted copies of k over {doc['ring']}",
            f"  H^0 of sums k[1..n]: {doc['h0_finite_sums']}  {_flag(doc['h0_vanishes'])}",
            f"  splitting {_flag(doc['splitting_ok'])}",
            f"  degreewise cohomology {doc['degreewise_cohomology']}  {_flag(doc['degreewise_ok'])}",
            f"  truncations ({len(doc['truncation'])} cases) {_flag(doc['truncation_ok'])}",
        ]
    )


# commands ---------------------------------------------------------------------------


def _emit(cfg: RunConfig, document: str, report: str) -> None:
    if cfg.output is not None:
        cfg.output.write_text(document)
        log.info("wrote %s", cfg.output)
    sys.stdout.write(document if cfg.json else report + "\n")


def _ring(cfg: RunConfig, ref: str | None = None):
    alg, _ = load_ring(ref or cfg.ring, cfg.p)
    return alg


def cmd_verify_stage(args, cfg: RunConfig) -> int:
    if args.i < 1:
        raise UsageError("--i must be at least 1")
    if args.i >= 3 and not cfg.allow_stage3:
        raise UsageError("stage 3 and beyond need --allow-stage3")
    r1 = _ring(cfg)
    cert = run_stage(r1, args.i, sweep=cfg.sweep_b, timings=cfg.timings, strict=False, method=cfg.method)
    _emit(cfg, certio.emit(cert), render_stage(cert))
    return EXIT_OK if cert.all_ok else EXIT_FAILED


def cmd_verify_theorem(args, cfg: RunConfig) -> int:
    if args.imax < 1:
        raise UsageError("--imax must be at least 1")
    r1 = _ring(cfg)
    check_hypothesis(r1)
    try:
        cert = verify_theorem(
            r1, args.imax, sweep=cfg.sweep_b, timings=cfg.timings, allow_large=cfg.allow_stage3, jobs=cfg.jobs,
            method=cfg.method,
        )
    except IncompleteStages as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    _emit(cfg, certio.emit(cert), render_theorem(cert))
    return EXIT_OK


def cmd_verify_envelope_tensor(args, cfg: RunConfig) -> int:
    r, s = _ring(cfg, args.left), _ring(cfg, args.right)
    report = verify_envelope_tensor(r, s, baer_budget=cfg.baer_budget)
    _emit(cfg, certio.emit(report), render_envelope_tensor(report))
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_resolve(args, cfg: RunConfig) -> int:
    if args.length < 1:
        raise UsageError("--length must be at least 1")
    doc = resolution_document(_ring(cfg), args.length)
    _emit(cfg, certio.emit(doc, "resolution"), render_resolution(doc))
    return EXIT_OK if doc["minimal"] and doc["exact"] else EXIT_FAILED


def cmd_remark_checks(args, cfg: RunConfig) -> int:
    if args.nmax < 1:
        raise UsageError("--nmax must be at least 1")
    total = args.total if args.total is not None else min(args.nmax, 6)
    doc = remark_checks(_ring(cfg), args.nmax, split_total=total)
    ok = doc["h0_vanishes"] and doc["splitting_ok"] and doc["degreewise_ok"] and doc["truncation_ok"]
    _emit(cfg, certio.emit(doc, "remark"), render_remark(doc))
    return EXIT_OK if ok else EXIT_FAILED


def _stage_matches(stored: StageCertificate, fresh: StageCertificate) -> bool:
    a, b = stored.to_dict(), fresh.to_dict()
    a.pop("timings", None), b.pop("timings", None)
    if stored.b_sweep is None:
        b.pop("b_sweep", None), a.pop("b_sweep", None)
    return a == b


def cmd_check_certificate(args, cfg: RunConfig) -> int:
    try:
        stored = certio.parse(args.path.read_text())
    except OSError as exc:
        raise ParseError(str(exc), str(args.path)) from exc
    if isinstance(stored, GlobalCertificate):
        stages = stored.stages
        claims_ok = stored.all_verified
    elif isinstance(stored, StageCertificate):
        stages = [stored]
        claims_ok = True
    else:
        raise UsageError("check-certificate handles stage and theorem certificates")
    r1 = _ring(cfg)
    if isinstance(stored, GlobalCertificate) and stored.ring_hash != algebra_hash(r1):
        print("ring does not match the certificate's ring hash", file=sys.stderr)
        return EXIT_FAILED
    bad = []
    for st in stages:
        if st.p != r1.p:
            raise UsageError(f"certificate is over F_{st.p}, ring is over F_{r1.p}")
        fresh = run_stage(r1, st.stage, sweep=st.b_sweep is not None, strict=False, method=st.method)
        if not st.all_ok or not _stage_matches(st, fresh):
            bad.append(st.stage)
    if bad or not claims_ok:
        print(f"certificate does not reproduce (stages {bad})", file=sys.stderr)
        return EXIT_FAILED
    print(f"certificate {args.path} reproduces ({len(stages)} stage(s))")
    return EXIT_OK


COMMANDS = {
    "verify-stage": cmd_verify_stage,
    "verify-theorem": cmd_verify_theorem,
    "verify-envelope-tensor": cmd_verify_envelope_tensor,
    "resolve": cmd_resolve,
    "remark-checks": cmd_remark_checks,
    "check-certificate": cmd_check_certificate,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                            format="%(levelname)s %(message)s")
        cfg = RunConfig(
            p=args.p,
            ring=args.ring or f"trunc:{args.p}",
            backend=args.backend,
            output=args.output,
            json=args.json,
            sweep_b=args.sweep_b,
            jobs=args.jobs,
            baer_budget=args.baer_budget,
            memory_mb=args.memory_budget_mb,
            timings=args.timings,
            allow_stage3=args.allow_stage3,
            method=args.method,
        )
        if cfg.memory_mb is not None:
            os.environ["HOMCERT_MEMORY_BUDGET_MB"] = str(cfg.memory_mb)
        with use_backend(cfg.backend):
            return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"homcert: usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except HomcertError as exc:
        print(f"homcert: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except MemoryError:
        print("homcert: ResourceBudgetExceeded: out of memory", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
