"""Command-line front end: the full pipeline for one curve, and corpus regression runs."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import bounds, galois
from .arith import DomainError, factor, is_prime
from .curve import MordellWeilInput, WeierstrassModel, invariants, parse_curve, parse_points, torsion_subgroup
from .padic import Padic, PrecisionError
from .reduction import conductor, hypotheses_met, hypothesis_check
from .tate import (
    SPLIT_FIELD,
    TateUniformization,
    local_field_labels,
    local_image,
)

SCHEMA = 1
log = logging.getLogger("tatebound")

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    curve: tuple[Fraction, ...]
    generators: tuple[tuple[Fraction, Fraction], ...]
    p: int
    n_min: int = 1
    n_max: int = 5
    precision_guard: int = 8
    prime_budget: int = 10_000
    verify_group_theory: bool = False
    image_check: bool = True

    def __post_init__(self):
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ValueError(f"bad n range {self.n_min}..{self.n_max}")
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")

    @property
    def model(self) -> WeierstrassModel:
        return WeierstrassModel(*self.curve)


def parse_n_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    return int(text), int(text)


# ---------------------------------------------------------------------------
# JSON helpers


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _signed_factorization(x: Fraction) -> list:
    """[[sign], [p, e], ...] with negative exponents for the denominator."""
    if x == 0:
        return [0]
    num = factor(abs(x.numerator)).factors if abs(x.numerator) > 1 else ()
    den = factor(x.denominator).factors if x.denominator > 1 else ()
    pairs = sorted([(p, e) for p, e in num] + [(p, -e) for p, e in den])
    return [1 if x > 0 else -1] + [[p, e] for p, e in pairs]


def _classes(cs) -> list:
    return [[int(t), int(e)] for t, e in cs]


# ---------------------------------------------------------------------------
# Pipeline


def _stage(stages: dict, name: str, fn):
    try:
        out = fn()
    except Exception as exc:  # recorded per stage, never dropped
        stages[name] = f"failed: {type(exc).__name__}: {exc}"
        log.debug("stage %s failed", name, exc_info=True)
        return None
    stages[name] = "ok"
    return out


def run(config: RunConfig) -> dict:
    """Run every stage for one curve; returns a JSON-ready report."""
    E = config.model
    p = config.p
    stages: dict[str, str] = {}
    report: dict = {
        "schema": SCHEMA,
        "curve": [_frac(a) for a in E.ainvs],
        "generators": [[_frac(x), _frac(y)] for x, y in config.generators],
        "p": p,
        "n_range": [config.n_min, config.n_max],
        "status": "ok",
        "stages": stages,
    }
    mw = _stage(stages, "mordell_weil", lambda: MordellWeilInput.build(E, config.generators))
    inv = _stage(stages, "invariants", lambda: invariants(E))
    if inv is None or mw is None:
        report["status"] = "error"
        return report
    if inv.disc == 0:
        stages["invariants"] = "failed: singular curve"
        report["status"] = "error"
        return report
    profile = _stage(stages, "conductor", lambda: conductor(E))
    if profile is None:
        report["status"] = "error"
        return report
    local = {
        "discriminant": profile.minimal_disc,
        "discriminant_factorization": _signed_factorization(Fraction(profile.minimal_disc)),
        "conductor": profile.conductor,
        "conductor_factorization": _signed_factorization(Fraction(profile.conductor)),
        "j": _frac(inv.j),
        "j_factorization": _signed_factorization(inv.j),
        "primes": [
            {
                "prime": ell,
                "kodaira": d.kodaira,
                "reduction": d.reduction.value,
                "potentially_good": d.potentially_good,
                "ord_disc": d.ord_disc,
                "conductor_exponent": d.conductor_exponent,
            }
            for ell, d in sorted(profile.local.items())
        ],
    }
    report["local"] = local
    tors = _stage(stages, "torsion", lambda: torsion_subgroup(E))
    torsion_gens = tuple(tors[1]) if tors else ()
    if tors:
        local["torsion_order"] = tors[0]
        if tors[0] > 1:
            local["torsion_note"] = "nontrivial torsion: r2n uses free generators and torsion together"
    diags = hypothesis_check(profile, p)
    local["hypotheses"] = [{"name": d.name, "ok": d.ok, "reason": d.reason} for d in diags]
    stages["hypothesis_check"] = "ok"
    if not hypotheses_met(diags):
        report["status"] = "hypotheses-not-met"
        if config.verify_group_theory:
            report["group_theory"] = group_theory_report()
        return report

    data = profile.local[p]
    ns = range(config.n_min, config.n_max + 1)
    guard = config.precision_guard
    base_prec = config.n_max + guard + data.ord_disc
    cap = 4 * (config.n_max + guard) + data.ord_disc

    def uniformize(prec):
        unif = TateUniformization(E, data, prec)
        images = {n: local_image(unif, mw.generators, n, torsion_gens) for n in ns}
        return unif, images

    def with_retry():
        prec = base_prec
        while True:
            try:
                return uniformize(prec)
            except (PrecisionError, DomainError):
                if prec >= cap:
                    raise
                prec = min(2 * prec, cap)

    out = _stage(stages, "tate_local", with_retry)
    if out is None:
        report["status"] = "error"
        return report
    unif, images = out
    local["tate"] = {
        "field": unif.field,
        "ord_q": unif.q.valuation(),
        "q_unit_residue": (unif.q / Padic(p, unif.q.valuation(), 1, unif.q.relprec + 8)).residue(min(unif.prec, 16)),
        "residue_digits": min(unif.prec, 16),
        "precision": unif.prec,
    }
    if unif.field != SPLIT_FIELD:
        local["tate"]["D"] = unif.D
    local["levels"] = [
        {
            "n": n,
            "classes": _classes(img.classes),
            "image_size": img.image_size,
            "nu": img.nu,
            "nu_stable": img.stable,
            "r2n": img.r2n,
            "delta2": img.delta2,
        }
        for n, img in images.items()
    ]
    if p == 2:
        units = next(iter(images.values())).units

        def labels():
            # the 2-adic square-class tests can need more digits than the images did
            u, us = unif, units
            while True:
                try:
                    fl = local_field_labels(u, us, 1)
                    break
                except PrecisionError:
                    if u.prec >= cap:
                        raise
                    u = TateUniformization(E, data, min(2 * u.prec, cap))
                    us = local_image(u, mw.generators, 1, torsion_gens).units
            return {
                "sqrt_q": fl.sqrt_q,
                "kummer_classes": list(fl.kummer_classes) if fl.kummer_classes else None,
                "zeta4_in_L1": fl.zeta4_in_L1,
                "m_in_L1": fl.m_in_L1,
                "note": fl.note,
            }

        local["field_labels"] = _stage(stages, "field_labels", labels)

    # bounds
    r = mw.rank
    held_needed = p == 2 and any(
        d.potentially_good and not d.multiplicative for ell, d in profile.local.items() if ell != p
    )
    rows = []
    for n in ns:
        img = images[n]
        table = bounds.nu_table(profile.local, p, n)
        rep = bounds.kappa_lower_bound(p, n, r, table, img.r2n, img.delta2, img.nu, profile.conductor)
        assert rep.audit()
        claim = bounds.divisibility_claim(rep)
        row = {
            "n": n,
            "kappa_lower_bound": rep.kappa_lower_bound,
            "raw_bound": rep.raw_bound,
            "headline": rep.headline,
            "refined": rep.refined,
            "trail": [[k, v] for k, v in rep.trail],
            "nu_table": {str(ell): v for ell, v in table.entries},
            "s": table.s,
            "r2n": rep.r2n,
            "delta2": rep.delta2,
            "nu": rep.nu,
            "claim_exponent": rep.claim_exponent,
            "claim": str(claim),
            "vacuous": claim.vacuous,
            "inertia_p_exponent": rep.inertia_p,
            "inertia_ell_exponents": {str(ell): v for ell, v in rep.inertia_ell},
        }
        if held_needed:
            held = bounds.nu_table(profile.local, p, n, rule=bounds.nu_ell_held)
            hrep = bounds.kappa_lower_bound(p, n, r, held, img.r2n, img.delta2, img.nu)
            row["held_variant"] = {
                "rule": "nu = 1 at potentially good primes for every n",
                "nu_table": {str(ell): v for ell, v in held.entries},
                "raw_bound": hrep.raw_bound,
                "kappa_lower_bound": hrep.kappa_lower_bound,
                "differs": hrep.raw_bound != rep.raw_bound,
            }
        rows.append(row)
    report["theorem1"] = rows
    stages["bounds"] = "ok"
    exact = profile.conductor == p
    report["corollary1"] = {
        "applicable": exact,
        "values": [
            {"n": n, "kappa": bounds.corollary_exact(p, n, r, images[n].nu, profile.conductor)} for n in ns
        ]
        if exact
        else [],
    }

    if config.image_check:

        def image():
            diag = galois.image_diagnostic(E, p, config.prime_budget)
            cov = diag.coverage
            return {
                "verdict": diag.verdict,
                "witness": diag.witness,
                "mod2_type": diag.mod2_type,
                "quartic_roots": [_frac(t) for t in diag.quartic.roots] if diag.quartic else None,
                "coverage": {
                    "level": f"{p}^{cov.n0}",
                    "primes_used": cov.primes_used,
                    "observed": cov.observed,
                    "target": cov.target,
                    "complete": cov.complete,
                },
                "note": diag.note,
            }

        report["galois_image"] = _stage(stages, "galois_image", image)
    if config.verify_group_theory:
        report["group_theory"] = group_theory_report()
    if any(v != "ok" for v in stages.values()):
        report["status"] = "partial"
    return report


def group_theory_report() -> dict:
    lat = galois.verify_submodule_lattice()
    hs = galois.verify_H_structure()
    im = galois.verify_inertia_matrices()
    return {
        "submodule_lattice": {
            "ok": lat.ok,
            "nontrivial_proper": len(lat.submodules),
            "sizes": [len(s) for s in lat.submodules],
            "direct_sum": lat.direct_sum,
            "inclusions": lat.inclusions,
            "index_V4_V3": lat.quotient_v4_v3,
        },
        "H_structure": {
            "ok": hs.ok,
            "classes": hs.h1,
            "index_H2": hs.index_h2,
            "index_H1": hs.index_h1,
            "squares_generate": hs.squares_generate_calH,
            "det_square_is_one": hs.det_square_is_one,
            "normal": hs.normal,
        },
        "inertia_matrices": {
            "ok": im.ok,
            "span_size": len(im.span),
            "meet_V2_1": len(im.meet_v2_1),
            "meet_V2_2": len(im.meet_v2_2),
        },
        "gl2_orders": {k: list(v) for k, v in galois.group_orders().items()},
    }


def exit_code(report: dict) -> int:
    return {"ok": EXIT_OK, "hypotheses-not-met": EXIT_HYPOTHESIS}.get(report["status"], EXIT_ERROR)


# ---------------------------------------------------------------------------
# Text output


def render_text(report: dict) -> str:
    lines = [f"curve [{', '.join(report['curve'])}]  p = {report['p']}  status: {report['status']}"]
    loc = report.get("local")
    if loc:
        lines.append(f"minimal discriminant {loc['discriminant']}  conductor {loc['conductor']}  j = {loc['j']}")
        for row in loc["primes"]:
            pg = "  potentially good" if row["potentially_good"] and row["reduction"] == "additive" else ""
            lines.append(
                f"  {row['prime']}: {row['kodaira']} {row['reduction']} f={row['conductor_exponent']}"
                f" ord(Delta)={row['ord_disc']}{pg}"
            )
        for h in loc["hypotheses"]:
            lines.append(f"  [{'ok' if h['ok'] else 'FAIL'}] {h['name']}: {h['reason']}")
        if "tate" in loc:
            t = loc["tate"]
            lines.append(f"Tate parameter over {t['field']}: ord q = {t['ord_q']}")
        for lv in loc.get("levels", []):
            extra = f" r2n={lv['r2n']} delta2={lv['delta2']}" if lv["r2n"] is not None else ""
            lines.append(f"  n={lv['n']}: classes {lv['classes']} nu={lv['nu']}{extra}")
        fl = loc.get("field_labels")
        if fl:
            lines.append(f"  Q_2(sqrt q) = Q_2(sqrt {fl['sqrt_q']}); zeta_4 in L_1: {fl['zeta4_in_L1']} ({fl['note']})")
    for row in report.get("theorem1", []):
        trail = " ".join(f"{v:+d}" for _, v in row["trail"])
        lines.append(
            f"n={row['n']}: kappa >= {row['raw_bound']} ({trail})  nu_ell {row['nu_table']}  claim {row['claim']}"
        )
        hv = row.get("held_variant")
        if hv and hv["differs"]:
            lines.append(f"       variant with {hv['rule']}: kappa >= {hv['raw_bound']}")
    cor = report.get("corollary1")
    if cor and cor["applicable"]:
        lines.append("exact: " + ", ".join(f"kappa_{v['n']} = {v['kappa']}" for v in cor["values"]))
    gi = report.get("galois_image")
    if gi:
        cov = gi["coverage"]
        lines.append(
            f"image: {gi['verdict']} (trace/det coverage {cov['observed']}/{cov['target']} at {cov['level']})"
            + (f"; witness: {gi['witness']}" if gi["witness"] else "")
        )
    gt = report.get("group_theory")
    if gt:
        lines.append(
            "group theory: lattice {} / H {} / inertia {}".format(
                gt["submodule_lattice"]["ok"], gt["H_structure"]["ok"], gt["inertia_matrices"]["ok"]
            )
        )
    bad = {k: v for k, v in report["stages"].items() if v != "ok"}
    for k, v in bad.items():
        lines.append(f"stage {k}: {v}")
    return "\n".join(lines)


def emit_json(report: dict) -> str:
    return json.dumps(report, ensure_ascii=False, indent=2)


# ---------------------------------------------------------------------------
# Corpus


@dataclass(frozen=True)
class CorpusEntry:
    line: int
    label: str
    curve: tuple[Fraction, ...]
    generators: tuple[tuple[Fraction, Fraction], ...]
    p: int
    n_range: tuple[int, int]
    expected: dict
    source: dict = field(default_factory=dict)  # expected field -> where the value comes from


class CorpusError(ValueError):
    pass


def load_corpus(path: Path) -> list[CorpusEntry]:
    entries = []
    for i, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        try:
            obj = json.loads(raw)
            curve = tuple(Fraction(str(c)) for c in obj["curve"])
            if len(curve) != 5:
                raise ValueError("curve needs five coefficients")
            gens = tuple(parse_points(obj.get("generators", "")))
            lo, hi = obj.get("n", [1, 1])
            entries.append(
                CorpusEntry(i, str(obj["label"]), curve, gens, int(obj["p"]), (int(lo), int(hi)),
                            dict(obj.get("expected", {})), dict(obj.get("source", {})))
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise CorpusError(f"{path}:{i}: malformed corpus line: {exc}") from exc
    return entries


def summarize(report: dict) -> dict:
    """Flatten a report into the keys a corpus entry may pin down."""
    out: dict = {"status": report["status"]}
    loc = report.get("local")
    if loc:
        out["discriminant"] = loc["discriminant"]
        out["discriminant_factorization"] = loc["discriminant_factorization"]
        out["conductor"] = loc["conductor"]
        out["j_factorization"] = loc["j_factorization"]
        out["reduction"] = {str(r["prime"]): r["reduction"] for r in loc["primes"]}
        out["potentially_good"] = {str(r["prime"]): r["potentially_good"] for r in loc["primes"]}
        if loc.get("field_labels"):
            out["sqrt_q"] = loc["field_labels"]["sqrt_q"]
            out["zeta4_in_L1"] = loc["field_labels"]["zeta4_in_L1"]
        if "levels" in loc:
            out["nu"] = {str(lv["n"]): lv["nu"] for lv in loc["levels"]}
    rows = report.get("theorem1", [])
    if rows:
        out["nu_table"] = {str(r["n"]): r["nu_table"] for r in rows}
        out["r2n"] = {str(r["n"]): r["r2n"] for r in rows}
        out["delta2"] = {str(r["n"]): r["delta2"] for r in rows}
        out["raw_bound"] = {str(r["n"]): r["raw_bound"] for r in rows}
        out["kappa_lower_bound"] = {str(r["n"]): r["kappa_lower_bound"] for r in rows}
        out["claim_exponent"] = {str(r["n"]): r["claim_exponent"] for r in rows}
    gi = report.get("galois_image")
    if gi:
        out["image_verdict"] = gi["verdict"]
    return out


def _compare(expected, computed, path=""):
    """Yield (field path, expected, computed) for every disagreement."""
    if isinstance(expected, dict) and isinstance(computed, dict):
        for k, v in expected.items():
            yield from _compare(v, computed.get(k), f"{path}.{k}" if path else k)
    elif expected != computed:
        yield path, expected, computed


def _run_entry(entry: CorpusEntry) -> tuple[CorpusEntry, dict | None, list, float, str | None]:
    t0 = time.perf_counter()
    try:
        cfg = RunConfig(entry.curve, entry.generators, entry.p, *entry.n_range)
        report = run(cfg)
    except Exception as exc:
        return entry, None, [], time.perf_counter() - t0, f"{type(exc).__name__}: {exc}"
    summary = summarize(report)
    diffs = list(_compare(entry.expected, summary))
    return entry, report, diffs, time.perf_counter() - t0, None


def run_corpus(path, workers: int = 4, out=sys.stdout) -> int:
    entries = load_corpus(Path(path))
    if not entries:
        print(f"warning: {path} has no entries", file=out)
        return EXIT_OK
    failures = 0
    with ProcessPoolExecutor(max_workers=min(workers, len(entries))) as pool:
        results = list(pool.map(_run_entry, entries))
    for entry, _, diffs, secs, err in results:
        if err:
            failures += 1
            print(f"FAIL {entry.label} (line {entry.line}): {err}", file=out)
            continue
        if diffs:
            failures += 1
            print(f"FAIL {entry.label} (line {entry.line}, {secs:.1f}s)", file=out)
            for fld, exp, got in diffs:
                top = fld.split(".")[0]
                src = entry.source.get(fld, entry.source.get(top, "unspecified"))
                print(f"  {fld}: expected {exp!r}, computed {got!r} [source: {src}]", file=out)
        else:
            print(f"PASS {entry.label} ({secs:.1f}s)", file=out)
    print(f"{len(entries) - failures}/{len(entries)} entries pass", file=out)
    return EXIT_ERROR if failures else EXIT_OK


# ---------------------------------------------------------------------------
# argparse


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tatebound",
        description="Lower bounds on the p-part of class numbers of Q(E[p^n]) at multiplicative p.",
    )
    ap.add_argument("--curve", help="a1,a2,a3,a4,a6")
    ap.add_argument("--gens", default="", help='Mordell-Weil generators, "(x1,y1);(x2,y2)"')
    ap.add_argument("--p", type=int)
    ap.add_argument("--n", default="1..5", help="level or range, e.g. 3 or 1..5")
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--verify-group-theory", action="store_true")
    ap.add_argument("--corpus", help="JSONL regression corpus")
    ap.add_argument("--precision-guard", type=int, default=8)
    ap.add_argument("--prime-budget", type=int, default=10_000)
    ap.add_argument("--no-image-check", action="store_true", help="skip Frobenius trace coverage")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if args.corpus:
        try:
            return run_corpus(args.corpus)
        except (CorpusError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    if args.curve is None or args.p is None:
        if args.verify_group_theory:
            report = {"schema": SCHEMA, "group_theory": group_theory_report()}
            ok = all(v["ok"] for k, v in report["group_theory"].items() if k != "gl2_orders")
            print(emit_json(report) if args.json else json.dumps(report["group_theory"], indent=2))
            return EXIT_OK if ok else EXIT_ERROR
        print("error: --curve and --p are required (or --corpus / --verify-group-theory)", file=sys.stderr)
        return EXIT_ERROR
    try:
        model = parse_curve(args.curve)
        gens = parse_points(args.gens)
        lo, hi = parse_n_range(args.n)
        cfg = RunConfig(
            model.ainvs,
            tuple(gens),
            args.p,
            lo,
            hi,
            args.precision_guard,
            args.prime_budget,
            args.verify_group_theory,
            not args.no_image_check,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = run(cfg)
    print(emit_json(report) if args.json else render_text(report))
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
