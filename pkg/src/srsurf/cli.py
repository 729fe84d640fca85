"""Command-line front end: invariants | symmetry | singular | selftest."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List

from .fields import MetricField, OneForm
from .frame import NoncontactError
from .invariants import invariants_at
from .jets import JetError
from .report import (PointReport, RunConfig, csv_header, csv_row, parse_grid,
                     parse_points, parse_probe)
from .selftest import run_selftest
from .singular import (build_singular_frame, lambda_identities, locate_sigma,
                       sigma_invariants)
from .symmetry import (DegeneratePointError, RESIDUAL_MIN_ORDER, build_system,
                       integrability_residuals, reconstruct_lnf)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SELFTEST = 2


def _add_common(p: argparse.ArgumentParser, default_order: int = 4):
    p.add_argument("--omega", required=True, help="1-form, e.g. 'dz + y*dx - x*dy'")
    p.add_argument("--metric-file", help="file with 6 upper-triangle metric entries")
    p.add_argument("--points", action="append", default=[],
                   help="semicolon-separated points 'x,y,z;x,y,z' (repeatable)")
    p.add_argument("--grid", help="grid spec 'x=-1:1:5, y=-1:1:5, z=0'")
    p.add_argument("--jet-order", type=int, default=default_order)
    p.add_argument("--tol-contact", type=float, default=1e-9)
    p.add_argument("--tol-degenerate", type=float, default=1e-9)
    p.add_argument("--tol-root", type=float, default=1e-10)
    p.add_argument("--tol-quad", type=float, default=1e-9)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--workers", type=int, default=1)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="srsurf",
        description="Numerical analysis of sub-Riemannian surfaces on 3-space: "
                    "adapted frames, invariants M and K, symmetry obstructions "
                    "and singular-locus invariants.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="lambda, M, K per point")
    _add_common(p)

    p = sub.add_parser("symmetry",
                       help="symmetry system D/EQ/residuals per point")
    _add_common(p, default_order=RESIDUAL_MIN_ORDER)
    p.add_argument("--reconstruct", action="store_true",
                   help="reconstruct ln f relative to --base")
    p.add_argument("--base", help="base point for ln f reconstruction")

    p = sub.add_parser("singular", help="Sigma roots and Q-invariants on probes")
    _add_common(p)
    p.add_argument("--probe", action="append", default=[],
                   help="segment 'x0,y0,z0 : x1,y1,z1' (repeatable)")

    p = sub.add_parser("selftest", help="run the built-in fixture checks")
    p.add_argument("--json", action="store_true", dest="as_json")
    p.add_argument("--jet-order", type=int, default=None)
    return ap


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        omega_text=args.omega,
        jet_order=args.jet_order,
        eps_contact=args.tol_contact,
        eps_D=args.tol_degenerate,
        root_tol=args.tol_root,
        quad_tol=args.tol_quad,
        out_format=args.format,
        workers=max(1, args.workers),
    )
    if args.metric_file:
        with open(args.metric_file) as fh:
            cfg.metric_text = fh.read()
    for chunk in args.points:
        cfg.points.extend(parse_points(chunk))
    if args.grid:
        cfg.points.extend(parse_grid(args.grid))
    for probe in getattr(args, "probe", []):
        cfg.probes.append(parse_probe(probe))
    cfg.reconstruct = getattr(args, "reconstruct", False)
    if getattr(args, "base", None):
        cfg.base = parse_points(args.base)[0]
    cfg.validate()
    return cfg


def _emit(reports: List[PointReport], cfg: RunConfig, stream):
    if cfg.out_format == "csv":
        print(csv_header(), file=stream)
        for r in reports:
            print(csv_row(r), file=stream)
    else:
        for r in reports:
            print(r.to_json(), file=stream)


def _map_points(fn, points, workers: int):
    if workers <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


def _diag(order: int, jets) -> dict:
    left = min(j.valid_order for j in jets)
    return {"jet_order": order, "budget_remaining": left}


def cmd_invariants(cfg: RunConfig) -> List[PointReport]:
    omega = OneForm.parse(cfg.omega_text)
    metric = MetricField.from_text(cfg.metric_text)

    def one(p) -> PointReport:
        try:
            vals, frame, _ = invariants_at(omega, metric, p, cfg.jet_order,
                                           eps_contact=cfg.eps_contact)
        except NoncontactError:
            return PointReport(point=tuple(p), branch="noncontact", contact=False)
        except (JetError, ValueError) as exc:
            return PointReport(point=tuple(p), branch="regular", error=str(exc))
        return PointReport(point=tuple(p), branch="regular", contact=True,
                           lam=frame.lam.value, M=vals.M.value, K=vals.K.value,
                           diagnostics=_diag(cfg.jet_order, (vals.M, vals.K)))

    return _map_points(one, cfg.points, cfg.workers)


def cmd_symmetry(cfg: RunConfig) -> List[PointReport]:
    omega = OneForm.parse(cfg.omega_text)
    metric = MetricField.from_text(cfg.metric_text)
    if cfg.reconstruct and cfg.base is None:
        raise ValueError("--reconstruct requires --base")

    def one(p) -> PointReport:
        try:
            sys_ = build_system(omega, metric, p, cfg.jet_order,
                                eps_D=cfg.eps_D, eps_contact=cfg.eps_contact)
        except NoncontactError:
            return PointReport(point=tuple(p), branch="noncontact", contact=False)
        except (JetError, ValueError) as exc:
            return PointReport(point=tuple(p), branch="regular", error=str(exc))
        rep = PointReport(point=tuple(p), contact=True, lam=sys_.frame.lam.value,
                          M=sys_.M.value, K=sys_.K.value, D=sys_.D.value)
        if sys_.degenerate:
            rep.branch = "degenerate"
            return rep
        rep.branch = "regular"
        rep.EQ1 = sys_.EQ1.value
        rep.EQ2 = sys_.EQ2.value
        try:
            rep.residuals = integrability_residuals(
                omega, metric, p, cfg.jet_order, eps_D=cfg.eps_D)
        except JetError as exc:
            rep.diagnostics["residual_error"] = str(exc)
        if cfg.reconstruct:
            try:
                rep.lnf = reconstruct_lnf(omega, metric, cfg.base, p,
                                          cfg.jet_order, quad_tol=cfg.quad_tol,
                                          eps_D=cfg.eps_D)
                import numpy as np
                from .symmetry import frame_to_coordinate_gradient
                fv = float(np.exp(rep.lnf))
                fr = sys_.frame
                e1f = fv * sys_.EQ1.value
                e2f = fv * sys_.EQ2.value
                rep.V = tuple(-e2f * fr.E1[i].value + e1f * fr.E2[i].value
                              + fv * fr.E3[i].value for i in range(3))
            except (DegeneratePointError, JetError) as exc:
                rep.diagnostics["reconstruct_error"] = str(exc)
        rep.diagnostics.update(_diag(cfg.jet_order, (sys_.D,)))
        return rep

    return _map_points(one, cfg.points, cfg.workers)


def cmd_singular(cfg: RunConfig) -> List[PointReport]:
    omega = OneForm.parse(cfg.omega_text)
    metric = MetricField.from_text(cfg.metric_text)
    reports = []
    for seg in cfg.probes:
        sp = locate_sigma(omega, metric, seg, cfg.jet_order,
                          root_tol=cfg.root_tol)
        if sp is None:
            rep = PointReport(point=seg[0], branch="regular",
                              error="no Sigma crossing on probe")
            rep.diagnostics["probe"] = [list(seg[0]), list(seg[1])]
            reports.append(rep)
            continue
        rep = PointReport(point=sp.point, branch="noncontact", contact=False,
                          lam=sp.lambda_residual)
        rep.diagnostics["transversal"] = sp.transversal
        rep.diagnostics["lambda_gradient_on_delta"] = sp.lambda_gradient_on_delta
        try:
            frame, c = build_singular_frame(omega, metric, sp.point,
                                            cfg.jet_order)
            q = sigma_invariants(omega, metric, sp, cfg.jet_order)
            r1, r2 = lambda_identities(frame, c)
            rep.Q112, rep.Q212 = q.Q112, q.Q212
            rep.diagnostics["lambda_identity_residuals"] = [r1, r2]
        except JetError as exc:
            rep.error = str(exc)
        reports.append(rep)
    return reports


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "selftest":
        results = run_selftest(jet_order=args.jet_order)
        ok = all(r.passed for r in results)
        if args.as_json:
            doc = {"schema": "srs/1", "passed": ok,
                   "checks": [r.to_dict() for r in results]}
            print(json.dumps(doc, sort_keys=True))
        else:
            for r in results:
                status = "PASS" if r.passed else "FAIL"
                line = f"{status}  {r.name:40s} max_dev={r.max_dev:.3e} tol={r.tol:g}"
                if r.note:
                    line += f"  ({r.note})"
                print(line)
            print("selftest:", "PASS" if ok else "FAIL")
        return EXIT_OK if ok else EXIT_SELFTEST

    try:
        cfg = _config_from_args(args)
        omega_check = OneForm.parse(cfg.omega_text)  # fail fast on syntax
        MetricField.from_text(cfg.metric_text)
        del omega_check
        handler = {"invariants": cmd_invariants,
                   "symmetry": cmd_symmetry,
                   "singular": cmd_singular}[args.command]
        reports = handler(cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.out:
        with open(args.out, "w") as fh:
            _emit(reports, cfg, fh)
    else:
        _emit(reports, cfg, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
