"""Batch command-line front-end.

Every subcommand reads one INI config, writes its outputs under --out, and
finishes with a manifest recording the command, config digest, tool
version, produced files and wall time.  Exit codes: 0 success, 2 invalid
input, 3 numeric failure, 64 usage errors.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import run_all
from .errors import InvalidInputError, NumericFailureError
from .fields import Scalar2D, random_bump_one_form
from .modezero import (
    apply_indicial,
    bump,
    fit_decay_rate,
    invert_on_line,
    kernel_elements,
    make_field,
)
from .operators import indicial_family
from .paley import (
    interaction_decay_exponent,
    norm_equivalence_report,
    random_band_limited_family,
    zygmund_norm,
)
from .polymat import indicial_roots
from .residues import index_jump, root_report
from .runio import (
    ManifestWriter,
    build_chart_grid,
    build_line_grid,
    build_operator,
    build_surface,
    load_config,
    load_tensor,
    save_tensor,
    write_csv,
    write_json,
)
from .surface import enumerate_hyperbolic_classes
from .tensorfield import (
    SymTensorField,
    solenoidal_project,
    sym_derivative,
)
from .xray import potential_annihilation_suite, solenoidal_probe, xray_suite

SUBCOMMANDS = (
    "indicial",
    "roots",
    "index-jump",
    "mode0-solve",
    "mode0-kernel",
    "lp-norm",
    "geodesics",
    "xray",
    "decompose",
    "suite",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 64
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(64)


def _tolerances(cfg):
    return cfg.get("tolerances", {})


def _window(cfg):
    tol = _tolerances(cfg)
    return (float(tol.get("window_lo", -10.0)), float(tol.get("window_hi", 10.0)))


# ---------------------------------------------------------------------------
# subcommand bodies (each returns a list of written paths)
# ---------------------------------------------------------------------------


def cmd_indicial(cfg, out, args):
    fam = indicial_family(build_operator(cfg))
    payload = {
        "name": fam.meta.get("name", ""),
        "shape": list(fam.shape),
        "degree": fam.degree,
        "coefficients": [c.real.tolist() for c in fam.coeffs],
        "gram_in": fam.gram_in.tolist(),
        "gram_out": fam.gram_out.tolist(),
    }
    return [write_json(out / "indicial.json", payload)]


def cmd_roots(cfg, out, args):
    fam = indicial_family(build_operator(cfg))
    report = root_report(fam, _window(cfg))
    return [write_json(out / "roots.json", report)]


def cmd_index_jump(cfg, out, args):
    tol = _tolerances(cfg)
    if "weight_from" not in tol or "weight_to" not in tol:
        raise InvalidInputError("index-jump needs weight_from and weight_to")
    fam = indicial_family(build_operator(cfg))
    a, b = float(tol["weight_from"]), float(tol["weight_to"])
    jump = index_jump(fam, a, b)
    crossed = [
        {"lambda": [r.lam.real, r.lam.imag], "multiplicity": r.multiplicity}
        for r in indicial_roots(fam, window=(min(a, b), max(a, b)))
        if min(a, b) < r.lam.real < max(a, b)
    ]
    payload = {"weight_from": a, "weight_to": b, "index_jump": jump, "roots_crossed": crossed}
    return [write_json(out / "index_jump.json", payload)]


def cmd_mode0_solve(cfg, out, args):
    fam = indicial_family(build_operator(cfg))
    if not fam.is_square:
        raise InvalidInputError("mode0-solve needs a square operator")
    r_half, n = build_line_grid(cfg)
    tol = _tolerances(cfg)
    rho = float(tol.get("weight", 0.0))
    ncomp = fam.shape[0]

    def rhs(r):
        b = bump(r / 4.0)
        return np.stack([b * 0.7**k for k in range(ncomp)], axis=1)

    f = make_field(rhs, r_half=r_half, n=n)
    u, info = invert_on_line(fam, f, rho)
    back = apply_indicial(fam, u)
    resid = float(np.max(np.abs(back.samples - f.samples)) / np.max(np.abs(f.samples)))
    report = {
        "weight": rho,
        "roundtrip_residual": resid,
        "condition_max": info["condition_max"],
        "condition_median": info["condition_median"],
        "root_line_distance": info["root_line_distance"],
    }
    try:
        report["rate_right"] = fit_decay_rate(u, side="+")
        report["rate_left"] = fit_decay_rate(u, side="-")
    except InvalidInputError:
        report["rate_right"] = report["rate_left"] = None
    header = ["r"] + [f"c{k}_{p}" for k in range(ncomp) for p in ("re", "im")]
    rows = []
    for i, r in enumerate(u.grid):
        row = [float(r)]
        for k in range(ncomp):
            row += [float(u.samples[i, k].real), float(u.samples[i, k].imag)]
        rows.append(row)
    return [
        write_csv(out / "mode0_solution.csv", header, rows),
        write_json(out / "mode0_report.json", report),
    ]


def cmd_mode0_kernel(cfg, out, args):
    fam = indicial_family(build_operator(cfg))
    tol = _tolerances(cfg)
    if "root" not in tol:
        raise InvalidInputError("mode0-kernel needs a root in [tolerances]")
    lam0 = complex(float(tol["root"]), 0.0)
    els = kernel_elements(fam, lam0)
    rows = []
    for i, el in enumerate(els):
        for j, c in enumerate(el.coefficient_vector):
            rows.append([i, el.lam.real, el.lam.imag, el.k, j, float(c.real), float(c.imag)])
    payload = {
        "root": [lam0.real, lam0.imag],
        "count": len(els),
        "powers": sorted(int(el.k) for el in els),
    }
    return [
        write_csv(
            out / "kernel_elements.csv",
            ["element", "lambda_re", "lambda_im", "power", "component", "re", "im"],
            rows,
        ),
        write_json(out / "kernel_report.json", payload),
    ]


def cmd_lp_norm(cfg, out, args):
    tol = _tolerances(cfg)
    s = float(tol.get("s", 0.5))
    r_half, n = build_line_grid(cfg)
    fam = random_band_limited_family(16, seed=args.seed, r_half=r_half, n=n)
    fld = fam[0]
    value, block_norms = zygmund_norm(fld, s, return_blocks=True)
    exponent, points = interaction_decay_exponent(fld, gap=3)
    from .modezero import ModeZeroField, window_profile
    from .paley import block_decay_exponent

    const = ModeZeroField(fld.r0, fld.dr, window_profile(fld.grid)[:, None])
    _, const_blocks = zygmund_norm(const, 0.0, return_blocks=True)
    report = {
        "s": s,
        "zygmund_norm": value,
        "interaction_exponent": exponent,
        "constant_block_decay_exponent": block_decay_exponent(const_blocks),
        "equivalence": {
            k: v
            for k, v in norm_equivalence_report(fam, s).items()
            if k != "fields"
        },
    }
    rows = [[j, float(b)] for j, b in enumerate(block_norms)]
    return [
        write_csv(out / "lp_blocks.csv", ["j", "sup_norm"], rows),
        write_json(out / "lp_report.json", report),
    ]


def cmd_geodesics(cfg, out, args):
    surface = build_surface(cfg)
    max_len = int(cfg.get("surface", {}).get("max_word_len", 6))
    geos = enumerate_hyperbolic_classes(surface, max_len)
    rows = [
        [
            g.word,
            float(g.matrix.trace),
            float(g.length),
            float(g.axis_endpoints[0]),
            float(g.axis_endpoints[1]),
        ]
        for g in geos
    ]
    return [
        write_csv(
            out / "geodesics.csv",
            ["word", "trace", "length", "axis_repelling", "axis_attracting"],
            rows,
        )
    ]


def _xray_classes(cfg, surface):
    sec = cfg.get("xray", {})
    cap = int(sec.get("class_cap", 50))
    max_len = int(cfg.get("surface", {}).get("max_word_len", 6))
    return enumerate_hyperbolic_classes(surface, max_len)[:cap]


def cmd_xray(cfg, out, args):
    surface = build_surface(cfg)
    grid = build_chart_grid(cfg)
    sec = cfg.get("xray", {})
    mode = sec.get("mode", "metric")
    tol = float(_tolerances(cfg).get("xray", 1e-9))
    classes = _xray_classes(cfg, surface)
    summary = {"mode": mode, "n_classes": len(classes)}
    if mode == "metric":
        tensor = SymTensorField.metric(grid)
        results = xray_suite(surface, tensor, classes, tol=tol)
    elif mode == "tensor-file":
        tensor = load_tensor(Path(sec["tensor_file"]))
        results = xray_suite(surface, tensor, classes, tol=tol, strict=False)
    elif mode == "potential":
        n_forms = int(sec.get("forms", 3))
        forms = [
            random_bump_one_form(
                args.seed + i, center=(-0.916, 0.0), r_width=0.45, t_width=0.14
            )
            for i in range(n_forms)
        ]
        rep = potential_annihilation_suite(
            surface, forms, classes, tol=max(tol, 1e-7), path="grid", grid=grid
        )
        summary["annihilation"] = rep
        dp = sym_derivative(forms[0].sample(grid), method="spectral")
        results = xray_suite(surface, dp, classes, tol=max(tol, 1e-7), strict=False)
    elif mode == "probe":
        phi = Scalar2D.bump(-1.68, -0.0833, 0.15, 0.05)
        f_raw = SymTensorField.sample(
            grid, 2, lambda r, t: 0.0 * r, phi, lambda r, t: 0.0 * r
        )
        f_s, _, info = solenoidal_project(f_raw)
        rep = solenoidal_probe(surface, f_s, classes, tol=max(tol, 1e-6))
        summary["projection"] = info
        summary["probe"] = {
            "flag": rep["flag"],
            "detection_statistic": rep["detection_statistic"],
            "detected_class": rep["detected_class"],
        }
        results = rep["results"]
    else:
        raise InvalidInputError(f"unknown xray mode {mode!r}")
    rows = [
        [r.class_word, float(r.length), float(r.value), float(r.error_estimate)]
        for r in results
    ]
    return [
        write_csv(out / "xray.csv", ["word", "length", "value", "error"], rows),
        write_json(out / "xray_summary.json", summary),
    ]


def cmd_decompose(cfg, out, args):
    grid = build_chart_grid(cfg)
    sec = cfg.get("xray", {})
    if "tensor_file" in sec:
        f = load_tensor(Path(sec["tensor_file"]))
    else:
        mid = 0.5 * (grid.r_min + grid.r_max)
        sf = Scalar2D.bump(mid, 0.4, 0.3 * (grid.r_max - grid.r_min), 0.2)
        f = SymTensorField.sample(
            grid,
            2,
            lambda r, t: sf(r, t),
            lambda r, t: 0.4 * sf(r, t + 0.07),
            lambda r, t: -0.8 * sf(r, t),
        )
    f_s, u, info = solenoidal_project(f)
    paths = []
    for name, field in (("solenoidal_part", f_s), ("potential", u)):
        data, header = save_tensor(out / name, field)
        paths += [data, header]
    paths.append(write_json(out / "decompose_report.json", info))
    return paths


def cmd_suite(cfg, out, args):
    results = run_all(printer=print)
    payload = {
        "all_passed": all(r["passed"] for r in results),
        "results": [
            {"criterion": r["criterion"], "passed": r["passed"]} for r in results
        ],
    }
    path = write_json(out / "suite_results.json", payload)
    if not payload["all_passed"]:
        raise NumericFailureError("acceptance suite reported failures")
    return [path]


_DISPATCH = {
    "indicial": cmd_indicial,
    "roots": cmd_roots,
    "index-jump": cmd_index_jump,
    "mode0-solve": cmd_mode0_solve,
    "mode0-kernel": cmd_mode0_kernel,
    "lp-norm": cmd_lp_norm,
    "geodesics": cmd_geodesics,
    "xray": cmd_xray,
    "decompose": cmd_decompose,
    "suite": cmd_suite,
}


def build_parser():
    parser = _Parser(prog="cusplab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", nargs="?", default=None, help="INI config path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=None)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is not None:
            try:
                import numba

                numba.set_num_threads(max(1, args.threads))
            except ImportError:
                pass
        cfg = load_config(args.config) if args.config else {}
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        manifest = ManifestWriter(args.command, cfg, out, __version__)
        np.random.seed(args.seed)
        for path in _DISPATCH[args.command](cfg, out, args):
            manifest.track(path)
        manifest.finalize()
        return 0
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
