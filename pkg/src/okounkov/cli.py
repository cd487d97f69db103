"""Command line: okounkov {body,invariants,limits,verify}.

Exit codes: 0 success, 1 configuration error (nothing written),
2 truncation insufficient, 3 acceptance failure.
"""

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .bodies import (
    AffineSequence,
    ConstantSequence,
    EventuallyConstantSequence,
    hull,
    okounkov_body,
    sequence_limits,
    slice_body,
    volume,
)
from .errors import (
    ConfigError,
    OkounkovError,
    TruncationInsufficientError,
    WallError,
)
from .filtration import _pmap, invariant_report
from .models import NodalCubicModel, NodalGammaEngine, ToricSurfaceModel, predicted_body
from .wfield import (
    WeightScalar,
    format_number,
    number_to_json,
    set_precision_cap,
    simplify,
)

EXIT_OK, EXIT_CONFIG, EXIT_TRUNC, EXIT_FAIL = 0, 1, 2, 3

_SURD = re.compile(r"^\s*(?:(?P<a>[-+]?\d+(?:/\d+)?)\s*(?P<sign>[-+])\s*)?"
                   r"(?:(?P<c>\d+(?:/\d+)?)\s*\*\s*)?sqrt\((?P<D>\d+)\)\s*$")


def parse_number(x):
    """int, 'p/q', 'sqrt(D)', 'c*sqrt(D)', 'a + c*sqrt(D)' or {"a":..,"b":..,"D":..}."""
    if isinstance(x, bool):
        raise ConfigError(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise ConfigError("floats are not exact; write numbers as 'p/q'")
    if isinstance(x, dict):
        try:
            a, b, D = Fraction(str(x.get("a", 0))), Fraction(str(x["b"])), int(x["D"])
        except (KeyError, ValueError) as e:
            raise ConfigError(f"bad surd {x!r}") from e
        return simplify(WeightScalar.sqrt(D, b) + a)
    if isinstance(x, str):
        mt = _SURD.match(x)
        if mt:
            c = Fraction(mt.group("c") or 1)
            if mt.group("sign") == "-":
                c = -c
            val = WeightScalar.sqrt(int(mt.group("D")), c)
            if mt.group("a"):
                val = val + Fraction(mt.group("a"))
            return simplify(val)
        try:
            return Fraction(x.strip())
        except ValueError:
            pass
    raise ConfigError(f"cannot parse number {x!r}")


def load_config(path):
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {path} not found")
    text = p.read_text()
    if p.suffix.lower() == ".toml":
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"TOML error: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON error: {e}") from e


def build_model(cfg):
    sec = cfg.get("model")
    if not isinstance(sec, dict):
        raise ConfigError("config needs a [model] section")
    kind = sec.get("type")
    if kind == "toric":
        verts = sec.get("vertices")
        if not verts:
            raise ConfigError("toric model needs vertices")
        return ToricSurfaceModel([tuple(parse_number(x) for x in v) for v in verts],
                                 name=sec.get("name"))
    if kind == "nodal":
        cubic = sec.get("cubic")
        if cubic is not None:
            cubic = {tuple(int(t) for t in k.split(",")): parse_number(c) for k, c in cubic.items()}
        return NodalCubicModel(cubic)
    raise ConfigError(f"unknown model type {kind!r}")


def build_valuation(model, cfg, tiebreak=None):
    sec = cfg.get("valuation")
    if not isinstance(sec, dict) or "weights" not in sec:
        raise ConfigError("config needs a [valuation] section with weights")
    alpha = [parse_number(w) for w in sec["weights"]]
    if any(a <= 0 for a in alpha):
        raise ConfigError("weights must be positive")
    tb = tiebreak or sec.get("tiebreak", "strict")
    if tb not in ("strict", "lex"):
        raise ConfigError("tiebreak must be strict or lex")
    if isinstance(model, ToricSurfaceModel):
        chart = sec.get("chart", 0)
        if isinstance(chart, list):
            chart = tuple(tuple(int(x) for x in r) for r in chart)
        return model.valuation(chart, alpha, tb)
    return model.valuation(alpha, tb)


def _num_json(x):
    return number_to_json(x)


def body_json(body):
    return {
        "dim": body.dim,
        "vertices": [[_num_json(x) for x in v] for v in body.vertices],
        "vertices_text": [[format_number(simplify(x)) for x in v] for v in body.vertices],
        "volume": _num_json(volume(body)) if not body.is_empty() and body.affine_dim == body.dim else [0, 1],
        "level_cap": body.level_cap,
    }


def _fmt12(x):
    return f"{float(x):.12g}"


def body_svg(bodies, size=400, pad=20):
    """Plain SVG of 2-D polygons; coordinates are display-only (12 digits)."""
    pts = [tuple(float(x) for x in v) for b, _, _ in bodies for v in b.vertices]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    sc = (size - 2 * pad) / span

    def tx(v):
        return (_fmt12(pad + (float(v[0]) - min(xs)) * sc),
                _fmt12(size - pad - (float(v[1]) - min(ys)) * sc))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           "<!-- coordinates are display-only; exact values live in the JSON output -->"]
    for b, color, dash in bodies:
        if b.is_empty():
            continue
        poly = " ".join(",".join(tx(v)) for v in b.vertices)
        extra = ' stroke-dasharray="6,4"' if dash else ""
        out.append(f'<polygon points="{poly}" fill="none" stroke="{color}" stroke-width="2"{extra}/>')
        for v in b.vertices:
            x, y = tx(v)
            label = ",".join(_fmt12(c) for c in v)
            out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"><title>{label}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(out_dir, files):
    """Write all artifacts at the end so failures leave nothing behind."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _caps(args, cfg):
    cap = args.level_cap or cfg.get("level_cap")
    m_max = args.m_max or cfg.get("m_max")
    for name, v in (("level_cap", cap), ("m_max", m_max)):
        if v is not None and (not isinstance(v, int) or v <= 0):
            raise ConfigError(f"{name} must be a positive integer")
    return cap, m_max


def cmd_body(args, cfg):
    model = build_model(cfg)
    nu = build_valuation(model, cfg, args.tiebreak)
    cap, _ = _caps(args, cfg)
    cap = cap or 1
    gam = {m: model.gamma(nu, m) for m in range(1, cap + 1)}
    r = nu.qm.r
    body = okounkov_body(gam, cap)
    res = {"model": type(model).__name__, "weights": [format_number(simplify(a)) for a in nu.alpha.values()],
           "body": body_json(body)}
    layers = [(body, "#1f4e9a", False)]
    if isinstance(model, NodalCubicModel):
        try:
            pred = predicted_body(nu.alpha)
            res["predicted"] = body_json(pred)
            res["equals_predicted"] = body == pred
            res["contained_in_predicted"] = pred.contains(body)
            layers.append((pred, "#c0392b", True))
        except WallError as e:
            res["predicted"] = None
            res["predicted_error"] = str(e)
    slices = cfg.get("slices", [])
    if slices:
        res["slices"] = {}
        for t in slices:
            tq = parse_number(t)
            S = slice_body(body, nu.alpha.values()[:r], tq)
            res["slices"][format_number(tq)] = body_json(S)
    files = {"body.json": _dumps(res)}
    if body.dim == 2:
        files["body.svg"] = body_svg(layers)
    return files, res


def _parse_taus(args, cfg):
    raw = args.tau.split(",") if args.tau else cfg.get("tau", ["0", "1"])
    taus = [parse_number(t) for t in raw]
    if any(not isinstance(t, Fraction) or not 0 <= t <= 1 for t in taus):
        raise ConfigError("tau values must be rationals in [0, 1]")
    return taus


def cmd_invariants(args, cfg):
    model = build_model(cfg)
    nu = build_valuation(model, cfg, args.tiebreak)
    _, m_max = _caps(args, cfg)
    taus = _parse_taus(args, cfg)
    rep = invariant_report(model, nu, taus, m_max=m_max or 10,
                           csv_tau=taus[-1] if taus[-1] > 0 else 1)
    return {"report.json": rep.dumps() + "\n",
            "convergence.csv": rep.to_csv(taus[-1] if taus[-1] > 0 else 1)}, rep.to_json()


def _points(sec):
    return [tuple(parse_number(x) for x in p) for p in sec]


def cmd_limits(args, cfg):
    if "chamber_sweep" in cfg:
        sw = cfg["chamber_sweep"]
        ratios = [parse_number(r) for r in sw.get("ratios", [])]
        if len(ratios) < 2:
            raise ConfigError("chamber_sweep needs at least two ratios")
        m_max = int(sw.get("m_max", args.m_max or 5))
        model = NodalCubicModel()
        tb = args.tiebreak or sw.get("tiebreak", "lex")

        def levels(q):
            eng = NodalGammaEngine(model, model.valuation((q, 1), tb), m_max)
            return [eng.gamma_exact(m) for m in range(1, m_max + 1)]
        gammas = {format_number(q): g for q, g in zip(ratios, _pmap(levels, ratios))}
        keys = list(gammas)
        matrix = {a: {b: gammas[a] == gammas[b] for b in keys} for a in keys}
        res = {"mode": "chamber_sweep", "m_max": m_max, "equal": matrix,
               "all_identical": all(all(r.values()) for r in matrix.values())}
        return {"limits.json": _dumps(res)}, res
    sec = cfg.get("sequence")
    if not isinstance(sec, dict):
        raise ConfigError("config needs a [sequence] or [chamber_sweep] section")
    kind = sec.get("type")
    if kind == "affine":
        seq = AffineSequence(_points(sec["base"]), _points(sec["slope"]))
    elif kind == "constant":
        pts = _points(sec["vertices"])
        seq = ConstantSequence(hull(pts, len(pts[0])))
    elif kind == "eventually_constant":
        head = [hull(_points(h), len(h[0])) for h in sec.get("head", [])]
        tail = _points(sec["tail"])
        seq = EventuallyConstantSequence(head, hull(tail, len(tail[0])))
    else:
        raise ConfigError(f"unsupported sequence presentation {kind!r}")
    lim = sequence_limits(seq)
    res = {"pointwise": body_json(lim["pointwise"]) if not lim["pointwise"].is_empty() else None,
           "cofinite": body_json(lim["cofinite"]) if not lim["cofinite"].is_empty() else None,
           "cofinite_empty": lim["cofinite"].is_empty(),
           "volumes_equal": lim["equal_volume"], "exact": lim["exact"]}
    return {"limits.json": _dumps(res)}, res


def cmd_verify(args, cfg):
    from .acceptance import CHECKS, run_check
    names = [c.strip() for c in args.criteria.split(",")] if args.criteria else list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown criteria {unknown}")
    results = []
    for n in names:
        r = run_check(n, seed=args.seed)
        print(r.line(), flush=True)
        results.append(r)
    res = {"results": [{"criterion": r.name, "passed": r.passed, "detail": r.detail,
                        "report_only": r.report_only} for r in results],
           "all_passed": all(r.passed for r in results)}
    return {"verify.json": _dumps(res)}, res


COMMANDS = {"body": cmd_body, "invariants": cmd_invariants, "limits": cmd_limits,
            "verify": cmd_verify}


def make_parser():
    ap = argparse.ArgumentParser(prog="okounkov", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON or TOML model/valuation config")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--m-max", type=int)
    ap.add_argument("--level-cap", type=int)
    ap.add_argument("--tau", help="comma separated list, e.g. 0,1/4,1")
    ap.add_argument("--tiebreak", choices=["strict", "lex"])
    ap.add_argument("--precision-cap", type=int)
    ap.add_argument("--criteria", help="subset for verify, e.g. A1,A5")
    ap.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        if args.precision_cap is not None:
            if args.precision_cap <= 0:
                raise ConfigError("precision cap must be positive")
            set_precision_cap(args.precision_cap)
        cfg = load_config(args.config) if args.config else {}
        if args.command != "verify" and not args.config:
            raise ConfigError("--config is required")
        files, res = COMMANDS[args.command](args, cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationInsufficientError as e:
        print(f"models: truncation insufficient: {e}", file=sys.stderr)
        return EXIT_TRUNC
    except (OkounkovError, ValueError, KeyError, TypeError) as e:
        mod = type(e).__module__.split(".")[-1]
        print(f"{mod}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        _write(args.out, files)
    elif args.command != "verify":
        sys.stdout.write(next(iter(files.values())))
    if args.command == "verify" and not res["all_passed"]:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
