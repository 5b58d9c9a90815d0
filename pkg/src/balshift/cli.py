"""Command-line interface: ``balshift <group> <command> [options]``.

Exit status is 0 on success, 1 when the input is well formed but the
mathematics says no (or a check fails), and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import grid2d, layers, shift1d, spacer1d, spacer2d, words
from .exact import format_slope, parse_slope


class CheckFailed(Exception):
    """A report or experiment ran but its assertion failed."""


# shared parsing


def _csv_list(text: Optional[str]) -> list[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _range(text: str) -> tuple[int, int]:
    a, _, b = text.partition(":")
    return int(a), int(b)


def _rect(text: str) -> grid2d.Rect:
    x0, y0, x1, y1 = (int(v) for v in text.split(","))
    return grid2d.Rect(x0, y0, x1, y1)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sft(args) -> shift1d.Sft1D:
    if getattr(args, "file", None):
        return shift1d.Sft1D.from_text(_read(args.file))
    forbidden = _csv_list(args.forbid)
    alphabet = args.alphabet or "".join(sorted(set("".join(forbidden)) | {"0", "1"}))
    return shift1d.Sft1D(list(alphabet), forbidden)


def parse_sequence(text: str) -> layers.Sequence:
    """``lower:2/5``, ``upper:2/5@1/3``, ``periodic:01@k`` or ``ep:LEFT|CENTER|RIGHT@k``.

    After ``@`` comes the intercept of a characteristic sequence or the
    offset of a periodic one.
    """
    kind, _, body = text.partition(":")
    if kind in ("lower", "upper"):
        slope, _, icpt = body.partition("@")
        return layers.Characteristic(parse_slope(slope), kind, parse_slope(icpt) if icpt else Fraction(0))
    body, _, off = body.partition("@")
    off = int(off) if off else 0
    if kind == "periodic":
        return layers.periodic(body, off)
    if kind == "ep":
        parts = body.split("|")
        if len(parts) != 3:
            raise layers.LayerInputError("ep sequences are LEFT|CENTER|RIGHT")
        return layers.EventuallyPeriodic(parts[0], parts[1], parts[2], off)
    raise layers.LayerInputError(f"unknown sequence kind {kind!r}")


def _free_rows(text: Optional[str]) -> dict[int, int]:
    out = {}
    for item in _csv_list(text):
        j, _, c = item.partition("=")
        out[int(j)] = int(c)
    return out


def _letters_map(text: Optional[str]) -> dict:
    """``i,j=a;i,j=b`` -> {(i, j): letter}."""
    out = {}
    for item in (text or "").split(";"):
        item = item.strip()
        if not item:
            continue
        key, _, a = item.partition("=")
        i, j = (int(v) for v in key.split(","))
        out[(i, j)] = a
    return out


# experiments


@dataclass
class ExperimentSpec:
    name: str
    params: dict = field(default_factory=dict)
    out: Optional[str] = None
    seed: int = 0


def balanced_approximation(m: int, letters: str = "ab") -> shift1d.Sft1D:
    """SFT forbidding the unbalanced words of length at most m (letters a=0, b=1)."""
    lo, hi = letters
    bad = []
    for n in range(2, m + 1):
        for w in words.binary_words(n):
            if not words.is_k_balanced(w, 1) and all(words.is_k_balanced(w[i:j], 1) for i, j in ((0, n - 1), (1, n))):
                bad.append(w.replace("0", lo).replace("1", hi))
    return shift1d.Sft1D([lo, hi], bad)


def _instance(name: str) -> shift1d.Sft1D:
    if name == "golden":
        return shift1d.golden_mean()
    if name == "full":
        return shift1d.full_shift("01")
    if name.startswith("forbid:"):
        fb = _csv_list(name[len("forbid:") :])
        return shift1d.Sft1D(sorted(set("".join(fb)) | {"0", "1"}), fb)
    if name.startswith("spacer-balanced"):
        _, _, m = name.partition(":")
        return spacer1d.spacer_sft(balanced_approximation(int(m) if m else 4))
    raise ValueError(f"unknown instance {name!r}")


def experiment_chain_diameter(spec: ExperimentSpec) -> str:
    p = spec.params
    X = _instance(p.get("instance", "golden"))
    n_min, n_max = p.get("n_min", 1), p.get("n_max", 4)
    max_vertices = p.get("max_vertices", 20000)
    extra = p.get("radius_extra")
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "words", "components", "diameter", "radius", "connected", "truncated"])
    failed = []
    for n in range(n_min, n_max + 1):
        if len(X.vertices) > max_vertices:
            wr.writerow([n, "", "", "", "", "", "state space too large"])
            break
        N = shift1d.default_radius(X, n) if extra is None else n + 2 * X.type_t + int(extra)
        cg = shift1d.chain_graph(X, n, N)
        d = cg.diameter()
        wr.writerow([n, len(cg.nodes), len(cg.components()), "" if d is None else d, N, int(cg.connected), ""])
        if not cg.connected:
            failed.append(n)
    text = buf.getvalue()
    if spec.out:
        _emit(text, spec.out)
    if p.get("assert_connected") and failed:
        raise CheckFailed(f"chain graph disconnected at n={failed}")
    return text


def experiment_slope_map(spec: ExperimentSpec) -> str:
    p = spec.params
    slopes = p.get("slopes") or [Fraction(k, 10) for k in range(11)]
    lengths = p.get("lengths") or list(range(10, 101, 10))
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["slope", "length", "window", "lo", "hi", "width", "contains"])
    problems = []
    for alpha in slopes:
        prev = None
        for L in lengths:
            w = words.lower_char_window(alpha, 0, L - 1).letters
            iv = layers.slope_window_estimate(w)
            inside = iv.contains(alpha)
            wr.writerow([format_slope(alpha), L, w, format_slope(iv.lo), format_slope(iv.hi), format_slope(iv.width), int(inside)])
            if not inside:
                problems.append(f"{format_slope(alpha)} outside its interval at L={L}")
            if prev is not None and iv.width > prev:
                problems.append(f"width grew at slope {format_slope(alpha)}, L={L}")
            prev = iv.width
    text = buf.getvalue()
    if spec.out:
        _emit(text, spec.out)
    if problems:
        raise CheckFailed("; ".join(problems))
    return text


# command handlers


def cmd_words_char(a):
    lo, hi = _range(a.range)
    fn = words.upper_char_window if a.upper else words.lower_char_window
    icpt = parse_slope(a.intercept) if a.intercept else 0
    print(fn(parse_slope(a.alpha), lo, hi, icpt).letters)


def cmd_words_check(a):
    if a.other is not None:
        ok = words.is_jointly_balanced(a.word, a.other)
        print(f"jointly balanced: {ok}")
    else:
        ok = words.is_k_balanced(a.word, a.k)
        print(f"{a.k}-balanced: {ok} (defect {words.balance_defect(a.word)})")
    return 0 if ok else 1


def cmd_words_interval(a):
    iv = words.slope_interval(a.word) if a.other is None else words.joint_slope_interval(a.word, a.other)
    if iv is None:
        print("empty")
        return 1
    print(iv)


def cmd_sft1d_language(a):
    X = _sft(a)
    for w in sorted(X.language(a.n)):
        print(w)


def cmd_sft1d_entropy(a):
    print(f"{_sft(a).entropy():.9f}")


def cmd_sft1d_report(a):
    X = _sft(a)
    rep = shift1d.ztcpe_report(X, a.nmax, N=a.radius)
    print(rep.render())
    return 0 if rep.passed else 1


def cmd_spacer1d_transform(a):
    gaps = [int(g) for g in _csv_list(a.gaps)] if a.gaps else [3] * max(len(a.word) - 1, 0)
    print(spacer1d.induce_word(a.word, gaps))


def cmd_spacer1d_flist(a):
    F = spacer1d.f_forbidden_list(a.alphabet, _csv_list(a.forbid))
    for w in sorted(F, key=lambda s: (len(s), s)):
        print(w)


def _rules(name: str) -> grid2d.Sft2D:
    if name == "xh":
        return grid2d.xh_rules()
    if name == "xv":
        return grid2d.xv_rules()
    if name == "layers":
        return layers.x_rules()
    raise ValueError(f"unknown rule set {name!r}")


def cmd_grid2d_validate(a):
    p = grid2d.Pattern2D.from_text(_read(a.pattern))
    X = _rules(a.rules)
    bad = X.violations(p)
    if bad:
        for at, _ in bad[:10]:
            print(f"violation at offset {at}")
        print("INVALID")
        return 1
    print("VALID")


def cmd_grid2d_fill(a):
    X = _rules(a.rules)
    partial = grid2d.Pattern2D.from_text(_read(a.pattern)) if a.pattern else grid2d.Pattern2D()
    if a.rules == "layers":
        raise ValueError("layer windows are filled with 'layers build'")
    got = grid2d.fill_rectangle(X, partial, _rect(a.rect))
    if got is None:
        print("no completion")
        return 1
    _emit(got.to_text(), a.out)


def cmd_grid2d_embed(a):
    p = grid2d.Pattern2D.from_text(_read(a.pattern))
    _emit(grid2d.embed_homoclinic_xh(p, margin=a.margin).to_text(), a.out)


def cmd_layers_build(a):
    pair = layers.SequencePair(parse_sequence(a.a), parse_sequence(a.b))
    w = layers.build_point_window(pair, _rect(a.window), _free_rows(a.free))
    _emit(w.to_text(), a.out)
    if w.locally_free_rows:
        print(f"rows free only locally: {sorted(w.locally_free_rows)}", file=sys.stderr)


def cmd_layers_classify(a):
    pair = layers.SequencePair(parse_sequence(a.a), parse_sequence(a.b))
    res = layers.classify_pair(pair)
    print(f"slope {format_slope(res.slope)} tags {sorted(res.tags)}")
    return 0 if res.tags else 1


def cmd_spacer2d_superimpose(a):
    xh = grid2d.Pattern2D.from_text(_read(a.xh))
    xv = grid2d.Pattern2D.from_text(_read(a.xv))
    _emit(spacer2d.to_text(spacer2d.superimpose(xh, xv, _letters_map(a.letters))), a.out)


def cmd_spacer2d_move(a):
    w = spacer2d.from_text(_read(a.window))
    sign = 1 if a.sign in ("+1", "1", "+") else -1
    _emit(spacer2d.to_text(spacer2d.meander_move(w, a.axis, sign, _rect(a.region))), a.out)


def cmd_experiment_chain(a):
    params = {
        "instance": a.instance,
        "n_min": a.n_min,
        "n_max": a.n_max,
        "assert_connected": a.assert_connected,
        "radius_extra": a.radius_extra,
    }
    text = experiment_chain_diameter(ExperimentSpec("chain-diameter", params, a.out, a.seed))
    if not a.out:
        sys.stdout.write(text)


def cmd_experiment_slope(a):
    params = {
        "slopes": [parse_slope(s) for s in _csv_list(a.slopes)],
        "lengths": [int(v) for v in _csv_list(a.lengths)],
    }
    text = experiment_slope_map(ExperimentSpec("slope-map", params, a.out, a.seed))
    if not a.out:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="balshift", description="Balanced shifts, spacers and ribbon tilings.")
    groups = ap.add_subparsers(dest="group", required=True)

    def group(name, help):
        g = groups.add_parser(name, help=help)
        return g.add_subparsers(dest="command", required=True)

    def sft_opts(p):
        p.add_argument("--forbid", default="", help="comma-separated forbidden words")
        p.add_argument("--alphabet", help="letters, default 01 plus any in the forbidden words")
        p.add_argument("--file", help="read the SFT from a text file instead")

    g = group("words", "balanced words and characteristic sequences")
    p = g.add_parser("char")
    p.add_argument("--alpha", required=True)
    p.add_argument("--range", required=True, help="inclusive START:STOP")
    p.add_argument("--upper", action="store_true")
    p.add_argument("--intercept")
    p.set_defaults(fn=cmd_words_char)
    p = g.add_parser("check")
    p.add_argument("word")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--other", help="check joint balance against this word")
    p.set_defaults(fn=cmd_words_check)
    p = g.add_parser("interval")
    p.add_argument("word")
    p.add_argument("--other")
    p.set_defaults(fn=cmd_words_interval)

    g = group("sft1d", "one-dimensional shifts of finite type")
    p = g.add_parser("language")
    sft_opts(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=cmd_sft1d_language)
    p = g.add_parser("entropy")
    sft_opts(p)
    p.set_defaults(fn=cmd_sft1d_entropy)
    p = g.add_parser("report")
    sft_opts(p)
    p.add_argument("--nmax", type=int, default=3)
    p.add_argument("--radius", type=int)
    p.set_defaults(fn=cmd_sft1d_report)

    g = group("spacer1d", "the one-dimensional spacer transform")
    p = g.add_parser("transform")
    p.add_argument("word")
    p.add_argument("--gaps", help="comma-separated gaps in {2,3,4}, default all 3")
    p.set_defaults(fn=cmd_spacer1d_transform)
    p = g.add_parser("flist")
    p.add_argument("--alphabet", required=True)
    p.add_argument("--forbid", default="")
    p.set_defaults(fn=cmd_spacer1d_flist)

    g = group("grid2d", "two-dimensional patterns and ribbon shifts")
    p = g.add_parser("validate")
    p.add_argument("pattern")
    p.add_argument("--rules", default="xh", choices=["xh", "xv", "layers"])
    p.set_defaults(fn=cmd_grid2d_validate)
    p = g.add_parser("fill")
    p.add_argument("--rules", default="xh", choices=["xh", "xv"])
    p.add_argument("--rect", required=True, help="x0,y0,x1,y1")
    p.add_argument("--pattern", help="partial pattern to complete")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_grid2d_fill)
    p = g.add_parser("embed")
    p.add_argument("pattern")
    p.add_argument("--margin", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_grid2d_embed)

    g = group("layers", "the three-layer balanced SFT")
    p = g.add_parser("build")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--window", required=True, help="x0,y0,x1,y1")
    p.add_argument("--free", help="free row values, e.g. 0=1,5=0")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_layers_build)
    p = g.add_parser("classify")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(fn=cmd_layers_classify)

    g = group("spacer2d", "the two-dimensional spacer transform")
    p = g.add_parser("superimpose")
    p.add_argument("--xh", required=True)
    p.add_argument("--xv", required=True)
    p.add_argument("--letters", help="i,j=a;i,j=b keyed by ribbon pair")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_spacer2d_superimpose)
    p = g.add_parser("move")
    p.add_argument("window")
    p.add_argument("--axis", required=True, choices=["horizontal", "vertical"])
    p.add_argument("--sign", required=True, choices=["+1", "-1", "1", "+", "-"])
    p.add_argument("--region", required=True, help="x0,y0,x1,y1")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_spacer2d_move)

    g = group("experiment", "exchange-diameter and slope-map experiments")
    p = g.add_parser("chain-diameter")
    p.add_argument("--instance", default="golden", help="golden, full, forbid:W1,W2 or spacer-balanced[:m]")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--radius-extra", type=int, help="use N = n + 2t + EXTRA")
    p.add_argument("--assert-connected", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_experiment_chain)
    p = g.add_parser("slope-map")
    p.add_argument("--slopes", help="comma-separated slopes, default k/10")
    p.add_argument("--lengths", help="comma-separated window lengths, default 10..100")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_experiment_slope)
    return ap


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        rc = args.fn(args)
    except CheckFailed as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, LookupError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return rc or 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
