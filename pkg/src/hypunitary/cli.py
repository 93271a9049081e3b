"""
Command-line driver.

    hypunitary <suite> --ring spec.txt --n 3 --seed 7 [--samples K] [--cap C]
               [--mode exact|necessary] [--out report.json] [--timing]

Exit status: 0 when every check passes, 1 on any failure, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys

from .formring import (
    AdditiveSubgroup,
    FormRing,
    RingError,
    build_product_swap,
    build_quadratic,
    build_zmod,
    make_form_ring,
)
from .suites import SUITES, SuiteConfig, run_suite

log = logging.getLogger(__name__)


class SpecError(ValueError):
    """Ring-spec parse or validation failure, with a position when known."""

    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.column = column


_BUILDERS = {"zmod": (build_zmod, 1), "quad": (build_quadratic, 3), "prodswap": (build_product_swap, 1)}


def parse_ring_spec(text: str) -> FormRing:
    """
    Parse ``ring zmod 4`` / ``ring quad 3 0 1`` / ``ring prodswap 2``,
    ``lambda <index>`` and ``Lambda {i,j,...}`` / ``Lambda max`` / ``Lambda min``.
    Blank lines and ``#`` comments are ignored; lambda defaults to 1, Lambda to min.
    """
    ring = None
    lam, lam_pos = None, None
    Lam, Lam_pos = "min", None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        words = line.split()
        key = words[0]
        if key == "ring":
            if len(words) < 2 or words[1] not in _BUILDERS:
                raise SpecError(f"expected one of {sorted(_BUILDERS)} after 'ring'", ln,
                                col + len("ring ") if len(words) > 1 else col)
            build, arity = _BUILDERS[words[1]]
            args = words[2:]
            if len(args) != arity or not all(re.fullmatch(r"-?\d+", a) for a in args):
                raise SpecError(f"'ring {words[1]}' takes {arity} integer argument(s)", ln,
                                line.index(words[1]) + len(words[1]) + 2)
            try:
                ring = build(*(int(a) for a in args))
            except RingError as exc:
                raise SpecError(f"ring construction failed: {exc}", ln, col) from exc
        elif key == "lambda":
            if len(words) != 2 or not words[1].isdigit():
                raise SpecError("'lambda' takes one element index", ln, col)
            lam, lam_pos = int(words[1]), (ln, line.index(words[1]) + 1)
        elif key == "Lambda":
            rest = line.strip()[len("Lambda"):].strip()
            Lam_pos = (ln, line.index("Lambda") + 8)
            if rest in ("max", "min"):
                Lam = rest
            else:
                m = re.fullmatch(r"\{\s*(\d+(\s*,\s*\d+)*)?\s*\}", rest)
                if not m:
                    raise SpecError("expected 'Lambda {i,j,...}', 'Lambda max' or 'Lambda min'", *Lam_pos)
                Lam = [int(v) for v in re.findall(r"\d+", rest)]
        else:
            raise SpecError(f"unknown declaration {key!r}", ln, col)
    if ring is None:
        raise SpecError("missing 'ring' declaration")
    lam = ring.one if lam is None else lam
    if lam >= ring.order:
        raise SpecError(f"lambda index {lam} out of range for {ring.name}", *(lam_pos or (None, None)))
    if isinstance(Lam, list):
        if any(v >= ring.order for v in Lam):
            raise SpecError(f"Lambda element out of range for {ring.name}", *(Lam_pos or (None, None)))
        Lam = AdditiveSubgroup(Lam)
    try:
        return make_form_ring(ring, lam, Lam)
    except RingError as exc:
        raise SpecError(f"validation failed: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypunitary",
                                description="Verification suites for hyperbolic unitary groups over finite form rings.")
    p.add_argument("suite", help="one of: " + ", ".join(SUITES))
    p.add_argument("--ring", required=True, help="ring spec file ('-' for stdin)")
    p.add_argument("--n", type=int, default=3, help="rank n (matrices are 2n x 2n), at least 3")
    p.add_argument("--seed", type=int, required=True, help="64-bit seed for sampled checks")
    p.add_argument("--samples", type=int, default=None, help="sample count (suite default if omitted)")
    p.add_argument("--cap", type=int, default=5_000_000, help="element cap for closures and enumeration")
    p.add_argument("--mode", choices=("exact", "necessary"), default="exact",
                   help="'necessary' tests CU membership against elementary generators only")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--timing", action="store_true", help="record per-check milliseconds")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}", file=sys.stderr)
        return 2
    if not 0 <= args.seed < 2**64:
        print("seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        text = sys.stdin.read() if args.ring == "-" else open(args.ring, encoding="utf-8").read()
    except OSError as exc:
        print(f"cannot read ring spec: {exc}", file=sys.stderr)
        return 2
    try:
        fr = parse_ring_spec(text)
        cfg = SuiteConfig(args.suite, fr, text.strip(), args.n, args.seed, args.samples,
                          args.cap, args.mode, args.timing)
    except (SpecError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    report = run_suite(cfg)
    payload = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    s = report["summary"]
    print(f"{args.suite}: {s['pass']} pass, {s['fail']} fail, {s['skip']} skipped", file=sys.stderr)
    return 1 if s["fail"] else 0


if __name__ == "__main__":
    sys.exit(main())
