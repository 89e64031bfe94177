"""relk {kgroups|relative|sixterm|boundary|verify|fixtures}

PROBLEM is a path to a problem file or the name of a bundled fixture
(RELK_FIXTURE_DIR points somewhere else).
"""

import argparse
import json
import sys

from . import handlers
from .errors import RelkError
from .problem import dumps, open_problem


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS, help="base tolerance (default 1e-9)")
    common.add_argument("--grid", type=int, default=argparse.SUPPRESS, help="samples per path axis (default 257)")
    common.add_argument("--output", choices=("text", "machine"), default=argparse.SUPPRESS)
    ap = argparse.ArgumentParser(prog="relk", parents=[common],
                                 description="Relative K-theory of *-homomorphisms, by computation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kgroups", parents=[common], help="K0 and K1 of an algebra")
    p.add_argument("problem")
    p.add_argument("--alg")
    p = sub.add_parser("relative", parents=[common], help="relative groups of a homomorphism")
    p.add_argument("problem")
    p.add_argument("--hom")
    p = sub.add_parser("sixterm", parents=[common], help="six-term sequence of a ladder")
    p.add_argument("problem")
    p.add_argument("--ladder")
    p = sub.add_parser("boundary", parents=[common], help="index or exponential map on a triple")
    p.add_argument("problem")
    p.add_argument("--ladder")
    p.add_argument("--map", choices=("index", "exp"), default="index")
    p.add_argument("--triple")
    p = sub.add_parser("verify", parents=[common], help="check a triple and optionally a certificate")
    p.add_argument("problem")
    p.add_argument("--triple")
    p.add_argument("--certificate")
    p = sub.add_parser("fixtures", parents=[common], help="list the worked examples")
    p.add_argument("--name")
    p.add_argument("--write", metavar="DIR", help="write the fixture problem files into DIR")
    return ap


def run(argv=None):
    args = _parser().parse_args(argv)
    # the shared options may appear before or after the subcommand
    for name, default in (("tolerance", None), ("grid", None), ("output", "text")):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        if args.command == "fixtures":
            out = handlers.fixtures(args.write, args.name)
        else:
            prob = open_problem(args.problem)
            settings = prob.doc.setdefault("settings", {})
            if args.tolerance is not None:
                settings["tolerance"] = args.tolerance
            if args.grid is not None:
                settings["grid"] = args.grid
            if args.command == "kgroups":
                out = handlers.kgroups(prob, args.alg)
            elif args.command == "relative":
                out = handlers.relative(prob, args.hom)
            elif args.command == "sixterm":
                out = handlers.sixterm(prob, args.ladder)
            elif args.command == "boundary":
                out = handlers.boundary(prob, args.ladder, args.map, args.triple)
            else:
                out = handlers.verify(prob, args.triple, args.certificate)
    except RelkError as exc:
        out = handlers.failure(args.command, exc)
    return out, args.output


def main(argv=None):
    out, mode = run(argv)
    if mode == "machine":
        sys.stdout.write(dumps(json.loads(json.dumps(out.machine(), default=_plain))) + "\n")
    else:
        stream = sys.stdout if out.exit_code in (0, 1) else sys.stderr
        for line in out.text:
            print(line, file=stream)
    return out.exit_code


def _plain(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    raise TypeError(repr(x))


if __name__ == "__main__":
    sys.exit(main())
