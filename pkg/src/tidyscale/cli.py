"""Command-line interface: ``tidyscale {scale,tidy,member,tree,suite}``.

Rationals are written ``num/den``, matrices as ``a,b;c,d`` grids, finite
groups by name (``S3``, ``A4``, ``C4``, ``D4``) or as a table file.  Errors go
to stderr as a single line ``error[<code>]: <message>`` with a nonzero exit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import arith, core, coset_tree, suite, tree
from .errors import TidyScaleError, ValidationError
from .finite_groups import group_by_name, named_subgroup, parse_table
from .matrix import MatrixFamily, make_element, matrix_scale, membership_general, parse_grid
from .shift import ShiftFamily

EXIT_FAIL = 1
EXIT_ERROR = 2


class UsageError(TidyScaleError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# family construction


def _group(args):
    if args.F_table:
        return parse_table(Path(args.F_table).read_text(), Path(args.F_table).stem)
    return group_by_name(args.F)


def _shift(args) -> ShiftFamily:
    F = _group(args)
    return ShiftFamily(F, named_subgroup(F, args.O), args.n)


def _grid(text: str):
    """Grid ``a,b;c,d`` or a JSON array of rational strings."""
    if text.lstrip().startswith("["):
        rows = json.loads(text)
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ValidationError("matrix JSON must be a list of rows")
        return arith.as_matrix([[str(c) for c in r] for r in rows])
    return parse_grid(text)


def _matrix_element(args):
    if args.p is None:
        raise ValidationError("--p is required for the matrix family")
    if args.diag and args.matrix:
        raise ValidationError("give either --diag or --matrix, not both")
    if args.diag:
        entries = arith.diagonal([x.strip() for x in args.diag.split(",")])
    elif args.matrix:
        entries = _grid(args.matrix)
    else:
        raise ValidationError("the matrix family needs --diag or --matrix")
    conj = _grid(args.conjugator) if args.conjugator else None
    return make_element(entries, args.p, conj)


def _tree_element(args) -> tree.TreeElement:
    if args.element:
        return _tree_from_json(json.loads(Path(args.element).read_text()) if Path(args.element).exists() else json.loads(args.element))
    return tree.translation(args.q, args.l)


def _tree_from_json(obj) -> tree.TreeElement:
    try:
        deco = {(int(d["vertex"][0]), tuple(int(c) for c in d["vertex"][1])): tuple(d["perm"]) for d in obj.get("decoration", [])}
        return tree.TreeElement.make(int(obj["q"]), int(obj.get("translation", 0)), deco)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed tree element: {exc}") from None


def _family(args):
    if args.family == "shift":
        return _shift(args)
    if args.family == "matrix":
        return MatrixFamily(_matrix_element(args))
    return tree.TreeFamily(_tree_element(args))


def _add_family_args(p: argparse.ArgumentParser, families=("matrix", "shift", "tree")):
    p.add_argument("--family", choices=families, required=True)
    g = p.add_argument_group("matrix family")
    g.add_argument("--p", type=int, help="prime")
    g.add_argument("--diag", help="diagonal entries, e.g. 5,1/5")
    g.add_argument("--matrix", help="matrix grid, e.g. 1,1;0,1")
    g.add_argument("--conjugator", help="C with C^-1 g C diagonal (grid)")
    g = p.add_argument_group("shift family")
    g.add_argument("--F", default="S3", help="finite group name (default S3)")
    g.add_argument("--F-table", dest="F_table", help="multiplication table file instead of --F")
    g.add_argument("--O", default="A3", help="subgroup O of F (default A3)")
    g.add_argument("--n", type=int, default=1, help="alpha = shift^n (default 1)")
    g = p.add_argument_group("tree family")
    g.add_argument("--q", type=int, default=2, help="tree of degree q+1 (default 2)")
    g.add_argument("--l", type=int, default=1, help="translation length of g (default 1)")
    g.add_argument("--element", help="tree element as JSON text or file")


# --------------------------------------------------------------------------
# subcommands


def cmd_scale(args, out):
    fam = None
    if args.family == "matrix":
        g = _matrix_element(args)
        res = matrix_scale(g)
        if g.has_diagonal_form:
            fam = MatrixFamily(g)
    else:
        fam = _family(args)
        res = core.scale(fam, cap=args.cap)
    checks = list(res.cross_checks)
    if fam is not None and args.family == "matrix":
        generic = core.scale(fam, cap=args.cap)
        checks += [(generic.method, generic.value)] + list(generic.cross_checks)
        if any(v != res.value for _, v in checks):
            raise core.ConsistencyError(f"scale methods disagree: {checks}")
    seen = {res.method: res.value}
    for m, v in checks:
        seen.setdefault(m, v)
    res = core.ScaleResult(res.value, res.method, tuple((m, v) for m, v in seen.items() if m is not res.method))
    if args.inverse:
        inv = matrix_scale(_matrix_element(args).inverse()) if args.family == "matrix" else core.scale_inverse(fam, cap=args.cap)
    if args.json:
        obj = {"scale": res.to_json()}
        if args.inverse:
            obj["scale_inverse"] = inv.to_json()
        out.write(_dump(obj))
        return 0
    out.write(f"{res.value}\n")
    out.write(f"  {res.method.value}: {res.value}\n")
    for m, v in res.cross_checks:
        out.write(f"  {m.value}: {v}\n")
    if args.inverse:
        out.write(f"inverse: {inv.value}\n")
    return 0


def _parse_constraints(fam: ShiftFamily, items) -> dict:
    cons = {}
    for item in items or []:
        if ":" not in item:
            raise ValidationError(f"constraint {item!r} must look like <coordinate>:<subgroup>")
        i, spec = item.split(":", 1)
        try:
            i = int(i)
        except ValueError:
            raise ValidationError(f"bad coordinate in constraint {item!r}") from None
        if i in cons:
            raise ValidationError(f"coordinate {i} constrained twice")
        cons[i] = named_subgroup(fam.F, spec)
    return cons


def _tidy_input(fam, args):
    if isinstance(fam, ShiftFamily):
        return fam.subgroup(_parse_constraints(fam, args.constraint))
    if isinstance(fam, MatrixFamily):
        if args.shape:
            rows = [[float("inf") if c.strip() == "inf" else int(c) for c in r.split(",")] for r in args.shape.split(";")]
            return fam.shape(rows)
        return fam.level(args.level)
    if args.segment:
        lo, hi = (int(x) for x in args.segment.split(":"))
        return fam.segment(lo, hi)
    return fam.level(args.level)


def _text_subgroup(fam, V) -> str:
    if isinstance(fam, ShiftFamily) and fam.same(V, fam.all_O()):
        return "all-O"
    return json.dumps(core.jsonable(fam.describe(V)), sort_keys=True, ensure_ascii=False)


def cmd_tidy(args, out):
    fam = _family(args)
    V = _tidy_input(fam, args)
    rep = core.tidy(fam, V, args.cap)
    if args.json:
        out.write(_dump(rep.to_json(fam)))
        return 0
    d = lambda W: _text_subgroup(fam, W)  # noqa: E731
    out.write(f"family: {json.dumps(core.jsonable(fam.parameters()), sort_keys=True)}\n")
    out.write(f"input: {d(rep.input)}\n")
    out.write(f"step-1 iterations: {rep.step1_k}\n")
    out.write(f"after step 1: {d(rep.after_step1)}\n")
    if rep.L is not None:
        out.write(f"L: {d(rep.L)}\n")
        out.write(f"O*: {d(rep.O_star)}\n")
    out.write(f"O'': {d(rep.output)}\n")
    out.write(f"V_+: {d(rep.v_plus)}\n")
    out.write(f"V_-: {d(rep.v_minus)}\n")
    out.write(f"V_0: {d(rep.v_zero)}\n")
    out.write(f"T1: {'ok' if rep.t1.ok else 'fails'}  T2: {'ok' if rep.t2.ok else 'fails'}\n")
    out.write(f"tidy: {'yes' if rep.tidy else 'no'}\n")
    out.write(f"scale: {rep.scale}\n")
    out.write(f"scale of inverse: {rep.scale_inverse}\n")
    return 0


def _parse_element(fam, text: str):
    if isinstance(fam, ShiftFamily):
        coords = {}
        for item in filter(None, (t.strip() for t in text.split(","))):
            i, lab = item.split(":", 1)
            coords[int(i)] = fam.F.index_of(lab.strip())
        return fam.element(coords)
    if isinstance(fam, MatrixFamily):
        return _grid(text)
    return _tree_from_json(json.loads(text))


def cmd_member(args, out):
    if args.family == "matrix":
        v = membership_general(_matrix_element(args), _grid(args.x), args.target, args.horizon)
    else:
        fam = _family(args)
        v = core.membership(fam, _parse_element(fam, args.x), args.target, args.horizon)
    if args.json:
        out.write(_dump(v.to_json()))
    else:
        out.write(f"{core.Target.parse(args.target).value}: {v.verdict.value}\n")
        if v.reason:
            out.write(f"  {v.reason}\n")
        if v.witness is not None:
            out.write(f"  witness: {json.dumps(core.jsonable(v.witness), sort_keys=True, ensure_ascii=False)}\n")
    return 0


def cmd_tree(args, out):
    if args.family == "matrix":
        fam = MatrixFamily(_matrix_element(args))
        ad = coset_tree.MatrixCosets(fam, fam.level(args.level))
    else:
        ad = coset_tree.ShiftCosets(_shift(args))
    if args.inert:
        ad = coset_tree.InertProduct(group_by_name(args.inert), ad)
    if args.levels:
        m0, m1 = (int(x) for x in args.levels.split(":"))
    else:
        m0, m1 = 0, args.depth
    ball = coset_tree.build_ball(ad, m0, m1, args.depth, args.budget)
    rep = coset_tree.verify_local_structure(ball)
    if args.verify:
        sys.stderr.write(json.dumps(rep.to_json(), sort_keys=True) + "\n")
    out.write(coset_tree.export(ball, "json" if args.json else args.format))
    if args.verify and not rep.ok:
        return EXIT_FAIL
    return 0


def cmd_suite(args, out):
    if args.check:
        for cid in args.check:
            if cid not in suite.CHECKS:
                raise ValidationError(f"unknown check id {cid!r}")
    report = suite.run_suite(args.seed, args.cases, args.check)
    if args.json:
        out.write(report.dumps())
    else:
        for r in report.results:
            out.write(f"{r.id:<4} {'PASS' if r.passed else 'FAIL'}  {len(r.cases) - len(r.failures)}/{len(r.cases)}  {r.name}: {r.claim}\n")
        ex = report.exploratory
        out.write(f"exploratory: {ex['question']}: {ex['status']} ({ex['agree']}/{ex['cases']})\n")
    return 0 if report.passed else EXIT_FAIL


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tidyscale", description="Scales, tidy subgroups and contraction groups, exactly.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("scale", help="scale of alpha with cross-checks")
    _add_family_args(s)
    s.add_argument("--inverse", action="store_true", help="also report s(alpha^-1)")
    s.add_argument("--cap", type=int, default=core.DEFAULT_STEP1_CAP)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_scale)

    t = sub.add_parser("tidy", help="run the tidying procedure")
    _add_family_args(t)
    t.add_argument("--constraint", action="append", help="shift family: <coordinate>:<subgroup>, repeatable")
    t.add_argument("--level", type=int, default=1, help="filtration level for matrix and tree families")
    t.add_argument("--shape", help="matrix family: valuation shape grid (inf allowed)")
    t.add_argument("--segment", help="tree family: axis segment lo:hi")
    t.add_argument("--cap", type=int, default=core.DEFAULT_STEP1_CAP, help="step-1 cap (default 64)")
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_tidy)

    m = sub.add_parser("member", help="membership in U, P, M or U0")
    _add_family_args(m)
    m.add_argument("--x", required=True, help="element: grid (matrix), i:label,... (shift) or JSON (tree)")
    m.add_argument("--target", default="U", help="U, P, M or U0")
    m.add_argument("--horizon", type=int, default=16)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_member)

    c = sub.add_parser("tree", help="build and export a ball of the coset tree")
    _add_family_args(c, ("matrix", "shift"))
    c.add_argument("--depth", type=int, default=1)
    c.add_argument("--levels", help="spine levels m0:m1 (default 0:depth)")
    c.add_argument("--level", type=int, default=1, help="congruence level of V (matrix family)")
    c.add_argument("--inert", help="add an inert finite factor K, e.g. C2")
    c.add_argument("--budget", type=int, help=f"vertex budget (default {coset_tree.DEFAULT_VERTEX_BUDGET} or ${coset_tree.BUDGET_ENV})")
    c.add_argument("--format", choices=("dot", "json"), default="dot")
    c.add_argument("--json", action="store_true", help="same as --format json")
    c.add_argument("--verify", action="store_true", help="print the structure report to stderr; exit 1 on violations")
    c.set_defaults(func=cmd_tree)

    u = sub.add_parser("suite", help="run the property suite")
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--cases", type=int, default=suite.DEFAULT_CASES)
    u.add_argument("--check", action="append", help="restrict to a check id, repeatable")
    u.add_argument("--json", action="store_true")
    u.set_defaults(func=cmd_suite)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except TidyScaleError as exc:
        sys.stderr.write(f"error[{exc.code}]: {exc}\n")
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error[input]: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
