"""Command-line front end.

Exit codes: 0 success, 1 malformed input (schema errors listed as JSON
pointer paths), 2 verification failure, 3 structural-assertion failure
(report written), 4 resource cap exhausted.
"""

import argparse
import json
import os
import sys
import time

from .errors import (BudgetExhausted, GenericityExhausted,
                     PaperAssertionFailure, PreconditionError, QSGError)
from .generators import (gen_case_i_pencil, gen_case_ii_template,
                         gen_case_iii_template)
from .pipeline import Configuration, decompose, partition_four, verify_psg
from .quadforms import QuadForm
from .radical import classify_triple, radical_membership
from .scalars import rational_from_str, rational_to_str
from .sg import PointSet, dsw_check, sg_delta, sg_dimension

_START = time.monotonic()


def _budget_ms():
    raw = os.environ.get("QSG_BUDGET_MS")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        _fail_schema(["QSG_BUDGET_MS must be an integer"])


def _check_clock():
    cap = _budget_ms()
    if cap is not None and (time.monotonic() - _START) * 1000 > cap:
        print(json.dumps({"error": "resource cap exceeded",
                          "budget_ms": cap}, sort_keys=True))
        sys.exit(4)


def _emit(obj):
    print(json.dumps(obj, sort_keys=True, separators=(", ", ": ")))


def _fail_schema(pointers):
    _emit({"errors": pointers})
    sys.exit(1)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        _fail_schema([f"cannot read {path}: {exc}"])
    except json.JSONDecodeError as exc:
        _fail_schema([f"{path}: invalid JSON at line {exc.lineno}"])


def _load_config(path):
    obj = _load_json(path)
    errs = []
    if not isinstance(obj, dict):
        _fail_schema(["/: expected object"])
    if not isinstance(obj.get("n"), int):
        errs.append("/n: expected integer")
    if not isinstance(obj.get("forms"), list):
        errs.append("/forms: expected array")
    if errs:
        _fail_schema(errs)
    forms = []
    for i, f in enumerate(obj["forms"]):
        try:
            forms.append(QuadForm.from_json(f))
        except (QSGError, KeyError, TypeError, ValueError) as exc:
            errs.append(f"/forms/{i}: {exc}")
    if errs:
        _fail_schema(errs)
    try:
        return Configuration(obj["n"], forms,
                             delta=obj.get("delta"),
                             seed=obj.get("seed", 0))
    except QSGError as exc:
        _fail_schema([f"/: {exc}"])


def _parse_delta(text, flag="--delta"):
    try:
        return rational_from_str(text)
    except (QSGError, ValueError) as exc:
        _fail_schema([f"{flag}: {exc}"])


def _cmd_verify(args):
    config = _load_config(args.config)
    try:
        res = verify_psg(config)
    except BudgetExhausted as exc:
        _emit({"error": str(exc)})
        return 4
    _check_clock()
    g = res["graph"]
    _emit({"delta_actual": rational_to_str(res["delta_actual"]),
           "m": config.m,
           "neighbor_counts": [len(g.gamma(i)) for i in range(config.m)]})
    if args.delta is not None:
        want = _parse_delta(args.delta)
        if res["delta_actual"] < want:
            return 2
    return 0


def _cmd_classify(args):
    config = _load_config(args.config)
    i, j = args.pair
    if not (0 <= i < config.m and 0 <= j < config.m and i != j):
        _fail_schema(["--pair: indices out of range or equal"])
    A, B = config.forms[i], config.forms[j]
    thirds = [args.third] if args.third is not None \
        else [k for k in range(config.m) if k not in (i, j)]
    for k in thirds:
        if not 0 <= k < config.m:
            _fail_schema(["--third: index out of range"])
        mem = radical_membership(config.forms[k], A, B)
        if mem["decision"] == "yes":
            cls = classify_triple(A, B, config.forms[k], membership=mem)
            out = cls.to_json()
            out["third"] = k
            _emit(out)
            return 0
    _emit({"result": "no-witness", "pair": [i, j]})
    return 2


def _cmd_radical(args):
    obj = _load_json(args.triple)
    errs = []
    if not isinstance(obj, dict):
        _fail_schema(["/: expected object"])
    if not isinstance(obj.get("n"), int):
        errs.append("/n: expected integer")
    forms = {}
    for key in ("A", "B", "C"):
        if key not in obj:
            errs.append(f"/{key}: missing")
            continue
        try:
            forms[key] = QuadForm.from_json(obj[key])
        except (QSGError, KeyError, TypeError, ValueError) as exc:
            errs.append(f"/{key}: {exc}")
    if errs:
        _fail_schema(errs)
    try:
        res = radical_membership(forms["C"], forms["A"], forms["B"],
                                 budget=args.budget, k_max=args.kmax)
    except BudgetExhausted as exc:
        _emit({"error": str(exc)})
        return 4
    out = {"result": res["decision"], "method": res["method"]}
    if res.get("witness") is not None:
        out["witness"] = res["witness"]
    _emit(out)
    return 0


def _cmd_decompose(args):
    config = _load_config(args.config)
    delta = _parse_delta(args.delta)
    try:
        cert = decompose(config, delta, seed=args.seed)
    except PaperAssertionFailure as exc:
        report = exc.to_json()
        if args.trace:
            with open(args.trace, "w") as fh:
                json.dump(report, fh, sort_keys=True, indent=1)
        _emit(report)
        return 3
    except BudgetExhausted as exc:
        _emit({"error": str(exc)})
        return 4
    except PreconditionError as exc:
        _emit({"error": str(exc)})
        return 2
    _check_clock()
    out = cert.to_json()
    if args.trace:
        with open(args.trace, "w") as fh:
            json.dump(out["trace"], fh, sort_keys=True, indent=1)
    _emit(out)
    return 0


def _cmd_gen(args):
    gens = {"case-i": gen_case_i_pencil,
            "case-ii": gen_case_ii_template,
            "case-iii": gen_case_iii_template}
    try:
        cfg = gens[args.template](args.k, args.n, seed=args.seed)
    except (PreconditionError, GenericityExhausted) as exc:
        _fail_schema([f"generator: {exc}"])
    _emit(cfg.to_json())
    return 0


def _cmd_linear_sg(args):
    obj = _load_json(args.points)
    try:
        pts = PointSet.from_json(obj)
    except (QSGError, KeyError, TypeError, ValueError) as exc:
        _fail_schema([f"/: {exc}"])
    try:
        d = sg_delta(pts, args.mode)
    except PreconditionError as exc:
        _fail_schema([f"/points: {exc}"])
    out = {"delta": rational_to_str(d),
           "dimension": sg_dimension(pts) if args.mode == "span"
           else pts.affine_dim()}
    want = _parse_delta(args.delta) if args.delta is not None else \
        (d if d > 0 else None)
    if want is not None:
        try:
            out["dsw"] = dsw_check(pts, want, args.mode)
        except PaperAssertionFailure as exc:
            _emit(exc.to_json())
            return 3
    _emit(out)
    return 0 if d > 0 or args.delta is None else 0


_COLORS = {"c_v": "lightblue", "c_ideal": "salmon",
           "j_v": "palegreen", "j_ideal": "gold"}


def _cmd_graph(args):
    config = _load_config(args.config)
    try:
        res = verify_psg(config)
    except BudgetExhausted as exc:
        _emit({"error": str(exc)})
        return 4
    g = res["graph"]
    classes = {}
    if args.certificate:
        from .linalg import Subspace
        cert = _load_json(args.certificate)
        try:
            V = Subspace.from_json(cert["V"])
            J = list(cert["J"])
        except (QSGError, KeyError, TypeError, ValueError) as exc:
            _fail_schema([f"/certificate: {exc}"])
        parts = partition_four(config, J, V, g)
        for name, members in sorted(parts.items()):
            for k in members:
                classes[k] = name
    if args.format == "csv":
        print("i,j,cases,witness")
        for (a, b), e in sorted(g.edges.items()):
            print(f"{a},{b},{'+'.join(sorted(e['cases']))},{e['witness']}")
        return 0
    print("graph qsg {")
    for i in range(config.m):
        attrs = [f'label="Q{i}"']
        if i in classes:
            attrs.append(f'style=filled fillcolor={_COLORS[classes[i]]}')
        print(f"  n{i} [{' '.join(attrs)}];")
    for (a, b), e in sorted(g.edges.items()):
        label = "+".join(sorted(e["cases"]))
        print(f'  n{a} -- n{b} [label="{label}"];')
    print("}")
    return 0


def _build_parser():
    p = argparse.ArgumentParser(prog="qsg")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify-psg")
    v.add_argument("config")
    v.add_argument("--delta")
    v.set_defaults(func=_cmd_verify)

    c = sub.add_parser("classify")
    c.add_argument("config")
    c.add_argument("--pair", nargs=2, type=int, required=True)
    c.add_argument("--third", type=int)
    c.set_defaults(func=_cmd_classify)

    r = sub.add_parser("radical")
    r.add_argument("triple")
    r.add_argument("--kmax", type=int, default=3)
    r.add_argument("--budget", type=int, default=200000)
    r.set_defaults(func=_cmd_radical)

    d = sub.add_parser("decompose")
    d.add_argument("config")
    d.add_argument("--delta", required=True)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--trace")
    d.set_defaults(func=_cmd_decompose)

    g = sub.add_parser("gen")
    g.add_argument("--template", required=True,
                   choices=["case-i", "case-ii", "case-iii"])
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=_cmd_gen)

    ls = sub.add_parser("linear-sg")
    ls.add_argument("points")
    ls.add_argument("--delta")
    ls.add_argument("--mode", choices=["span", "affine"], default="span")
    ls.set_defaults(func=_cmd_linear_sg)

    gr = sub.add_parser("graph")
    gr.add_argument("config")
    gr.add_argument("--format", choices=["dot", "csv"], default="dot")
    gr.add_argument("--certificate")
    gr.set_defaults(func=_cmd_graph)
    return p


def main(argv=None):
    args = _build_parser().parse_args(argv)
    _check_clock()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
