"""Command-line front end.

Exit status: 0 when every verdict passes, 1 when some verdict fails,
2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import diagnostics as dg
from .coding import (
    avg_length,
    build_dyadic_code,
    decode_bits,
    encode,
    is_abs_optimal,
    shannon_entropy,
    validate_code,
)
from .errors import EnsembleLabError
from .formats import (
    format_symbols,
    read_code,
    read_scheme,
    read_sequence,
    read_space,
    read_test,
    write_code,
    write_sequence,
)
from .mltest import certify_level, member, open_measure
from .prob import BINARY, Alphabet, RandomVariable, conditional_space, induced_space
from .report import FORMATS, render, render_report
from .rules import parse_injection, parse_rule
from .secrecy import cipher_profile, is_perfectly_secret, key_bound, secrecy_under, validate_scheme
from .streams import (
    DEFAULT_BUDGET,
    FinitePrefix,
    drain,
    filter_event,
    from_symbols,
    map_rv,
    pseudo_ensemble,
    pseudo_ensemble_prefix,
    select,
    shuffle,
    take_prefix,
    von_neumann,
)
from .transforms import (
    map_preimage,
    shuffle_preimage,
    transform_condition,
    transform_map,
    transform_select,
    transform_shuffle,
)

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return dg.as_fraction(text)
    except (ValueError, ArithmeticError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _event(text: str) -> list[str]:
    return [a for a in text.split(",") if a]


def _mapping(text: str) -> dict[str, str]:
    out = {}
    for part in text.split(","):
        a, sep, b = part.partition("=")
        if not sep or not a or not b:
            raise UsageError(f"bad mapping entry {part!r}; expected sym=value")
        out[a] = b
    return out


def _infer_alphabet(path) -> Alphabet:
    text = Path(path).read_text(encoding="utf-8")
    tokens = text.split()
    if len(tokens) > 1 and any(len(t) > 1 for t in tokens):
        return Alphabet.of(sorted(set(tokens)))
    return Alphabet.of(sorted(set("".join(tokens))))


def _load_prefix(args, space=None, path=None):
    path = path or getattr(args, "seq", None)
    if path:
        if str(path).endswith(".bits"):
            return read_sequence(path, BINARY)
        alphabet = space.alphabet if space is not None else _infer_alphabet(path)
        return read_sequence(path, alphabet)
    if space is None or args.seed is None or args.n is None:
        raise UsageError("give --seq PATH, or --space with --seed and --n")
    return pseudo_ensemble_prefix(space, args.seed, args.n)


# gen / pipe


def cmd_gen(args) -> int:
    space = read_space(args.space)
    prefix = pseudo_ensemble_prefix(space, args.seed, args.n)
    if args.out:
        write_sequence(prefix, args.out)
        sys.stdout.write(render("gen", ("key", "value"), [
            ("space", args.space), ("seed", args.seed), ("n", args.n), ("out", args.out),
        ], args.format))
    else:
        sys.stdout.write(format_symbols(prefix.symbols, prefix.alphabet) + "\n")
    return OK


def _apply_op(op: str, stream, budget: int):
    name, _, arg = op.partition(":")
    if name == "filter":
        return filter_event(_event(arg), stream, budget)
    if name == "indicator":
        return map_rv(RandomVariable.indicator(stream.alphabet, _event(arg)), stream)
    if name == "map":
        return map_rv(RandomVariable.from_mapping(stream.alphabet, _mapping(arg), name=f"map:{arg}"), stream)
    if name == "contract":
        b, _, a = arg.partition("=")
        return map_rv(RandomVariable.contraction(stream.alphabet, b, a), stream)
    if name == "shuffle":
        return shuffle(parse_injection(arg), stream)
    if name == "select":
        return select(parse_rule(arg), stream, budget)
    if name == "vonneumann":
        return von_neumann(stream, budget)
    raise UsageError(f"unknown operator {op!r}")


def cmd_pipe(args) -> int:
    if args.seq:
        space = read_space(args.space) if args.space else None
        prefix = _load_prefix(args, space)
        stream = from_symbols(prefix.alphabet, prefix.symbols, prefix.origin)
    else:
        if not args.space or args.seed is None:
            raise UsageError("pipe needs --seq PATH or --space with --seed")
        stream = pseudo_ensemble(read_space(args.space), args.seed)
    for op in args.op:
        stream = _apply_op(op, stream, args.budget)
    out = take_prefix(stream, args.n) if args.n is not None else drain(stream)
    if args.out:
        write_sequence(out, args.out)
        sys.stdout.write(render("pipe", ("key", "value"), [
            ("origin", out.origin), ("alphabet", ",".join(out.alphabet)), ("n", len(out)), ("out", args.out),
        ], args.format))
    else:
        sys.stdout.write(format_symbols(out.symbols, out.alphabet) + "\n")
    return OK


# test


def _family(args):
    space = read_space(args.space) if args.space else None
    return read_test(args.testfile, space)


def _levels(family, args):
    idx = family.indices
    if args.level is not None:
        if args.level not in idx:
            raise UsageError(f"the test has no level {args.level}")
        idx = [args.level]
    return idx


def cmd_test_certify(args) -> int:
    family = _family(args)
    certs = {n: certify_level(family.space, family.level(n)) for n in _levels(family, args)}
    rows = [(n, len(c.level), c.measure, c.bound, c.certified) for n, c in certs.items()]
    sys.stdout.write(render("test certify", ("level", "strings", "measure", "bound", "verdict"), rows, args.format,
                       {"test": args.testfile, "rule": "measure < 2^-n"}))
    if args.figure:
        from .plotting import level_measures

        level_measures(certs, args.figure)
    return OK if all(c.certified for c in certs.values()) else FAIL


def cmd_test_member(args) -> int:
    family = _family(args)
    if args.prefix is not None:
        prefix = family.space.alphabet.check_string(args.prefix)
    else:
        prefix = _load_prefix(args, family.space).symbols
    if args.depth is not None:
        prefix = prefix[: args.depth]
    rows = []
    for n in _levels(family, args):
        hit = member(family.level(n), prefix, family.space.alphabet)
        rows.append((n, "member" if hit else "not yet (provisional)"))
    sys.stdout.write(render("test member", ("level", "result"), rows, args.format, {"prefix_length": len(prefix)}))
    return OK


def cmd_test_transform(args) -> int:
    """Transform each level and check the measure relation string by string."""
    family = _family(args)
    source = read_space(args.space_out) if args.space_out else family.space
    rows = []
    ok = True
    for n in _levels(family, args):
        lvl = family.level(n)
        before = open_measure(family.space, lvl.strings)
        if args.kind == "map":
            if not args.map:
                raise UsageError("--map sym=value,... is required for the map transform")
            x = RandomVariable.from_mapping(source.alphabet, _mapping(args.map), family.space.alphabet, args.map)
            induced = induced_space(x, source)
            out = transform_map(x, lvl, source)
            good = all(
                open_measure(source, map_preimage(x, s)) == open_measure(induced, [s]) for s in lvl.strings
            )
            rows.append((n, len(out), open_measure(induced, lvl.strings), out.measure_certificate, "= per string", good))
        elif args.kind == "shuffle":
            f = parse_injection(args.injection or "identity")
            out = transform_shuffle(f, lvl, family.space)
            good = all(
                open_measure(family.space, shuffle_preimage(f, s, family.space.alphabet))
                == open_measure(family.space, [s])
                for s in lvl.strings
            )
            rows.append((n, len(out), before, out.measure_certificate, "= per string", good))
        elif args.kind == "select":
            if not args.rule:
                raise UsageError("--rule is required for the select transform")
            out, after = transform_select(parse_rule(args.rule), lvl, family.space, args.depth or 8)
            bound = sum((open_measure(family.space, [s]) for s in lvl.strings), Fraction(0))
            rows.append((n, len(out), before, after, f"<= {dg.fmt(bound)} (truncated)", after <= bound))
            good = after <= bound
        else:
            if not args.event:
                raise UsageError("--event is required for the condition transform")
            res = transform_condition(_event(args.event), lvl, source, args.depth or 8)
            expect = open_measure(conditional_space(source, _event(args.event)), lvl.strings)
            good = res.closed_form == expect and res.truncated_measure <= res.closed_form
            note = f"closed form; depth {res.depth} sum {dg.fmt(res.truncated_measure)}"
            rows.append((n, len(res.enumeration), expect, res.closed_form, note, good))
        ok &= good
    columns = ("level", "strings", "input measure", "output measure", "relation", "verdict")
    sys.stdout.write(render(f"test transform {args.kind}", columns, rows, args.format, {"test": args.testfile}))
    return OK if ok else FAIL


# diag


def _report_exit(args, report, figure_fn=None) -> int:
    sys.stdout.write(render_report(report, args.format))
    if args.figure and figure_fn is not None:
        figure_fn(args.figure)
    return OK if report.passed else FAIL


def cmd_diag_lln(args) -> int:
    space = read_space(args.space)
    prefix = _load_prefix(args, space)
    report = dg.lln_report(space, prefix, args.eps)

    def fig(path):
        from .plotting import running_frequency

        running_frequency(prefix, space, path, args.eps)

    return _report_exit(args, report, fig)


def cmd_diag_chernoff(args) -> int:
    space = read_space(args.space)
    value = dg.chernoff_bound(space, args.eps, args.n)
    e = dg.chernoff_exponent(space["1"], args.eps, args.n)
    sys.stdout.write(render("chernoff", ("key", "value"), [
        ("Q(1)", space["1"]), ("eps", args.eps), ("n", args.n), ("exponent", e), ("bound (rounded up)", value),
    ], args.format, {"formula": "2 exp(-eps^2 n / (2 Q(0) Q(1)))"}))
    if args.figure:
        from .plotting import chernoff_curve

        chernoff_curve(space["1"], args.eps, args.n, args.figure)
    return OK


def cmd_diag_compress(args) -> int:
    space = read_space(args.space) if args.space else None
    prefix = _load_prefix(args, space)
    report = dg.compression_report(prefix, args.threshold)

    def fig(path):
        from .plotting import verdict_bars

        verdict_bars(report, path)

    code = _report_exit(args, report, fig)
    return code


def _seqs(args):
    space = read_space(args.space) if args.space else None
    if len(args.seq) < 2:
        raise UsageError("give at least two --seq files")
    return [_load_prefix(args, space, p) for p in args.seq]


def _eps(args) -> Fraction:
    if args.eps is None:
        raise UsageError("--eps is required")
    return args.eps


def cmd_diag_indep(args) -> int:
    report = dg.empirical_independence(_seqs(args), _eps(args))

    def fig(path):
        from .plotting import verdict_bars

        verdict_bars(report, path)

    return _report_exit(args, report, fig)


def cmd_diag_equiv(args) -> int:
    a, b = _seqs(args)[:2]
    report = dg.equivalence_check(a, b, _eps(args))

    def fig(path):
        from .plotting import verdict_bars

        verdict_bars(report, path)

    return _report_exit(args, report, fig)


# code


def cmd_code_audit(args) -> int:
    code = read_code(args.codefile)
    audit = validate_code(code)
    rows = [("kraft sum", audit.kraft), ("instantaneous", audit.ok)]
    rows += [("duplicate", f"{a},{b}") for a, b in audit.duplicates]
    rows += [("prefix violation", f"{code[a]} ({a}) prefixes {code[b]} ({b})") for a, b in audit.prefix_violations]
    status = audit.ok
    if args.space and audit.ok:
        space = read_space(args.space)
        h = shannon_entropy(space)
        opt = is_abs_optimal(space, code)
        rows += [
            ("H(P)", h.exact if h.exact is not None else f"[{h.lower}, {h.upper}]"),
            ("L_P(C)", avg_length(space, code)),
            ("absolutely optimal", opt.optimal),
        ]
        rows += [(f"witness {a}", f"P={p} vs 2^-|C|={t}") for a, p, t in opt.offending]
        rows += [(f"zero weight {a}", "P(a)=0 excluded from the criterion") for a in opt.zero_weight]
        status = opt.optimal
        if args.figure:
            from .plotting import code_lengths

            code_lengths(space, code, args.figure)
    sys.stdout.write(render("code audit", ("check", "value"), rows, args.format, {"code": args.codefile}))
    return OK if status else FAIL


def cmd_code_encode(args) -> int:
    code = read_code(args.codefile)
    prefix = read_sequence(args.seq, code.source)
    return _write_symbols(args, tuple(encode(code, prefix.symbols)), BINARY)


def _write_symbols(args, symbols, alphabet) -> int:
    if args.out:
        write_sequence(FinitePrefix(tuple(symbols), alphabet), args.out)
    else:
        sys.stdout.write(format_symbols(symbols, alphabet) + "\n")
    return OK


def cmd_code_decode(args) -> int:
    code = read_code(args.codefile)
    prefix = read_sequence(args.seq, BINARY)
    symbols, rest = decode_bits(code, prefix.symbols)
    _write_symbols(args, symbols, code.source)
    if rest:
        sys.stderr.write(f"remainder: {rest} (incomplete codeword)\n")
    return OK


def cmd_code_build(args) -> int:
    space = read_space(args.space)
    code = build_dyadic_code(space)
    if args.out:
        write_code(code, args.out)
    sys.stdout.write(render("code build", ("symbol", "P(a)", "codeword"), [(a, space[a], w) for a, w in code.items()],
                       args.format))
    return OK


# secrecy


def cmd_secrecy_check(args) -> int:
    scheme = read_scheme(args.schemefile)
    audit = validate_scheme(scheme)
    rows = [("correct (Dec(Enc(m,k),k) = m)", audit.ok)]
    if not audit.ok:
        m, k = audit.witness
        rows.append(("correctness witness", f"m={m} k={k} Enc={scheme.enc[(m, k)]}"))
        sys.stdout.write(render("secrecy check", ("check", "value"), rows, args.format, {"scheme": args.schemefile}))
        return FAIL
    verdict = is_perfectly_secret(scheme) if not args.msg else secrecy_under(scheme, read_space(args.msg))
    rows.append(("perfectly secret" if verdict.secret else "not perfectly secret", verdict.secret))
    if verdict.witness:
        m, c, j, p = verdict.witness
        rows.append(("independence witness", f"m={m} c={c} joint={j} product={p}"))
    prof = cipher_profile(scheme)
    for c in scheme.ciphers:
        rows.append((f"P(C={c} | M=m) over m", " ".join(str(prof[m][c]) for m in scheme.messages)))
    kb = key_bound(scheme)
    rows.append(("auxiliary: usable keys >= messages", f"{kb.keys} >= {kb.image}: {'yes' if kb.holds else 'no'}"))
    dist = "uniform messages" if not args.msg else args.msg
    sys.stdout.write(render("secrecy check", ("check", "value"), rows, args.format,
                       {"scheme": args.schemefile, "distribution": dist}))
    return OK if verdict.secret else FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table", help="output format")
    fig = argparse.ArgumentParser(add_help=False)
    fig.add_argument("--figure", metavar="PATH", help="also write a figure (png, pdf, svg)")
    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--seq", metavar="PATH", help="sequence file")
    src.add_argument("--seed", type=int, help="pseudo-ensemble seed (with --space and --n)")
    src.add_argument("--n", type=int, help="prefix length")

    p = argparse.ArgumentParser(prog="ensemble-lab", description="Exact checks for ensembles of finite probability spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a pseudo-ensemble prefix")
    g.add_argument("--space", required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    g = sub.add_parser("pipe", parents=[common], help="apply sequence operators")
    g.add_argument("--space")
    g.add_argument("--seed", type=int)
    g.add_argument("--seq")
    g.add_argument("--n", type=int, help="output length (default: drain a finite input)")
    g.add_argument(
        "--op", action="append", default=[],
        help="filter:a,b | indicator:a,b | map:a=x,b=y | contract:b=a | shuffle:INJ | select:RULE | vonneumann",
    )
    g.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    g.add_argument("--out")
    g.set_defaults(func=cmd_pipe)

    t = sub.add_parser("test", help="Martin-Löf test levels").add_subparsers(dest="action", required=True)
    for name, func, extra in (
        ("certify", cmd_test_certify, [fig]),
        ("member", cmd_test_member, [src]),
        ("transform", cmd_test_transform, []),
    ):
        q = t.add_parser(name, parents=[common, *extra])
        q.add_argument("testfile")
        q.add_argument("--space", help="override the space named in the test file")
        q.add_argument("--level", type=_positive)
        q.set_defaults(func=func)
        if name == "member":
            q.add_argument("--prefix", help="literal prefix (one symbol per character)")
            q.add_argument("--depth", type=int, help="only look at this many symbols")
        if name == "transform":
            q.add_argument("kind", choices=("map", "shuffle", "select", "condition"))
            q.add_argument("--space-out", help="source space P for map and condition")
            q.add_argument("--map", help="random variable as sym=value,...")
            q.add_argument("--injection")
            q.add_argument("--rule")
            q.add_argument("--event")
            q.add_argument("--depth", type=int)

    d = sub.add_parser("diag", help="finite-prefix diagnostics").add_subparsers(dest="action", required=True)
    q = d.add_parser("lln", parents=[common, fig, src])
    q.add_argument("--space", required=True)
    q.add_argument("--eps", type=_fraction, help="threshold (default: Chernoff at confidence 1e-6)")
    q.set_defaults(func=cmd_diag_lln)
    q = d.add_parser("chernoff", parents=[common, fig])
    q.add_argument("--space", required=True)
    q.add_argument("--eps", type=_fraction, required=True)
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=cmd_diag_chernoff)
    q = d.add_parser("compress", parents=[common, fig, src])
    q.add_argument("--space")
    q.add_argument("--threshold", type=_fraction, default=Fraction(9, 10))
    q.set_defaults(func=cmd_diag_compress)
    for name, func in (("indep", cmd_diag_indep), ("equiv", cmd_diag_equiv)):
        q = d.add_parser(name, parents=[common, fig])
        q.add_argument("--seq", action="append", default=[], required=True)
        q.add_argument("--space", help="alphabet for text sequences")
        q.add_argument("--eps", type=_fraction)
        q.set_defaults(func=func)

    c = sub.add_parser("code", help="instantaneous codes").add_subparsers(dest="action", required=True)
    q = c.add_parser("audit", parents=[common, fig])
    q.add_argument("codefile")
    q.add_argument("--space")
    q.set_defaults(func=cmd_code_audit)
    for name, func in (("encode", cmd_code_encode), ("decode", cmd_code_decode)):
        q = c.add_parser(name, parents=[common])
        q.add_argument("codefile")
        q.add_argument("--seq", required=True)
        q.add_argument("--out")
        q.set_defaults(func=func)
    q = c.add_parser("build", parents=[common])
    q.add_argument("space")
    q.add_argument("--out")
    q.set_defaults(func=cmd_code_build)

    s = sub.add_parser("secrecy", help="encryption schemes").add_subparsers(dest="action", required=True)
    q = s.add_parser("check", parents=[common])
    q.add_argument("schemefile")
    q.add_argument("--msg", help="message distribution (default: uniform)")
    q.set_defaults(func=cmd_secrecy_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"ensemble-lab: error: {e}\n")
    except (EnsembleLabError, OSError) as e:
        sys.stderr.write(f"ensemble-lab: error: {e}\n")
    return USAGE


if __name__ == "__main__":
    sys.exit(main())
