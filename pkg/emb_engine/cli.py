"""
Command-line surface.

    python -m emb_engine space embed "lim(pt)" "lim(lim(pt))"
    python -m emb_engine graph ihom @g1.json @g2.json
    python -m emb_engine red check @g.json @h.json "lim(lim(lim(pt)))" --depth 4

Arguments starting with @ are read from files. Results print as JSON on
stdout; exit status 0 for decided results, 2 for bad input, 3 for inputs
outside the supported fragment.
"""

import argparse
import json
import logging
import sys

from . import settings
from .errors import EmbEngineError, TermError, UnsupportedDomain, UnsupportedFn
from .fn_embed import D0, classify_discontinuous, fn_embeds, verify_fn_at_depths, verify_fn_witness
from .fn_rep import (
    continuity_check,
    d0,
    d1,
    evaluate,
    image_profile,
    is_locally_constant,
    postcompose,
)
from .graph import graph_to_json, ihom_decide
from .labelling import GAMMA, LAMBDA, gamma_label, label_leq, lambda_label
from .parser import (
    format_fn,
    format_set,
    format_term,
    format_value,
    parse_address,
    parse_fn,
    parse_graph,
    parse_set,
    parse_term,
    read_text,
)
from .rank import (
    difference_chain,
    escalate,
    escalation_witness,
    fn_rank,
    high_rank_witness,
    rank_delta2,
    rank_oracle,
    sep_rank,
    set_closure,
)
from .reduction import (
    OMEGA_SQUARED,
    build_regular_pe,
    graph_fn,
    graph_to_fn_eval,
    recover_graph,
    reduce_on_space,
    reduction_check,
    verify_regular_pe,
)
from .report_export import save_report, to_json
from .space_embed import space_embeds, verify_at_depths
from .space_term import (
    canonical_form,
    cb_derivative,
    cb_rank,
    classify_single_limit,
    format_address,
    truncate,
)
from .summary import build_reduction_summary, reduction_batch, verification_frame

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3


# ============================================================
# Input helpers
# ============================================================
def _text(arg):
    if arg.startswith("@"):
        return read_text(arg[1:])
    return arg


def _term(arg):
    return parse_term(_text(arg))


def _fn(arg):
    return parse_fn(_text(arg))


def _set(arg):
    return parse_set(_text(arg))


def _graph(arg):
    return parse_graph(_text(arg))


def _depths(args):
    if args.all_depths:
        return settings.tested_depths()
    return [args.depth]


def _depth(text):
    d = int(text)
    if not 1 <= d <= settings.max_depth():
        raise argparse.ArgumentTypeError(f"depth must be between 1 and {settings.max_depth()}, got {d}")
    return d


def _records(df):
    return json.loads(df.to_json(orient="records"))


# ============================================================
# space
# ============================================================
def space_rank(args):
    return {"rank": cb_rank(_term(args.term))}


def space_derive(args):
    return {"term": format_term(cb_derivative(_term(args.term), args.times))}


def space_canon(args):
    return canonical_form(_term(args.term))


def space_embed(args):
    return space_embeds(_term(args.source), _term(args.target))


def space_classify(args):
    return {"type": classify_single_limit(_term(args.term))}


def space_truncate(args):
    trunc = truncate(_term(args.term), args.depth)
    if args.table:
        return trunc.to_frame()
    return {"depth": trunc.depth, "points": _records(trunc.to_frame())}


# ============================================================
# graph / fn / label
# ============================================================
def graph_ihom(args):
    return ihom_decide(_graph(args.source), _graph(args.target))


def fn_eval(args):
    f = _fn(args.fn)
    return {"value": format_value(evaluate(f, parse_address(args.address, f.domain)))}


def fn_cont(args):
    hit = continuity_check(_fn(args.fn))
    if hit.continuous:
        return {"continuous": True}
    return {"continuous": False, "at": format_address(hit.path),
            "infValue": format_value(hit.inf_value)}


def fn_image(args):
    return image_profile(_fn(args.fn))


def fn_embed(args):
    return fn_embeds(_fn(args.source), _fn(args.target))


def fn_classify(args):
    f = _fn(args.fn)
    kind, w = classify_discontinuous(f)
    if w is None:
        return {"class": kind}
    source = d0() if kind == D0 else d1()
    return {"class": kind, "witness": w,
            "verification": verify_fn_witness(w, source, f, args.depth)}


def fn_post(args):
    return {"fn": format_fn(postcompose(args.embedding, _fn(args.fn)))}


def _labels(f, kind):
    return gamma_label(f) if kind == GAMMA else lambda_label(f)


def label_gamma(args):
    return gamma_label(_fn(args.fn))


def label_lambda(args):
    return lambda_label(_fn(args.fn))


def label_leq_cmd(args):
    f, g = _fn(args.source), _fn(args.target)
    kind = args.kind
    if kind is None:
        kind = LAMBDA if is_locally_constant(f) and is_locally_constant(g) else GAMMA
    verdict = label_leq(_labels(f, kind), _labels(g, kind))
    if not verdict:
        return verdict
    tau = {format_value(u): format_value(v) for u, v in verdict.witness.table.items()}
    return {"verdict": "yes", "kind": kind, "tau": tau}


# ============================================================
# red
# ============================================================
def red_eval(args):
    a = parse_address(args.address, OMEGA_SQUARED)
    return {"value": format_value(graph_to_fn_eval(_graph(args.graph), a))}


def red_recover(args):
    g = _graph(args.graph)
    if args.term:
        pe = build_regular_pe(_term(args.term))
        recovered = recover_graph(reduce_on_space(g, pe.term, pe), args.support, pe)
    else:
        recovered = recover_graph(graph_fn(g), args.support)
    return {"graph": graph_to_json(recovered)}


def red_build_pe(args):
    pe = build_regular_pe(_term(args.term))
    return {"pe": pe.as_dict(), "verification": verify_regular_pe(pe, args.depth)}


def red_reduce(args):
    t = _term(args.term)
    f = reduce_on_space(_graph(args.graph), t)
    return {"value": format_value(evaluate(f, parse_address(args.address, t)))}


def red_check(args):
    return reduction_check(_graph(args.source), _graph(args.target), _term(args.term), args.depth)


def red_batch(args):
    graphs = [_graph(a) for a in args.graphs]
    df = reduction_batch(graphs, _term(args.term), args.depth, args.workers)
    summary = build_reduction_summary(df)
    if args.table:
        return summary
    return {"pairs": _records(df), "summary": _records(summary)}


# ============================================================
# rank
# ============================================================
def rank_closure(args):
    t, s = _set(args.set)
    return {"set": format_set(t, set_closure(s))}


def rank_set(args):
    t, s = _set(args.set)
    out = {"rank": rank_delta2(s), "chain": [format_set(t, c) for c in difference_chain(s)]}
    if args.oracle:
        out["oracleRank"] = rank_oracle(s)
    return out


def rank_sep(args):
    t, a = _set(args.a)
    t2, b = _set(args.b)
    if t != t2:
        raise TermError(f"sets live on different terms: {format_term(t)} vs {format_term(t2)}")
    return {"rank": sep_rank(a, b)}


def rank_fn(args):
    return {"rank": fn_rank(_fn(args.fn))}


def rank_witness(args):
    t, s = high_rank_witness(args.level)
    return {"set": format_set(t, s), "rank": rank_delta2(s)}


def rank_escalate(args):
    f = _fn(args.fn)
    g = escalate(f)
    w = escalation_witness(f)
    return {"fn": format_fn(g), "rankBefore": fn_rank(f), "rankAfter": fn_rank(g),
            "verification": verify_fn_witness(w, f, g, args.depth)}


# ============================================================
# verify
# ============================================================
def _verify_result(verdict, check, args):
    if not verdict:
        return verdict
    reports = check(verdict.witness, _depths(args))
    if args.table:
        return verification_frame(reports)
    return {"verdict": verdict, "reports": reports}


def verify_space(args):
    s, t = _term(args.source), _term(args.target)
    return _verify_result(space_embeds(s, t),
                          lambda w, depths: verify_at_depths(w, s, t, depths), args)


def verify_fn(args):
    f, g = _fn(args.source), _fn(args.target)
    return _verify_result(fn_embeds(f, g),
                          lambda w, depths: verify_fn_at_depths(w, f, g, depths), args)


# ============================================================
# Parser
# ============================================================
def _command(sub, name, handler, *positionals, depth=False, table=False):
    p = sub.add_parser(name)
    for pos in positionals:
        p.add_argument(pos)
    if depth:
        p.add_argument("--depth", type=_depth, default=settings.default_depth())
    if table:
        p.add_argument("--table", action="store_true", help="Print a table instead of JSON.")
    p.set_defaults(handler=handler)
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="emb_engine",
                                     description="Embeddability of scattered spaces and functions.")
    parser.add_argument("--out", help="Also save the result as timestamped JSON in this directory.")
    families = parser.add_subparsers(dest="family", required=True)

    space = families.add_parser("space").add_subparsers(dest="command", required=True)
    _command(space, "rank", space_rank, "term")
    _command(space, "derive", space_derive, "term").add_argument("--times", type=int, default=1)
    _command(space, "canon", space_canon, "term")
    _command(space, "embed", space_embed, "source", "target")
    _command(space, "classify", space_classify, "term")
    _command(space, "truncate", space_truncate, "term", depth=True, table=True)

    graph = families.add_parser("graph").add_subparsers(dest="command", required=True)
    _command(graph, "ihom", graph_ihom, "source", "target")

    fn = families.add_parser("fn").add_subparsers(dest="command", required=True)
    _command(fn, "eval", fn_eval, "fn", "address")
    _command(fn, "cont", fn_cont, "fn")
    _command(fn, "image", fn_image, "fn")
    _command(fn, "embed", fn_embed, "source", "target")
    _command(fn, "classify", fn_classify, "fn", depth=True)
    _command(fn, "post", fn_post, "embedding", "fn")

    label = families.add_parser("label").add_subparsers(dest="command", required=True)
    _command(label, "gamma", label_gamma, "fn")
    _command(label, "lambda", label_lambda, "fn")
    _command(label, "leq", label_leq_cmd, "source", "target").add_argument(
        "--kind", choices=[GAMMA, LAMBDA])

    red = families.add_parser("red").add_subparsers(dest="command", required=True)
    _command(red, "eval", red_eval, "graph", "address")
    p = _command(red, "recover", red_recover, "graph")
    p.add_argument("--support", type=int, required=True)
    p.add_argument("--term", help="Recover through the regular pseudo-embedding of this term.")
    _command(red, "build-pe", red_build_pe, "term", depth=True)
    _command(red, "reduce", red_reduce, "graph", "term", "address")
    _command(red, "check", red_check, "source", "target", "term", depth=True)
    p = _command(red, "batch", red_batch, "term", depth=True, table=True)
    p.add_argument("graphs", nargs="+")
    p.add_argument("--workers", type=int, default=None)

    rank = families.add_parser("rank").add_subparsers(dest="command", required=True)
    _command(rank, "closure", rank_closure, "set")
    _command(rank, "set", rank_set, "set").add_argument(
        "--oracle", action="store_true", help="Cross-check with the exhaustive oracle.")
    _command(rank, "sep", rank_sep, "a", "b")
    _command(rank, "fn", rank_fn, "fn")
    _command(rank, "witness", rank_witness).add_argument("level", type=int)
    _command(rank, "escalate", rank_escalate, "fn", depth=True)

    verify = families.add_parser("verify").add_subparsers(dest="command", required=True)
    for name, handler in (("space", verify_space), ("fn", verify_fn)):
        p = _command(verify, name, handler, "source", "target", depth=True, table=True)
        p.add_argument("--all-depths", action="store_true",
                       help="Check every configured depth.")

    return parser


# ============================================================
# Entry point
# ============================================================
def _emit(result, args, out):
    if hasattr(result, "to_string"):
        out.write(result.to_string(index=False) + "\n")
        if args.out:
            save_report(_records(result), f"{args.family} {args.command}", args.out)
        return
    out.write(to_json(result) + "\n")
    if args.out:
        save_report(result, f"{args.family} {args.command}", args.out)


def main(argv=None, out=None):
    out = out or sys.stdout
    logging.basicConfig(level=settings.log_level(), format=settings.log_format(), stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        result = args.handler(args)
    except (UnsupportedDomain, UnsupportedFn) as e:
        logger.debug("unsupported input", exc_info=True)
        out.write(json.dumps({"error": type(e).__name__, "message": str(e)}, sort_keys=True) + "\n")
        return EXIT_UNSUPPORTED
    except (EmbEngineError, FileNotFoundError) as e:
        out.write(json.dumps({"error": type(e).__name__, "message": str(e)}, sort_keys=True) + "\n")
        return EXIT_INPUT
    _emit(result, args, out)
    return EXIT_OK
