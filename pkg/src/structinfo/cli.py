"""Command line: ``run``, ``verify``, ``graph`` and ``smi``.

Exit codes: 0 success, 1 a property check failed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import harness, verify
from .agent import ConfigError
from .encoding_tree import one_layer_tree, optimize_two_layer, structural_entropy
from .env import EnvError
from .graph import GraphError, read_edge_list, read_joint

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="structinfo", description="Structural-information exploration experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="train agents for every method and seed, write CSV/JSON/plot")
    r.add_argument("--config", help="key = value config file")
    r.add_argument("--method", help="method or comma list: none, shannon-entropy, si2e")
    r.add_argument("--seeds", help="e.g. 0..9 or 0,3,5")
    r.add_argument("--out", help="output directory")
    r.add_argument("--env", help="figure1, a built-in map name or a map file path")
    r.add_argument("--total-steps", dest="total_steps")
    r.add_argument("--workers")
    r.add_argument("--plot", choices=("png", "svg", "none"))
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key; repeatable")

    v = sub.add_parser("verify", help="run the seeded theorem/property suite")
    v.add_argument("--only", action="append", metavar="GROUP",
                   help=f"check group(s) to run: {', '.join(verify.GROUPS)}; repeatable or comma list")
    v.add_argument("--inject-fault", dest="fault", help=argparse.SUPPRESS)

    g = sub.add_parser("graph", help="optimize an encoding tree for an edge-list fixture")
    g.add_argument("--graph-fixture", required=True, help="'i j w' lines, # comments")
    g.add_argument("--mode", choices=("community", "matching"), default="community")

    s = sub.add_parser("smi", help="structural and Shannon information for a joint table")
    s.add_argument("--joint", required=True, help="whitespace matrix file of joint probabilities")
    return p


def _cmd_run(args) -> int:
    overrides = {"methods": args.method, "seeds": args.seeds, "out": args.out, "env": args.env,
                 "total_steps": args.total_steps, "workers": args.workers, "plot": args.plot}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        overrides[key.strip()] = val
    cfg = harness.load_config(args.config, **overrides)
    t0 = time.perf_counter()
    summary = harness.run(cfg)
    for method, stats in summary["methods"].items():
        med = stats["episodes_to_threshold_median"]
        line = (f"{method:<16} episodes-to-{cfg.success_threshold:g}: "
                f"{'not reached' if med is None else f'{med:g}'}  "
                f"final success: {stats['final_success_rate_median']:.3f}")
        if "redundant_freq_median" in stats:
            line += f"  redundant visits: {stats['redundant_freq_median']:.4f}"
        print(line)
    print(f"wrote {cfg.out} in {time.perf_counter() - t0:.1f}s")
    return EXIT_OK


def _cmd_verify(args) -> int:
    only = [g.strip() for item in (args.only or []) for g in item.split(",") if g.strip()]
    try:
        results = verify.run_checks(only or None, args.fault)
    except KeyError as exc:
        print(f"structinfo verify: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    print(verify.format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _cmd_graph(args) -> int:
    graph = read_edge_list(args.graph_fixture)
    tree = optimize_two_layer(graph, args.mode)
    print(f"vertices {graph.vertex_count}  volume {graph.volume:.12g}")
    print(f"one-layer entropy {structural_entropy(graph, one_layer_tree(graph)):.12g}")
    print(f"{args.mode} entropy {structural_entropy(graph, tree):.12g}")
    print(tree.serialize(), end="")
    return EXIT_OK


def _cmd_smi(args) -> int:
    from .structural_mi import shannon, smi_by_definition, smi_closed_form, theorem32_report

    joint = read_joint(args.joint)
    sh = shannon(joint)
    rep = theorem32_report(joint)
    out = {"smi_closed_form": smi_closed_form(joint), "smi_by_definition": smi_by_definition(joint),
           "mutual_information": sh.mi, "joint_entropy": sh.hxy, "epsilon": rep.epsilon,
           "upper_bound": rep.rhs, "sandwich_holds": rep.holds}
    print(json.dumps(out, indent=2))
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "verify": _cmd_verify, "graph": _cmd_graph, "smi": _cmd_smi}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, EnvError, GraphError, OSError, ValueError) as exc:
        print(f"structinfo {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
