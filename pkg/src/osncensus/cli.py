"""Command-line entry point.

Exit codes: 0 success, 1 input error, 2 internal error.
"""
import argparse
import csv
import json
import logging
import math
import sys

from . import __version__, compare as compare_mod, crawler, demographics, graphmetrics, osn, plot, synth, ties
from .model import load_edges, load_members, save_edges, save_members

log = logging.getLogger("osncensus")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _load(users, friends=None):
    members = load_members(users, mode="lenient")
    edges = load_edges(friends) if friends else None
    return members, edges


# --------------------------------------------------------------- commands

def cmd_generate(args):
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = synth.SynthConfig.from_json(fh.read())
    else:
        model = (synth.BAModel(m=args.m) if args.model == "ba"
                 else synth.ERModel(mean_degree=args.mean_degree))
        mixing = None
        if args.bias is not None or args.age_gap_scale is not None:
            mixing = synth.Mixing(
                gender_heterophily_bias=0.5 if args.bias is None else args.bias,
                age_gap_scale=math.inf if args.age_gap_scale is None else args.age_gap_scale,
                sweeps=args.sweeps)
        config = synth.SynthConfig(n=args.n, model=model, gender_split=args.gender_split,
                                   locales={args.locale: 1.0}, mixing=mixing, seed=args.seed)
    members, edges = synth.generate(config)
    save_members(members, args.out_users)
    save_edges(edges, args.out_friends)
    if args.dump_config:
        _emit(config.to_json(), args.dump_config)
    log.info("generated %d members, %d edges", len(members), len(edges))


def cmd_serve(args):
    members, edges = _load(args.members, args.edges)
    server = osn.OSNServer(osn.Snapshot(members, edges, page_size=args.page_size),
                           host=args.host, port=args.port)
    print(f"serving {len(members)} members on {server.url}", file=sys.stderr, flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def cmd_crawl(args):
    seeds = () if args.seedless else tuple(args.seed_account or ())
    try:
        members, edges, stats = crawler.crawl(args.endpoint, args.locale, workers=args.workers,
                                              policy=args.policy, seeds=seeds)
    except crawler.CrawlError as exc:
        raise InputError(str(exc)) from exc
    save_members(members, args.out_users)
    save_edges(edges, args.out_friends)
    _emit(stats.to_json(), args.stats)


def cmd_demographics(args):
    members, _ = _load(args.users)
    strict = members.strict()
    if len(strict) < len(members):
        log.warning("excluded %d records with ages outside [18, 65]", len(members) - len(strict))
    report = demographics.demographic_report(strict, dims=args.dims)
    _emit(report.to_json(), args.out)
    if args.csv:
        _emit(report.to_csv(), args.csv)


def cmd_ties(args):
    members, edges = _load(args.users, args.friends)
    thresholds = sorted({5, 10, args.gap_threshold})
    report = ties.mixing_report(members, edges, gap_thresholds=thresholds)
    _emit(report.to_json(), args.out)
    if args.csv:
        _emit(report.histogram_csv(), args.csv)


def cmd_graph(args):
    members, edges = _load(args.users, args.friends)
    report = graphmetrics.graph_metrics(members, edges, scope=args.scope,
                                        path_mode=args.path_mode, sources=args.sources,
                                        seed=args.seed, exact_cap=args.exact_cap,
                                        min_count=args.min_count)
    _emit(report.to_json(), args.out)
    if args.degree_csv:
        _emit(report.degree_csv(), args.degree_csv)
    if args.loglog_csv:
        _emit(report.loglog_csv(), args.loglog_csv)


def cmd_compare(args):
    a = compare_mod.load_dataset(args.a_label, args.a_users, args.a_friends)
    b = compare_mod.load_dataset(args.b_label, args.b_users, args.b_friends)
    config = compare_mod.AnalysisConfig(scope=args.scope, path_mode=args.path_mode,
                                        sources=args.sources, seed=args.seed,
                                        exact_cap=args.exact_cap, min_count=args.min_count)
    _emit(compare_mod.compare(a, b, config).to_json(), args.out)


def _read_histogram(path):
    hist = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            hist[int(row["degree"])] = int(row["count"])
    return hist


def cmd_plot(args):
    if args.histogram:
        hist = _read_histogram(args.histogram)
    elif args.users and args.friends:
        members, edges = _load(args.users, args.friends)
        hist = graphmetrics.degree_histogram(graphmetrics.build_graph(members, edges))
    else:
        raise InputError("plot needs --histogram or both --users and --friends")
    k, c = graphmetrics.loglog_points(hist)
    fit = None
    if not args.no_fit:
        try:
            fit = graphmetrics.fit_power_law(hist, min_count=args.min_count)
        except ValueError as exc:
            log.warning("no regression line: %s", exc)
    svg = plot.render_loglog_svg(list(zip(k.tolist(), c.tolist())), fit, title=args.title)
    _emit(svg, args.out)


# ----------------------------------------------------------------- parser

def _graph_options(p):
    p.add_argument("--scope", choices=("members-only", "all-endpoints"), default="members-only")
    p.add_argument("--path-mode", choices=("auto", "exact", "sampled"), default="auto")
    p.add_argument("--sources", type=int, default=graphmetrics.DEFAULT_SOURCES,
                   help="BFS sources in sampled mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-cap", type=int, default=graphmetrics.EXACT_CAP)
    p.add_argument("--min-count", type=int, default=graphmetrics.FIT_MIN_COUNT,
                   help="smallest bin count kept in the power-law fit")


def build_parser():
    parser = _Parser(prog="osncensus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="synthesize a population and friendship graph")
    p.add_argument("--config", help="SynthConfig JSON file (overrides the flags below)")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--model", choices=("ba", "er"), default="ba")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--mean-degree", type=float, default=10.0)
    p.add_argument("--gender-split", type=float, default=0.513)
    p.add_argument("--bias", type=float, help="gender heterophily bias in [0, 1]")
    p.add_argument("--age-gap-scale", type=float)
    p.add_argument("--sweeps", type=float, default=10.0)
    p.add_argument("--locale", default="laguna")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-users", required=True)
    p.add_argument("--out-friends", required=True)
    p.add_argument("--dump-config")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("serve", help="serve a snapshot as the mock OSN")
    p.add_argument("--members", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--page-size", type=int, default=osn.DEFAULT_PAGE_SIZE)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("crawl", help="harvest member and friendship stores")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--locale", required=True)
    p.add_argument("--workers", type=int, default=16)
    p.add_argument("--policy", choices=tuple(crawler.POLICIES), default="locale-only")
    p.add_argument("--out-users", required=True)
    p.add_argument("--out-friends", required=True)
    p.add_argument("--seedless", action="store_true",
                   help="start from the locale search only (ignore --seed-account)")
    p.add_argument("--seed-account", type=int, action="append",
                   help="extra account id to expand alongside the search results")
    p.add_argument("--stats", help="write crawl stats JSON here instead of stdout")
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("demographics", help="counts and shares by gender/age/status")
    p.add_argument("--users", required=True)
    p.add_argument("--dims", default="gender,age,status")
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_demographics)

    p = sub.add_parser("ties", help="friendship mixing by gender, age gap and status")
    p.add_argument("--users", required=True)
    p.add_argument("--friends", required=True)
    p.add_argument("--gap-threshold", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("--csv", help="age-gap histogram CSV")
    p.set_defaults(func=cmd_ties)

    p = sub.add_parser("graph", help="degree, path and power-law metrics")
    p.add_argument("--users", required=True)
    p.add_argument("--friends", required=True)
    _graph_options(p)
    p.add_argument("--out")
    p.add_argument("--degree-csv")
    p.add_argument("--loglog-csv")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("compare", help="analyse two communities side by side")
    for side in ("a", "b"):
        p.add_argument(f"--{side}-users", required=True)
        p.add_argument(f"--{side}-friends", required=True)
        p.add_argument(f"--{side}-label", default=side)
    _graph_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="log-log degree distribution as SVG")
    p.add_argument("--users")
    p.add_argument("--friends")
    p.add_argument("--histogram", help="degree,count CSV (as written by graph --degree-csv)")
    p.add_argument("--min-count", type=int, default=graphmetrics.FIT_MIN_COUNT)
    p.add_argument("--no-fit", action="store_true")
    p.add_argument("--title", default="Degree distribution")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (InputError, OSError, ValueError, KeyError, json.JSONDecodeError,
            compare_mod.DatasetError) as exc:
        print(f"osncensus {args.command}: {exc}", file=sys.stderr)
        return 1
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
