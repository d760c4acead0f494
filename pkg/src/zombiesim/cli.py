"""Command line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analytic import REFERENCE_ZOMBIE_WIN, ChainKernel, ChainSpec, chain_monte_carlo, extinction_probability
from .behavior import BehaviorTable, conditional_defeat_probability
from .config import ConfigError, RunConfig, load_config
from .engine import run as run_simulation
from .intervention import PolicyKind, ScenarioPolicy
from .montecarlo import BatchConfig, mix_seed, run_batch
from .report import frame_name, render_snapshots, save_snapshots, write_batch_csv, write_frame
from .worldmap import MapFormatError, Rect, SyntheticSpec, parse_cell, synthetic_world, write_raster

log = logging.getLogger("zombiesim")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _rect(text: str) -> Rect:
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected x0,y0,x1,y1, got {text!r}")
    return Rect(*parts)


def _cell(text: str):
    try:
        return parse_cell(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zombiesim", description="Agent-based zombie epidemic simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-map", help="write a synthetic map CSV")
    g.add_argument("--out", required=True, type=Path)
    g.add_argument("--preset", choices=["uusimaa"], help="bundled Uusimaa-like world instead of a SyntheticSpec")
    g.add_argument("--width", type=int, default=20)
    g.add_argument("--height", type=int, default=20)
    g.add_argument("--population", type=int, default=1000)
    g.add_argument("--placement", choices=["uniform", "hotspot"], default="uniform")
    g.add_argument("--hotspot", type=_cell)
    g.add_argument("--decay-km", type=float, default=2.0)
    g.add_argument("--quarantine", type=_rect, help="x0,y0,x1,y1 (half-open)")
    g.add_argument("--impassable", type=_rect, action="append", default=[], help="x0,y0,x1,y1; repeatable")
    g.add_argument("--origin", type=_cell)

    def add_run_overrides(sp):
        sp.add_argument("--config", type=Path, help="run config file (default: built-in Uusimaa, no intervention)")
        sp.add_argument("--scenario", type=PolicyKind.parse, help="none | strict | leaky")
        sp.add_argument("--max-steps", type=int)

    r = sub.add_parser("run", help="single simulation run")
    add_run_overrides(r)
    r.add_argument("--seed", type=int, help="stream seed (default: the batch seed of --run-index)")
    r.add_argument("--run-index", type=int, default=0, help="reproduce run N of a batch with the config's base seed")
    r.add_argument("--frames", type=Path, help="write one PPM frame per step into this directory")
    r.add_argument("--snapshots", type=Path, help="save per-step cell occupancy (.npz) for `render`")
    r.add_argument("--trajectory", action="store_true", help="also print the per-step counts")
    r.add_argument("--json", action="store_true")

    b = sub.add_parser("batch", help="Monte Carlo batch -> runs/trajectories/histograms CSV")
    add_run_overrides(b)
    b.add_argument("--n-runs", type=int)
    b.add_argument("--base-seed", type=int)
    b.add_argument("--parallel", type=int, help="max parallel runs")
    b.add_argument("--out", type=Path, help="output directory")

    a = sub.add_parser("analyze", help="analytic calculations")
    asub = a.add_subparsers(dest="analysis", required=True, parser_class=_Parser)
    c = asub.add_parser("chain", help="extinction probability of the early outbreak")
    c.add_argument("--q", type=float, help="conditional zombie-defeat probability (default: from behaviour table)")
    c.add_argument("--cap", type=int, default=5)
    c.add_argument("--trials", type=int, default=0, help="also run a Monte Carlo check with this many trials")
    c.add_argument("--seed", type=int, default=0)

    rd = sub.add_parser("render", help="render a snapshot archive to PPM frames")
    rd.add_argument("--snapshots", type=Path, required=True)
    rd.add_argument("--out", type=Path, required=True)
    return p


def _load_cfg(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.scenario is not None:
        cfg = replace(cfg, policy=replace(cfg.policy, kind=args.scenario))
    if args.max_steps is not None:
        if args.max_steps < 1:
            raise ConfigError("--max-steps must be >= 1")
        cfg = replace(cfg, max_steps=args.max_steps)
    return cfg


def cmd_gen_map(args) -> int:
    if args.preset == "uusimaa":
        from .fixtures import uusimaa_like_world

        world = uusimaa_like_world()
    else:
        try:
            spec = SyntheticSpec(
                width=args.width, height=args.height, total_population=args.population,
                placement=args.placement, hotspot=args.hotspot, decay_km=args.decay_km,
                quarantine=args.quarantine, impassable=tuple(args.impassable), origin=args.origin,
            )
            world = synthetic_world(spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    write_raster(world, args.out)
    print(f"wrote {args.out}: {world.width}x{world.height}, {int(world.passable.sum())} passable cells, "
          f"population {world.total_population}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load_cfg(args)
    world = cfg.load_world()
    seed = args.seed if args.seed is not None else mix_seed(cfg.base_seed, args.run_index)

    hook = None
    snaps: list = []
    if args.frames or args.snapshots:
        if args.frames:
            args.frames.mkdir(parents=True, exist_ok=True)

        def hook(state):
            h, z = state.occupancy(world)
            if args.frames:
                write_frame(args.frames / frame_name(state.step), h, z, world)
            if args.snapshots:
                snaps.append((state.step, h, z))

    out = run_simulation(
        world, cfg.policy, cfg.behavior, cfg.movement, seed=seed, max_steps=cfg.max_steps,
        incubation_steps=cfg.incubation_steps, on_step=hook,
    )
    if args.snapshots:
        save_snapshots(args.snapshots, world, [s[0] for s in snaps], [s[1] for s in snaps], [s[2] for s in snaps])

    record = {
        "seed": seed,
        "winner": out.winner.value,
        "end_step": out.end_step,
        "peak_zombies": out.peak_zombies,
        "first_border_step": out.first_border_step,
    }
    if args.json:
        if args.trajectory:
            record["trajectory"] = out.trajectory.tolist()
        print(json.dumps(record))
    else:
        for k, v in record.items():
            print(f"{k}: {'' if v is None else v}")
        if args.trajectory:
            print("step,healthy,incubating,zombies,dead_zombies")
            for row in out.trajectory.tolist():
                print(",".join(map(str, row)))
    return EXIT_OK


def cmd_batch(args) -> int:
    cfg = _load_cfg(args)
    if args.n_runs is not None:
        cfg = replace(cfg, n_runs=args.n_runs)
    if args.base_seed is not None:
        cfg = replace(cfg, base_seed=args.base_seed)
    if args.parallel is not None:
        cfg = replace(cfg, max_parallel_runs=args.parallel)
    out_dir = args.out or Path(cfg.output_dir)
    try:
        batch = BatchConfig(
            world=cfg.load_world(), n_runs=cfg.n_runs, base_seed=cfg.base_seed, policy=cfg.policy,
            behavior=cfg.behavior, movement=cfg.movement, max_steps=cfg.max_steps,
            incubation_steps=cfg.incubation_steps, max_parallel_runs=cfg.max_parallel_runs,
            trajectory_stride=cfg.trajectory_stride,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    summary = run_batch(batch)
    paths = write_batch_csv(summary, out_dir)
    counts = {w.value: n for w, n in summary.counts.items()}
    print(json.dumps({"n_runs": summary.n_runs, "counts": counts, "files": [str(p) for p in paths]}))
    return EXIT_OK


def cmd_analyze_chain(args) -> int:
    q = args.q
    if q is None:
        q = conditional_defeat_probability(BehaviorTable())
    try:
        specs = [ChainSpec(q, args.cap, k) for k in ChainKernel]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(f"q = {q:.6f}, cap = {args.cap}")
    print(f"{'kernel':<18}{'extinction':>12}{'zombie win':>12}" + (f"{'monte carlo':>14}" if args.trials else ""))
    for spec in specs:
        res = extinction_probability(spec)
        line = f"{spec.kernel.value:<18}{res.extinction_probability:>12.6f}{res.zombie_win_probability:>12.6f}"
        if args.trials:
            mc = chain_monte_carlo(spec, args.trials, args.seed)
            line += f"{1.0 - mc:>14.6f}"
        print(line)
    print(f"{'published':<18}{1.0 - REFERENCE_ZOMBIE_WIN:>12.6f}{REFERENCE_ZOMBIE_WIN:>12.6f}")
    return EXIT_OK


def cmd_render(args) -> int:
    if not args.snapshots.exists():
        raise ConfigError(f"snapshot file not found: {args.snapshots}")
    paths = render_snapshots(args.snapshots, args.out)
    print(f"wrote {len(paths)} frames to {args.out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    handlers = {
        "gen-map": cmd_gen_map,
        "run": cmd_run,
        "batch": cmd_batch,
        "analyze": cmd_analyze_chain,
        "render": cmd_render,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, MapFormatError) as exc:
        print(f"zombiesim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - top-level reporter
        log.debug("runtime failure", exc_info=True)
        print(f"zombiesim: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
