"""Headless and served runs from the command line.

    spikeworks run --world box --duration 60 --seed 3 --out results/
    spikeworks run --config session.json --serve 127.0.0.1:8000

A headless run writes trajectory.csv, spikes.csv, spikes_rates.csv, channel
logs, and summary.json into the output directory and exits 0 only when the
run completed without collisions.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import threading
import time

from .config import ConfigError, SessionConfig, default_config, load_config
from .epuck import PRESETS
from .session import Session, SessionRunner, export_monitor, export_trajectory


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spikeworks",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a simulation session")
    run.add_argument("--config", help="session config file (JSON, versioned)")
    run.add_argument("--world", help="world preset name or descriptor JSON file")
    run.add_argument("--duration", type=float, default=60.0,
                     help="simulated seconds (default 60)")
    run.add_argument("--seed", type=int, help="RNG seed override")
    run.add_argument("--out", default="out", help="output directory (default ./out)")
    run.add_argument("--headless", action="store_true",
                     help="never start the control API")
    run.add_argument("--serve", metavar="ADDR:PORT",
                     help="serve the control API and UI while running")
    run.add_argument("--speed", type=float,
                     help="real-time factor; 0 = as fast as possible")
    return parser


def _resolve_world(arg: str):
    if arg in PRESETS:
        return arg
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return json.load(fh)
    raise ConfigError(f"--world {arg!r} is neither a preset {sorted(PRESETS)} "
                      f"nor a readable file")


def _build_config(args) -> SessionConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if args.world is not None:
        cfg.world = _resolve_world(args.world)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.speed is not None:
        if args.speed < 0:
            raise ConfigError("--speed must be >= 0")
        cfg.rt_factor = args.speed
    return cfg


def write_outputs(session: Session, out_dir: str) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    export_trajectory(session.trajectory, os.path.join(out_dir, "trajectory.csv"))
    export_monitor(session._recorder, session.network, out_dir, basename="spikes")
    summary = session.summary()
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def cli_run(args) -> int:
    try:
        cfg = _build_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    duration_ms = round(args.duration * 1000)
    log_dir = os.path.join(args.out, "logs")
    session = Session(cfg, log_dir=log_dir)

    if args.serve and not args.headless:
        return _run_served(session, args, duration_ms)

    t0 = time.perf_counter()
    session.run(duration_ms)
    elapsed = time.perf_counter() - t0
    summary = write_outputs(session, args.out)
    print(f"{session.world.name}: {duration_ms} ms simulated in {elapsed:.2f} s, "
          f"path {summary['path_length_m']:.3f} m, "
          f"collisions {summary['collisions']}, "
          f"reversals {summary['heading_reversals']}")
    return 0 if summary["collisions"] == 0 else 1


def _run_served(session: Session, args, duration_ms: int) -> int:
    import uvicorn

    from .server import create_app, find_ui_dir

    host, _, port = args.serve.rpartition(":")
    runner = SessionRunner(session)
    runner.start()
    app = create_app(runner, ui_dir=find_ui_dir())

    done = threading.Event()

    def watch():
        runner.submit("start")
        while not done.is_set():
            if runner.call(lambda s: s.sim_time) >= duration_ms:
                runner.submit("stop")
                runner.call(lambda s: s.finalize_run())
                summary = runner.call(lambda s: write_outputs(s, args.out))
                print(f"run finished: collisions {summary['collisions']}; "
                      f"API still serving, Ctrl-C to exit")
                return
            time.sleep(0.1)

    watcher = None
    if duration_ms > 0:
        watcher = threading.Thread(target=watch, daemon=True)
        watcher.start()
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port),
                    log_level="warning")
    except KeyboardInterrupt:
        pass
    finally:
        done.set()
        runner.shutdown()
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cli_run(args)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
