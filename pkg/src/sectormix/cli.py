"""Batch command-line front end.

Data goes to stdout (CSV/JSON), logs to stderr.  Exit codes: 0 success,
1 invariant failure (verify), 2 config error, 3 I/O error, 4 data error.
The ED4_SEED environment variable overrides --seed when both are given.
"""

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
from PIL import Image

from . import advscm, clockmix, pipeline, shuffle, verify
from .errors import ConfigError, DataError, DomainError, InputOutputError
from .geometry import default_center

log = logging.getLogger("sectormix")


def _parse_int_set(text, flag):
    try:
        return tuple(sorted({int(part) for part in text.split(",") if part.strip()}))
    except ValueError as exc:
        raise ConfigError(f"{flag} expects comma-separated integers, got {text!r}") from exc


def _resolve_seed(args):
    env = os.environ.get("ED4_SEED")
    if env is not None:
        if getattr(args, "seed", None) is not None:
            log.warning("both --seed and ED4_SEED are set; ED4_SEED wins")
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"ED4_SEED must be an integer, got {env!r}") from exc
    return args.seed if args.seed is not None else 0


def _build_config(args):
    if args.config:
        config = pipeline.config_from_file(args.config)
    else:
        config = pipeline.AugConfig()
    overrides = {"seed": _resolve_seed(args)}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.p_mix is not None:
        overrides["p_mix"] = args.p_mix
    if args.mix_counts is not None:
        overrides["mix_count_set"] = _parse_int_set(args.mix_counts, "--mix-counts")
    if args.angle_min is not None or args.angle_max is not None:
        lo = args.angle_min if args.angle_min is not None else config.angle_range[0]
        hi = args.angle_max if args.angle_max is not None else config.angle_range[1]
        overrides["angle_range"] = (lo, hi)
    if args.min_sector is not None:
        overrides["min_sector"] = args.min_sector
    if args.granularities is not None:
        overrides["granularities"] = _parse_int_set(args.granularities, "--granularities")
    if args.label_mode is not None:
        overrides["label_mode"] = args.label_mode
    if args.batch_size is not None:
        overrides["batch_size"] = args.batch_size
    if args.epsilon is not None:
        overrides["epsilon"] = args.epsilon
    if args.size is not None:
        overrides["image_size"] = args.size
    if args.threads is not None:
        overrides["threads"] = args.threads
    try:
        return replace(config, **overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_augment(args):
    config = _build_config(args)
    if args.manifest is None:
        raise ConfigError("augment requires --manifest")
    if args.out is None and args.config is None:
        raise ConfigError("augment requires --out (or an output_dir in --config)")
    started = time.perf_counter()
    records = pipeline.load_manifest(args.manifest)
    manifest_path, summary = pipeline.run_augment(records, config)
    summary["manifest"] = str(manifest_path)
    summary["seconds"] = round(time.perf_counter() - started, 3)
    print(json.dumps(summary))
    return 0


def cmd_shuffle(args):
    config = _build_config(args)
    if args.manifest is None:
        raise ConfigError("shuffle requires --manifest")
    if args.out is None:
        raise ConfigError("shuffle requires --out")
    records = pipeline.load_manifest(args.manifest)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = 0
    with open(out_dir / "shuffled.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for idx, rec in enumerate(records):
            rng = pipeline.derive_stream(config.seed, rec.id)
            pixels = pipeline.load_image(rec.path, config.image_size)
            shuffled, perm = shuffle.random_shuffle(rng, pixels, config.granularities)
            rel = f"{idx:05d}_{pipeline.safe_name(rec.id)}.png"
            Image.fromarray(shuffled).save(out_dir / rel, format="PNG")
            fh.write(json.dumps({
                "id": rec.id,
                "path": rel,
                "g": perm.g,
                "mapping": perm.mapping.tolist(),
            }) + "\n")
            rows += 1
    print(json.dumps({"shuffled": rows, "out": str(out_dir)}))
    return 0


def cmd_adv_demo(args):
    seed = _resolve_seed(args)
    rounds = args.rounds if args.rounds is not None else 200
    if rounds < 0:
        raise ConfigError(f"--rounds must be >= 0, got {rounds}")
    seeds = args.seeds if args.seeds is not None else 1
    if seeds < 1:
        raise ConfigError(f"--seeds must be >= 1, got {seeds}")
    granularities = (
        _parse_int_set(args.granularities, "--granularities")
        if args.granularities is not None
        else (2,)
    )
    size = args.size if args.size is not None else 64
    epsilon = args.epsilon if args.epsilon is not None else 0.02
    batch_size = args.batch_size if args.batch_size is not None else 8
    for g in granularities:
        if size % g:
            raise ConfigError(f"--size {size} not divisible by granularity {g}")
    print("seed,round,g,d,p,grad_norm")
    if rounds == 0:
        return 0
    summaries = []
    for k in range(seeds):
        rows, summary = advscm.run_adv_demo(
            seed + k,
            rounds,
            size=size,
            granularities=granularities,
            epsilon=epsilon,
            batch_size=batch_size,
        )
        for row in rows:
            print(f"{seed + k},{row['round']},{row['g']},{row['d']:.6f},"
                  f"{row['p']:.6f},{row['grad_norm']:.6f}")
        summaries.append(summary)
    wins = sum(1 for s in summaries if s["advantage"] > 0)
    adv = float(np.mean([s["adv_mean_d"] for s in summaries]))
    rand = float(np.mean([s["rand_mean_d"] for s in summaries]))
    print(f"summary,adv_mean_d={adv:.6f},rand_mean_d={rand:.6f},"
          f"wins={wins}/{len(summaries)},advantage={adv - rand:.6f}")
    return 0


def cmd_verify(args):
    names = None
    if args.filter:
        unknown = set(args.filter) - set(verify.SUITES)
        if unknown:
            raise ConfigError(f"unknown suites: {sorted(unknown)}; "
                              f"available: {sorted(verify.SUITES)}")
        names = set(args.filter)
    rows, all_ok = verify.run_suites(names, seed=_resolve_seed(args))
    width = max(len(f"{suite}: {check}") for suite, check, _, _ in rows)
    for suite, check, ok, detail in rows:
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {f'{suite}: {check}'.ljust(width)}  {detail}")
    print(f"{'OK' if all_ok else 'FAILED'}  {len(rows)} checks")
    return 0 if all_ok else 1


def _bench_op(fn, payloads, seconds=0.8):
    n, elapsed = 0, 0.0
    start = time.perf_counter()
    while elapsed < seconds:
        fn(payloads[n % len(payloads)])
        n += 1
        elapsed = time.perf_counter() - start
    return n / elapsed


def _bench_parallel(fn, payloads, threads, seconds=0.8):
    counter = [0] * threads

    def worker(slot):
        start = time.perf_counter()
        k = 0
        while time.perf_counter() - start < seconds:
            fn(payloads[k % len(payloads)])
            k += 1
        counter[slot] = k

    with ThreadPoolExecutor(max_workers=threads) as ex:
        list(ex.map(worker, range(threads)))
    return sum(counter) / seconds


def cmd_bench(args):
    size = args.size if args.size is not None else 256
    threads = args.threads if args.threads is not None else 4
    rng = np.random.default_rng(_resolve_seed(args))
    a = clockmix.LabeledImage(rng.integers(0, 256, (size, size, 3), dtype=np.uint8), 0)
    b = clockmix.LabeledImage(rng.integers(0, 256, (size, size, 3), dtype=np.uint8), 1)
    center = default_center(size, size)
    mix_payloads = [(float(r), float(rb)) for r, rb in
                    zip(rng.uniform(45, 315, 32), rng.uniform(0, 360, 32))]
    clockmix.clockmix_pair(a, b, 90.0, 0.0, center)  # warm the angle cache

    def run_mix(payload):
        rho, rho_base = payload
        clockmix.clockmix_pair(a, b, rho, rho_base, center)

    g = max(gv for gv in (2, 4, 8) if size % gv == 0)
    perms = [shuffle.GridPermutation(g, rng.permutation(g * g)) for _ in range(16)]

    def run_shuffle(perm):
        shuffle.apply_permutation(a.pixels, perm)

    report = {
        "size": size,
        "threads": threads,
        "clockmix_pair_ops_per_sec": round(_bench_op(run_mix, mix_payloads), 1),
        "apply_permutation_ops_per_sec": round(_bench_op(run_shuffle, perms), 1),
    }
    if threads > 1:
        report["clockmix_pair_parallel_ops_per_sec"] = round(
            _bench_parallel(run_mix, mix_payloads, threads), 1)
        report["apply_permutation_parallel_ops_per_sec"] = round(
            _bench_parallel(run_shuffle, perms, threads), 1)
    print(json.dumps(report))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sectormix",
        description="Deterministic sector-mix augmentation over manifest datasets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--config", default=None, help="TOML config file")
        p.add_argument("--manifest", default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--p-mix", dest="p_mix", type=float, default=None)
        p.add_argument("--mix-counts", dest="mix_counts", default=None)
        p.add_argument("--angle-min", dest="angle_min", type=float, default=None)
        p.add_argument("--angle-max", dest="angle_max", type=float, default=None)
        p.add_argument("--min-sector", dest="min_sector", type=float, default=None)
        p.add_argument("--granularities", default=None)
        p.add_argument("--label-mode", dest="label_mode", default=None,
                       choices=("hard", "soft"))
        p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--size", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("augment", help="augment a manifest dataset")
    add_common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("shuffle", help="randomly patch-shuffle a manifest dataset")
    add_common(p)
    p.set_defaults(func=cmd_shuffle)

    p = sub.add_parser("adv-demo", help="run adversarial consistency rounds on toy data")
    add_common(p)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--seeds", type=int, default=None)
    p.set_defaults(func=cmd_adv_demo)

    p = sub.add_parser("verify", help="run module invariant suites")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--filter", action="append", default=None,
                   help="suite name; repeatable")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="measure mixing and shuffle throughput")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except InputOutputError as exc:
        print(str(exc), file=sys.stderr)
        return 3
    except (DataError, DomainError) as exc:
        print(str(exc), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
