"""Command-line pipeline with deterministic, resumable stages.

Each stage reads CSV artifacts, writes its own artifact files plus a
key=value report, and prints a one-line summary. Re-running a stage with
identical config and inputs reproduces byte-identical artifacts.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, fields

import numpy as np
import pandas as pd

from . import entropy as entropy_mod
from . import loadshare as ls
from . import localize as loc
from . import odmatrix as od
from . import profiling as prof
from .core import UserSegment, haversine_km
from .exceptions import DataError, UsageError
from .ingest import StreamSet, canonicalize_streams, load_dataset, study_area_filter
from .synth import WorldConfig, generate_world, simulate_traces, write_world

ALL_STAGES = (
    "generate",
    "ingest",
    "filter",
    "profile",
    "loadshare",
    "localize",
    "odmatrix",
    "evaluate",
)


@dataclass
class RunConfig:
    out_dir: str = "out"
    seed: int = 0
    stages: str = ",".join(ALL_STAGES)
    # input paths; empty string means "use the generated default under out_dir"
    cdr_path: str = ""
    towers_path: str = ""
    gps_path: str = ""
    labels_path: str = ""
    regions_path: str = ""
    districts_path: str = ""
    speeds_path: str = ""
    ref_od_path: str = ""
    truth_anchors_path: str = ""
    # synthetic world knobs
    world_users: int = 50
    world_days: int = 7
    world_p_ls: float = 0.2
    world_gps_fraction: float = 1.0
    world_district_cols: int = 3
    world_call_rate_scale: float = 1.0
    # shared parameters
    tz_offset_min: int = 0
    holidays: str = ""  # comma-separated ISO dates
    min_fraction: float = 0.8
    keep_percentile: float = 80.0
    entropy_side: str = "low"
    default_threshold_kmph: float = 120.0
    eps_m: float = 1000.0
    min_pts: float = 3.0
    kmeans_k: int = 1
    weight_grid_step: float = 0.1
    df_mode: str = "cells"
    distance_mode: str = "haversine"
    train_fraction: float = 0.5
    workers: int = 1  # reserved; never affects results


def _coerce(raw: str, target_type):
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw


def parse_config_file(path: str) -> dict[str, str]:
    """Plain-text config: one `key = value` per line, `#` starts a comment."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def build_config(config_path: str | None, overrides: dict[str, str]) -> RunConfig:
    cfg = RunConfig()
    known = {f.name: f.type for f in fields(RunConfig)}
    merged: dict[str, str] = {}
    if config_path:
        merged.update(parse_config_file(config_path))
    merged.update(overrides)
    for key, raw in merged.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
        ftype = type(getattr(cfg, key))
        try:
            setattr(cfg, key, _coerce(raw, ftype))
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {raw!r}") from exc
    return cfg


# ---------------------------------------------------------------------------
# Paths and small I/O helpers
# ---------------------------------------------------------------------------

def _world_path(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.out_dir, "world", f"{name}.csv")


def _artifact(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.out_dir, name)


def _input(cfg: RunConfig, explicit: str, default_world_name: str) -> str:
    return explicit if explicit else _world_path(cfg, default_world_name)


def _iso(ts: np.ndarray) -> np.ndarray:
    return np.datetime_as_string(np.asarray(ts, dtype=np.int64).astype("datetime64[s]"))


def _write_kv(path: str, pairs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in pairs:
            fh.write(f"{key} = {value}\n")


def _read_kv(path: str) -> dict[str, str]:
    return parse_config_file(path)


def _holiday_set(cfg: RunConfig) -> frozenset[int]:
    dates = [d.strip() for d in cfg.holidays.split(",") if d.strip()]
    return loc.holiday_day_indices(dates)


def _load_streams(cfg: RunConfig, cdr_path: str) -> StreamSet:
    towers_path = _input(cfg, cfg.towers_path, "towers")
    regions_path = _input(cfg, cfg.regions_path, "regions")
    registry, _ = load_dataset(towers_path, "towers")
    grid, _ = load_dataset(regions_path, "regions")
    registry.attach_regions(grid)
    cdr, _ = load_dataset(cdr_path, "cdr")
    streams, _ = canonicalize_streams(cdr, registry)
    return streams


def _kept_subset(cfg: RunConfig, streams: StreamSet) -> StreamSet:
    kept_path = _artifact(cfg, "kept_users.csv")
    if not os.path.exists(kept_path):
        return streams
    kept = set(pd.read_csv(kept_path, dtype=str)["user_id"])
    mask = np.array([u in kept for u in streams.user_ids], dtype=bool)
    return streams.subset_users(mask)


def _write_flags_csv(path: str, streams: StreamSet, flags: np.ndarray) -> None:
    pd.DataFrame(
        {
            "user_id": streams.user_ids[streams.record_user],
            "timestamp_iso8601": _iso(streams.timestamps),
            "cell_id": streams.registry.cell_ids[streams.cell_index],
            "flag": np.asarray(flags).astype(int),
        }
    ).to_csv(path, index=False)


def _load_flags_csv(path: str, streams: StreamSet) -> np.ndarray:
    df = pd.read_csv(path, dtype={"user_id": str, "cell_id": str})
    if len(df) != streams.n_records:
        raise DataError(f"{path}: {len(df)} rows do not match {streams.n_records} records")
    users = streams.user_ids[streams.record_user].astype(object)
    cells = streams.registry.cell_ids[streams.cell_index].astype(object)
    if not (
        np.array_equal(df["user_id"].to_numpy(dtype=object), users)
        and np.array_equal(df["cell_id"].to_numpy(dtype=object), cells)
    ):
        raise DataError(f"{path}: rows are not aligned with the canonical streams")
    return df["flag"].to_numpy(dtype=np.int64) != 0


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def stage_generate(cfg: RunConfig) -> str:
    wc = WorldConfig(
        seed=cfg.seed,
        n_users=cfg.world_users,
        days=cfg.world_days,
        p_ls=cfg.world_p_ls,
        gps_user_fraction=cfg.world_gps_fraction,
        district_cols=cfg.world_district_cols,
        call_rate_scale=cfg.world_call_rate_scale,
        tz_offset_min=cfg.tz_offset_min,
    )
    world = generate_world(wc)
    traces = simulate_traces(world)
    write_world(world, traces, os.path.join(cfg.out_dir, "world"))
    return (
        f"generate: users={cfg.world_users} days={cfg.world_days}"
        f" records={traces.n_records} towers={len(world.registry)}"
    )


def stage_ingest(cfg: RunConfig) -> str:
    towers_path = _input(cfg, cfg.towers_path, "towers")
    regions_path = _input(cfg, cfg.regions_path, "regions")
    cdr_path = _input(cfg, cfg.cdr_path, "cdr")
    registry, towers_rep = load_dataset(towers_path, "towers")
    grid, _ = load_dataset(regions_path, "regions")
    outside = registry.attach_regions(grid)
    cdr, cdr_rep = load_dataset(cdr_path, "cdr")
    streams, canon = canonicalize_streams(cdr, registry)
    filtered, area_rep = study_area_filter(streams, cfg.min_fraction)

    os.makedirs(cfg.out_dir, exist_ok=True)
    pd.DataFrame(
        {
            "user_id": filtered.user_ids[filtered.record_user],
            "timestamp_iso8601": _iso(filtered.timestamps),
            "cell_id": filtered.registry.cell_ids[filtered.cell_index],
            "duration_s": filtered.durations,
        }
    ).to_csv(_artifact(cfg, "clean_cdr.csv"), index=False)
    _write_kv(
        _artifact(cfg, "ingest_report.txt"),
        [
            ("cdr_rows", cdr_rep.n_rows),
            ("cdr_rejected", len(cdr_rep.rejected)),
            ("towers_loaded", towers_rep.n_loaded),
            ("towers_rejected", len(towers_rep.rejected)),
            ("towers_outside_regions", len(outside)),
            ("duplicates_removed", canon.duplicates_removed),
            ("unknown_cells", canon.unknown_cells),
            ("users_retained", area_rep.users_in),
            ("users_dropped", area_rep.users_dropped),
            ("records_retained", filtered.n_records),
            ("records_dropped_outside", area_rep.records_dropped),
        ],
    )
    return (
        f"ingest: records={filtered.n_records} users={filtered.n_users}"
        f" rejected={len(cdr_rep.rejected)} dup={canon.duplicates_removed}"
    )


def stage_filter(cfg: RunConfig) -> str:
    streams = _load_streams(cfg, _artifact(cfg, "clean_cdr.csv"))
    kept, rep, entropies = entropy_mod.filter_by_entropy(
        streams, cfg.keep_percentile, cfg.entropy_side
    )
    keep_mask = (
        entropies <= rep.threshold if cfg.entropy_side == "low" else entropies >= rep.threshold
    )
    pd.DataFrame(
        {
            "user_id": streams.user_ids[keep_mask],
            "entropy_bits": np.round(entropies[keep_mask], 9),
        }
    ).to_csv(_artifact(cfg, "kept_users.csv"), index=False)
    _write_kv(
        _artifact(cfg, "entropy_report.txt"),
        [
            ("threshold_bits", f"{rep.threshold:.9f}"),
            ("retained", rep.retained),
            ("dropped", rep.dropped),
        ],
    )
    return f"filter: {rep.summary()}"


def stage_profile(cfg: RunConfig) -> str:
    streams = _kept_subset(cfg, _load_streams(cfg, _artifact(cfg, "clean_cdr.csv")))
    labels_path = _input(cfg, cfg.labels_path, "labels")
    labels, _ = load_dataset(labels_path, "labels")
    X = prof.extract_features_all(streams, cfg.tz_offset_min, cfg.distance_mode)

    labeled_idx = [i for i, u in enumerate(streams.user_ids) if u in labels]
    if len(labeled_idx) < 2:
        raise DataError("profile: need at least two labeled users")
    y = [labels[streams.user_ids[i]] for i in labeled_idx]
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(len(labeled_idx))
    n_train = max(2, int(round(cfg.train_fraction * len(labeled_idx))))
    train = [labeled_idx[i] for i in perm[:n_train]]
    test = [labeled_idx[i] for i in perm[n_train:]]

    model = prof.SegmentClassifier(seed=cfg.seed)
    model.fit(X[train], [labels[streams.user_ids[i]] for i in train])
    model.save(_artifact(cfg, "model.txt"))

    eval_idx = test if test else train
    report = prof.classification_report(
        [labels[streams.user_ids[i]] for i in eval_idx], model.predict(X[eval_idx])
    )
    with open(_artifact(cfg, "profiling_report.csv"), "w", encoding="utf-8") as fh:
        for line in report.csv_rows():
            fh.write(line + "\n")

    predicted = model.predict(X)
    pd.DataFrame(
        {"user_id": streams.user_ids, "segment": [s.value for s in predicted]}
    ).to_csv(_artifact(cfg, "segments.csv"), index=False)
    return (
        f"profile: trained on {len(train)} users, macro_f1={report.macro_f1:.3f}"
        f" on {len(eval_idx)} eval users"
    )


def stage_loadshare(cfg: RunConfig) -> str:
    streams = _kept_subset(cfg, _load_streams(cfg, _artifact(cfg, "clean_cdr.csv")))
    gps_path = _input(cfg, cfg.gps_path, "gps")
    speeds_path = _input(cfg, cfg.speeds_path, "speeds")
    labels = None
    if os.path.exists(gps_path):
        gps, _ = load_dataset(gps_path, "gps")
        streams.attach_gps(gps)
        labels = ls.label_ground_truth(streams)
        table, _ = ls.calibrate_speed_table(
            streams,
            labels,
            default_threshold=cfg.default_threshold_kmph,
            mode=cfg.distance_mode,
            tz_offset_min=cfg.tz_offset_min,
        )
        source = "calibrated"
    elif os.path.exists(speeds_path):
        priors, _ = load_dataset(speeds_path, "speeds")
        table = ls.SpeedTable.from_priors(priors, cfg.default_threshold_kmph)
        source = "priors"
    else:
        table = ls.SpeedTable(default_threshold=cfg.default_threshold_kmph)
        source = "default"

    adaptive = ls.detect_adaptive(streams, table, cfg.distance_mode, cfg.tz_offset_min)
    fixed = ls.detect_fixed(streams, cfg.default_threshold_kmph, cfg.distance_mode)

    with open(_artifact(cfg, "speed_table.csv"), "w", encoding="utf-8") as fh:
        fh.write("region_id,window_id,theta_kmph\n")
        for rid, w, theta in table.rows():
            fh.write(f"{rid},{w},{theta:g}\n")
    _write_flags_csv(_artifact(cfg, "flags.csv"), streams, adaptive)

    with open(_artifact(cfg, "loadshare_report.csv"), "w", encoding="utf-8") as fh:
        fh.write("method,precision,recall,f1\n")
        if labels is not None:
            for name, flags in (("fixed", fixed), ("adaptive", adaptive)):
                m = ls.detection_metrics(flags, labels)
                fh.write(f"{name},{m.precision:.6f},{m.recall:.6f},{m.f1:.6f}\n")
    return (
        f"loadshare: table={source} keys={len(table.thresholds)}"
        f" flagged={int(adaptive.sum())}/{streams.n_records}"
    )


def _segment_lookup(cfg: RunConfig, streams: StreamSet):
    seg_path = _artifact(cfg, "segments.csv")
    if not os.path.exists(seg_path):
        seg_path = _input(cfg, cfg.labels_path, "labels")
    if not os.path.exists(seg_path):
        return {}
    df = pd.read_csv(seg_path, dtype=str)
    valid = {s.value for s in UserSegment}
    return {
        u: UserSegment.from_token(s)
        for u, s in zip(df["user_id"], df["segment"])
        if s in valid
    }


def stage_localize(cfg: RunConfig) -> str:
    streams = _kept_subset(cfg, _load_streams(cfg, _artifact(cfg, "clean_cdr.csv")))
    flags_path = _artifact(cfg, "flags.csv")
    if os.path.exists(flags_path):
        flags = _load_flags_csv(flags_path, streams)
    else:
        flags = np.zeros(streams.n_records, dtype=bool)
    segments = _segment_lookup(cfg, streams)
    holidays = _holiday_set(cfg)

    triples = []
    for i in range(streams.n_users):
        a, b = streams.starts[i], streams.starts[i + 1]
        triples.append(
            (streams.stream(i), flags[a:b], segments.get(streams.user_ids[i]))
        )

    localizer = loc.AnchorLocalizer(
        eps_m=cfg.eps_m,
        min_pts=cfg.min_pts,
        k=cfg.kmeans_k,
        seed=cfg.seed,
        tz_offset_min=cfg.tz_offset_min,
        holidays=tuple(d.strip() for d in cfg.holidays.split(",") if d.strip()),
        grid_step=cfg.weight_grid_step,
    )

    truth_path = _input(cfg, cfg.truth_anchors_path, "truth_anchors")
    fitted = False
    if os.path.exists(truth_path):
        truth_df = pd.read_csv(truth_path, dtype={"user_id": str, "kind": str})
        home_truth = {
            r.user_id: (r.lat, r.lon)
            for r in truth_df.itertuples()
            if r.kind == "home"
        }
        train_idx = [
            i
            for i, u in enumerate(streams.user_ids)
            if u in home_truth and segments.get(u) is not None
        ]
        rng = np.random.default_rng(cfg.seed)
        perm = rng.permutation(len(train_idx))
        n_train = max(1, int(round(cfg.train_fraction * len(train_idx))))
        train_idx = [train_idx[i] for i in perm[:n_train]]
        if train_idx:
            localizer.fit(
                [triples[i] for i in train_idx],
                np.array([home_truth[streams.user_ids[i]] for i in train_idx]),
            )
            fitted = True
    if not fitted:
        localizer.segment_params_ = {s: loc.DEFAULT_PARAMS for s in loc.SEGMENTS}
        localizer.fit_report_ = {}

    with open(_artifact(cfg, "params.csv"), "w", encoding="utf-8") as fh:
        fh.write("segment,alpha,beta,gamma,median_error_m\n")
        for seg in loc.SEGMENTS:
            p = localizer.segment_params_[seg]
            r = localizer.fit_report_.get(seg)
            med = f"{r.median_error_m:.3f}" if r else ""
            fh.write(f"{seg.value},{p.alpha:g},{p.beta:g},{p.gamma:g},{med}\n")

    rows = []
    for i, (stream, f, segment) in enumerate(triples):
        params = localizer.segment_params_.get(segment, loc.DEFAULT_PARAMS)
        for kind in loc.ANCHOR_KINDS:
            est = loc.weighted_anchor(
                stream, f, kind, params,
                eps_m=cfg.eps_m, min_pts=cfg.min_pts,
                tz_offset_min=cfg.tz_offset_min, holidays=holidays,
                seed=cfg.seed, k=cfg.kmeans_k,
            )
            if est is not None:
                rows.append(
                    (stream.user_id, kind, est.lat, est.lon, "weighted", est.cluster_days)
                )
            base = loc.calldays_anchor_estimate(
                stream, kind, cfg.tz_offset_min, holidays
            )
            if base is not None:
                rows.append(
                    (stream.user_id, kind, base.lat, base.lon, "calldays", base.cluster_days)
                )
    with open(_artifact(cfg, "anchors.csv"), "w", encoding="utf-8") as fh:
        fh.write("user_id,kind,lat,lon,method,cluster_days\n")
        for user, kind, lat, lon, method, days in rows:
            fh.write(f"{user},{kind},{lat:.8f},{lon:.8f},{method},{days}\n")
    return f"localize: anchors={len(rows)} users={streams.n_users} fitted={int(fitted)}"


def _anchor_points(anchors: pd.DataFrame, method: str) -> tuple[np.ndarray, np.ndarray, list[str]]:
    sub = anchors[anchors["method"] == method]
    users = sorted(set(sub["user_id"]))
    pos = {u: i for i, u in enumerate(users)}
    home = np.full((len(users), 2), np.nan)
    work = np.full((len(users), 2), np.nan)
    for r in sub.itertuples():
        target = home if r.kind == "home" else work
        target[pos[r.user_id]] = (r.lat, r.lon)
    return home, work, users


WORKING_SEGMENTS = {"full_time", "part_time", "student", "other"}


def stage_odmatrix(cfg: RunConfig) -> str:
    districts_path = cfg.districts_path or (
        _world_path(cfg, "districts")
        if os.path.exists(_world_path(cfg, "districts"))
        else _input(cfg, cfg.regions_path, "regions")
    )
    districts, _ = load_dataset(districts_path, "regions")
    anchors = pd.read_csv(_artifact(cfg, "anchors.csv"), dtype={"user_id": str})
    # home-work flows only make sense for users in a working segment
    seg_path = _artifact(cfg, "segments.csv")
    if not os.path.exists(seg_path):
        seg_path = _input(cfg, cfg.labels_path, "labels")
    if os.path.exists(seg_path):
        seg_df = pd.read_csv(seg_path, dtype=str)
        working = set(seg_df[seg_df["segment"].isin(WORKING_SEGMENTS)]["user_id"])
        anchors = anchors[anchors["user_id"].isin(working)]
    out = {}
    for method, name in (("weighted", "od_matrix.csv"), ("calldays", "od_matrix_calldays.csv")):
        home, work, _ = _anchor_points(anchors, method)
        matrix = od.build_od_matrix(home, work, districts)
        od.write_od_csv(matrix, _artifact(cfg, name))
        out[method] = matrix
    return (
        f"odmatrix: weighted_users={out['weighted'].n_users}"
        f" calldays_users={out['calldays'].n_users} districts={len(districts)}"
    )


def stage_evaluate(cfg: RunConfig) -> str:
    truth_path = _input(cfg, cfg.truth_anchors_path, "truth_anchors")
    pairs: list[tuple[str, str]] = []
    lines: list[tuple[str, object]] = []

    if cfg.ref_od_path:
        _, ref_shares = od.read_od_csv(cfg.ref_od_path)
    elif os.path.exists(truth_path):
        districts_path = cfg.districts_path or (
            _world_path(cfg, "districts")
            if os.path.exists(_world_path(cfg, "districts"))
            else _input(cfg, cfg.regions_path, "regions")
        )
        districts, _ = load_dataset(districts_path, "regions")
        truth_df = pd.read_csv(truth_path, dtype={"user_id": str})
        anchors_path = _artifact(cfg, "anchors.csv")
        if os.path.exists(anchors_path):
            # compare on the population that was actually localized
            evaluated = set(pd.read_csv(anchors_path, dtype={"user_id": str})["user_id"])
            truth_df = truth_df[truth_df["user_id"].isin(evaluated)]
        home, work, _ = _anchor_points(truth_df.assign(method="truth", cluster_days=0), "truth")
        ref_shares = od.build_od_matrix(home, work, districts).shares
    else:
        raise DataError("evaluate: need ref_od_path or a truth_anchors file")

    for method, name in (("weighted", "od_matrix.csv"), ("calldays", "od_matrix_calldays.csv")):
        path = _artifact(cfg, name)
        if not os.path.exists(path):
            continue
        _, shares = od.read_od_csv(path)
        result = od.compare_matrices(shares, ref_shares, cfg.df_mode)
        lines += [
            (f"chi2_{method}", f"{result.statistic:.6f}"),
            (f"df_{method}", result.df),
            (f"p_{method}", f"{result.p:.6f}"),
        ]
        pairs.append((method, f"p={result.p:.4f}"))

    if os.path.exists(truth_path) and os.path.exists(_artifact(cfg, "anchors.csv")):
        anchors = pd.read_csv(_artifact(cfg, "anchors.csv"), dtype={"user_id": str})
        truth_df = pd.read_csv(truth_path, dtype={"user_id": str})
        truth_map = {
            (r.user_id, r.kind): (r.lat, r.lon) for r in truth_df.itertuples()
        }
        for method in ("weighted", "calldays"):
            for kind in ("home", "work"):
                sub = anchors[(anchors["method"] == method) & (anchors["kind"] == kind)]
                errs = [
                    haversine_km(r.lat, r.lon, *truth_map[(r.user_id, kind)]) * 1000.0
                    for r in sub.itertuples()
                    if (r.user_id, kind) in truth_map
                ]
                if errs:
                    for pct, value in od.error_percentiles(errs, (70, 80, 90)).items():
                        lines.append((f"{kind}_{method}_p{pct}_m", f"{value:.3f}"))

    _write_kv(_artifact(cfg, "eval_report.txt"), lines)
    return "evaluate: " + (" ".join(f"{m}:{p}" for m, p in pairs) if pairs else "no matrices")


STAGE_FUNCS = {
    "generate": stage_generate,
    "ingest": stage_ingest,
    "filter": stage_filter,
    "profile": stage_profile,
    "loadshare": stage_loadshare,
    "localize": stage_localize,
    "odmatrix": stage_odmatrix,
    "evaluate": stage_evaluate,
}


def run_pipeline(cfg: RunConfig, stages: list[str] | None = None) -> list[str]:
    names = stages or [s.strip() for s in cfg.stages.split(",") if s.strip()]
    for name in names:
        if name not in STAGE_FUNCS:
            raise UsageError(f"unknown stage {name!r}")
    os.makedirs(cfg.out_dir, exist_ok=True)
    summaries = []
    for name in names:
        try:
            summary = STAGE_FUNCS[name](cfg)
        except FileNotFoundError as exc:
            raise DataError(f"{name}: missing input file: {exc.filename or exc}") from exc
        summaries.append(summary)
        print(summary)
    return summaries


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse usage errors to exit code 1
        raise UsageError(message)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value config file")
    for f in fields(RunConfig):
        parser.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name)


def _overrides_from_args(args: argparse.Namespace) -> dict[str, str]:
    return {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if getattr(args, f.name, None) is not None
    }


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="cdrloc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ALL_STAGES + ("run",):
        p = sub.add_parser(name, help=f"run the {name} stage" if name != "run" else "run all enabled stages")
        _add_config_flags(p)

    try:
        args = parser.parse_args(argv)
        cfg = build_config(args.config, _overrides_from_args(args))
        stages = None if args.command == "run" else [args.command]
        run_pipeline(cfg, stages)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except SystemExit:
        raise
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
