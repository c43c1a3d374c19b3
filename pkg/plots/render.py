#!/usr/bin/env python3
"""Render the four summary figures from the experiment report files.

    python3 plots/render.py --in <report dir> --out <figure dir> \
        [--figs phase,baselines,sensitivity,scaling]

Reads only the emitted CSV/JSON reports (exp1..exp4); never mutates them.
Rerunning on the same inputs reproduces the same figures. A header-only CSV
renders as an empty labeled figure with a warning; a CSV missing an expected
column fails with an error naming that column.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FIGURE_IDS = ("phase", "baselines", "sensitivity", "scaling")

# figure id -> report basenames it consumes
INPUTS = {
    "phase": ("exp2",),
    "baselines": ("exp3",),
    "sensitivity": ("exp4",),
    "scaling": ("exp4", "exp1"),
}

POLICY_COLORS = {"lru": "#888888", "lfu": "#4477aa", "truemi": "#cc6677", "freqdepth": "#228833"}


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    csv_paths: dict  # basename -> csv path
    json_paths: dict  # basename -> json path
    output_path: str

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError("unknown figure id %r" % self.figure_id)


class SchemaError(KeyError):
    pass


def read_rows(csv_path: str, required: tuple[str, ...]) -> list[dict]:
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError("%s: missing required column %r" % (csv_path, col))
        rows = list(reader)
    if not rows:
        warnings.warn("%s has a header but no rows; rendering empty axes" % csv_path)
    return rows


def read_metadata(json_path: str) -> dict:
    if not os.path.exists(json_path):
        return {}
    with open(json_path) as fh:
        return json.load(fh).get("metadata", {})


def _f(row, col):
    return float(row[col])


# ---------------------------------------------------------------------------
# Figure builders (figure, marker count) so callers can check decorations
# ---------------------------------------------------------------------------


def build_phase_figure(rows: list[dict], metadata: dict):
    fig, axes = plt.subplots(2, 2, figsize=(11, 8))
    (ax_lat, ax_grad), (ax_hit, ax_bits) = axes
    transitions = metadata.get("transition_beta") or {}
    markers = 0

    alphas = sorted({row["alpha"] for row in rows}, key=float) if rows else []
    for alpha in alphas:
        sub = [r for r in rows if r["alpha"] == alpha]
        sub.sort(key=lambda r: _f(r, "beta"))
        beta = [_f(r, "beta") for r in sub]
        label = "zipf %s" % alpha
        ax_lat.plot(beta, [_f(r, "mean_latency") for r in sub], marker=".", label=label)
        grads = [(b, _f(r, "gradient")) for b, r in zip(beta, sub) if r["gradient"] != ""]
        ax_grad.plot([g[0] for g in grads], [g[1] for g in grads], marker=".", label=label)
        ax_hit.plot(beta, [_f(r, "hit_rate") for r in sub], marker=".", label=label)
        bits = [(b, _f(r, "storage_bits")) for b, r in zip(beta, sub) if _f(r, "storage_bits") > 0]
        ax_bits.semilogy([x[0] for x in bits], [x[1] for x in bits], marker=".", label=label)

        t = transitions.get(str(alpha))
        if t is None:
            warnings.warn("no transition marker for alpha=%s" % alpha)
            continue
        for ax in (ax_lat, ax_grad):
            ax.axvline(float(t), color="red", linestyle="--", linewidth=1)
            markers += 1

    ax_lat.set_ylabel("mean latency [steps]")
    ax_grad.set_ylabel("d latency / d beta [steps]")
    ax_hit.set_ylabel("hit rate")
    ax_bits.set_ylabel("storage [bits, log]")
    for ax in (ax_lat, ax_grad, ax_hit, ax_bits):
        ax.set_xlabel("stored fraction of queries")
        if rows:
            ax.legend(fontsize=8)
    fig.suptitle("Latency knee across the storage sweep")
    fig.tight_layout()
    return fig, markers


def build_baselines_figure(rows: list[dict], metadata: dict):
    fig, (ax_hit, ax_lat, ax_cmp) = plt.subplots(1, 3, figsize=(13, 4))
    seed = str(metadata.get("seed", ""))
    policies = sorted({r["policy"] for r in rows})
    for policy in policies:
        sub = [r for r in rows if r["policy"] == policy and (not seed or r["seed"] == seed)]
        agg: dict[float, list[dict]] = {}
        for r in sub:
            agg.setdefault(_f(r, "cache_size"), []).append(r)
        sizes = sorted(agg)
        mean = lambda col, s: sum(_f(r, col) for r in agg[s]) / len(agg[s])
        color = POLICY_COLORS.get(policy)
        ax_hit.plot(sizes, [mean("hit_rate", s) for s in sizes], marker="o", label=policy, color=color)
        ax_lat.plot(sizes, [mean("mean_latency", s) for s in sizes], marker="o", label=policy, color=color)
        ax_cmp.plot(sizes, [mean("total_compute_steps", s) for s in sizes], marker="o", label=policy, color=color)
    ax_hit.set_ylabel("hit rate")
    ax_lat.set_ylabel("mean latency [steps]")
    ax_cmp.set_ylabel("total compute [steps]")
    for ax in (ax_hit, ax_lat, ax_cmp):
        ax.set_xlabel("cache size [entries]")
        if rows:
            ax.legend(fontsize=8)
    fig.suptitle("Replacement policies across cache sizes")
    fig.tight_layout()
    return fig, 0


def _curves(rows, axis):
    out: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        if r["kind"] == "curve" and r["axis"] == axis:
            out.setdefault(r["param"], []).append((_f(r, "beta"), _f(r, "cost_nats")))
    for param in out:
        out[param].sort()
    return out


def _cells(rows, axis):
    cells = [r for r in rows if r["kind"] == "cell" and r["axis"] == axis]
    cells.sort(key=lambda r: _f(r, "param"))
    return cells


def build_sensitivity_figure(rows: list[dict], metadata: dict):
    fig, (ax_a, ax_d) = plt.subplots(1, 2, figsize=(12, 4.5))
    for ax, axis, title in ((ax_a, "alpha", "by Zipf exponent"), (ax_d, "depth", "by mean depth")):
        for param, curve in sorted(_curves(rows, axis).items(), key=lambda kv: float(kv[0])):
            ax.plot([p[0] for p in curve], [p[1] for p in curve], marker=".", label="%s %s" % (axis, param))
        ax.set_xlabel("stored fraction of queries")
        ax.set_ylabel("expected cost [nats/access]")
        ax.set_title(title)
        if rows:
            ax.legend(fontsize=7)
        cells = _cells(rows, axis)
        if cells:
            inset = ax.inset_axes([0.55, 0.55, 0.4, 0.4])
            inset.plot(
                [_f(r, "param") for r in cells], [_f(r, "beta_star") for r in cells], marker="o"
            )
            inset.set_title("optimal fraction", fontsize=7)
            inset.tick_params(labelsize=6)
    fig.suptitle("Cost sensitivity across workload shape and depth")
    fig.tight_layout()
    return fig, 0


def build_scaling_figure(rows_by_name: dict, metadata: dict):
    exp4_rows = rows_by_name.get("exp4", [])
    exp1_rows = rows_by_name.get("exp1", [])
    fig, (ax_ratio, ax_h, ax_margin) = plt.subplots(1, 3, figsize=(13, 4))
    cells = _cells(exp4_rows, "entities")
    ax_ratio.plot(
        [_f(r, "param") for r in cells], [_f(r, "cost_ratio") for r in cells], marker="o"
    )
    ax_ratio.set_xscale("log")
    ax_ratio.set_xlabel("knowledge base size [atoms]")
    ax_ratio.set_ylabel("optimal / pure-compute cost")
    ax_h.plot([_f(r, "param") for r in cells], [_f(r, "h_q_bits") for r in cells], marker="o")
    ax_h.set_xscale("log")
    ax_h.set_xlabel("knowledge base size [atoms]")
    ax_h.set_ylabel("workload entropy H(Q) [bits]")
    if exp1_rows:
        ax_margin.plot(
            [_f(r, "entities") for r in exp1_rows],
            [_f(r, "avg_margin_nats") for r in exp1_rows],
            marker="o",
        )
        ax_margin.set_xscale("log")
        ax_margin.set_yscale("log")
    ax_margin.set_xlabel("knowledge base size [atoms]")
    ax_margin.set_ylabel("mean bound margin [nats]")
    fig.suptitle("Scaling behavior across knowledge base sizes")
    fig.tight_layout()
    return fig, 0


REQUIRED_COLUMNS = {
    "exp1": ("entities", "avg_margin_nats", "satisfaction_rate"),
    "exp2": ("alpha", "beta", "mean_latency", "gradient", "hit_rate", "storage_bits"),
    "exp3": ("policy", "cache_size", "seed", "hit_rate", "mean_latency", "total_compute_steps"),
    "exp4": ("kind", "axis", "param", "beta", "cost_nats", "beta_star", "cost_ratio", "h_q_bits"),
}


def render_figures(specs: list[FigureSpec]) -> list[str]:
    produced = []
    for spec in specs:
        rows_by_name = {}
        meta = {}
        for name in INPUTS[spec.figure_id]:
            rows_by_name[name] = read_rows(spec.csv_paths[name], REQUIRED_COLUMNS[name])
            meta[name] = read_metadata(spec.json_paths.get(name, ""))
        if spec.figure_id == "phase":
            fig, _ = build_phase_figure(rows_by_name["exp2"], meta["exp2"])
        elif spec.figure_id == "baselines":
            fig, _ = build_baselines_figure(rows_by_name["exp3"], meta["exp3"])
        elif spec.figure_id == "sensitivity":
            fig, _ = build_sensitivity_figure(rows_by_name["exp4"], meta["exp4"])
        else:
            fig, _ = build_scaling_figure(rows_by_name, meta.get("exp4", {}))
        os.makedirs(os.path.dirname(spec.output_path) or ".", exist_ok=True)
        fig.savefig(spec.output_path, dpi=120)
        plt.close(fig)
        produced.append(spec.output_path)
    return produced


def specs_from_dirs(in_dir: str, out_dir: str, figure_ids) -> list[FigureSpec]:
    specs = []
    for fid in figure_ids:
        csvs = {name: os.path.join(in_dir, name + ".csv") for name in INPUTS[fid]}
        jsons = {name: os.path.join(in_dir, name + ".json") for name in INPUTS[fid]}
        specs.append(
            FigureSpec(
                figure_id=fid,
                csv_paths=csvs,
                json_paths=jsons,
                output_path=os.path.join(out_dir, fid + ".png"),
            )
        )
    return specs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--in", dest="in_dir", required=True, help="directory with expN.csv/json")
    parser.add_argument("--out", dest="out_dir", required=True, help="directory for figure PNGs")
    parser.add_argument(
        "--figs",
        default=",".join(FIGURE_IDS),
        help="comma-separated subset of: %s" % ", ".join(FIGURE_IDS),
    )
    args = parser.parse_args(argv)
    figure_ids = [f.strip() for f in args.figs.split(",") if f.strip()]
    for fid in figure_ids:
        if fid not in FIGURE_IDS:
            print("error: unknown figure id %r" % fid, file=sys.stderr)
            return 2
    try:
        paths = render_figures(specs_from_dirs(args.in_dir, args.out_dir, figure_ids))
    except (SchemaError, FileNotFoundError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
