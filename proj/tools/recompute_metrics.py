#!/usr/bin/env python3
"""Recompute every metrics.csv row of a run bundle from states.csv.

Usage: recompute_metrics.py BUNDLE_DIR [--tol 1e-12]

Reads the logged per-agent states plus the effective configuration echo
(for the sampling period, the initial safety distance and any scheduled
safety-distance changes) and rebuilds all metric columns independently.
Exits 0 when every cell agrees within the tolerance, 1 otherwise.
"""

import argparse
import csv
import math
import os
import sys

EVENT_SLACK = 1e-12  # events bind on the first step strictly past their time


def read_echo(path):
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def distance_schedule(echo):
    """Initial safety distance plus (time, new_d) changes, sorted by time."""
    d0 = float(echo["separation.d"])
    changes = []
    index = 1
    while f"disturbance.{index}.time" in echo:
        prefix = f"disturbance.{index}."
        if echo.get(prefix + "action") == "set_safety_distance":
            changes.append((float(echo[prefix + "time"]), float(echo[prefix + "d"])))
        index += 1
    changes.sort(key=lambda c: c[0])
    return d0, changes


def read_states(path):
    """states.csv grouped by step: {k: {agent: row-dict}}."""
    steps = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            k = int(row["k"])
            steps.setdefault(k, {})[int(row["agent"])] = {
                "active": row["active"] == "1",
                "x": float(row["x"]),
                "y": float(row["y"]),
                "vx": float(row["vx"]),
                "vy": float(row["vy"]),
            }
    return steps


def norm(dx, dy):
    return math.sqrt(dx * dx + dy * dy)


def metrics_for_step(agents, d):
    leader = agents[0]
    active = [a for i, a in sorted(agents.items()) if i != 0 and a["active"]]
    if not active:
        raise ValueError("no active followers")
    n = len(active)

    dist = [norm(a["x"] - leader["x"], a["y"] - leader["y"]) for a in active]
    speed = [norm(a["vx"], a["vy"]) for a in active]
    err = []
    for a in active:
        if n == 1:
            err.append(0.0)
            continue
        s = 0.0
        for b in active:
            if b is a:
                continue
            s += norm(b["x"] - a["x"], b["y"] - a["y"]) - d
        err.append(s / (n - 1))

    def mean(xs):
        return sum(xs) / n

    def pstd(xs, mu):
        return math.sqrt(sum((x - mu) ** 2 for x in xs) / n)

    m_t, m_s, m_v = mean(dist), mean(err), mean(speed)
    return {
        "O_t": m_t,
        "O_s": m_s,
        "O_v": m_v,
        "std_t": pstd(dist, m_t),
        "std_s": pstd(err, m_s),
        "std_v": pstd(speed, m_v),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("bundle", help="run bundle directory")
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args()

    echo = read_echo(os.path.join(args.bundle, "config.echo"))
    T = float(echo["scenario.sampling_period"])
    d, changes = distance_schedule(echo)
    steps = read_states(os.path.join(args.bundle, "states.csv"))

    with open(os.path.join(args.bundle, "metrics.csv"), "r", encoding="utf-8",
              newline="") as fh:
        logged = list(csv.DictReader(fh))

    if sorted(steps) != [int(row["k"]) for row in logged]:
        print("recompute_metrics: step sets differ between states.csv and metrics.csv")
        return 1

    failures = 0
    change_idx = 0
    for row in logged:
        k = int(row["k"])
        while change_idx < len(changes) and k * T > changes[change_idx][0] + EVENT_SLACK:
            d = changes[change_idx][1]
            change_idx += 1
        expect = metrics_for_step(steps[k], d)
        expect["t"] = k * T
        for col, want in expect.items():
            got = float(row[col])
            if not math.isfinite(got) or abs(got - want) > args.tol:
                print(f"mismatch at k={k} {col}: logged {got!r}, recomputed {want!r}")
                failures += 1
                if failures > 20:
                    print("... giving up")
                    return 1
    if failures:
        return 1
    print(f"recompute_metrics: {len(logged)} rows verified within {args.tol:g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
