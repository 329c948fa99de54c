#!/usr/bin/env python3
"""Generate newform-orbit fixtures under data/orbits/.

Plans the closed set of levels needed by the classification pipeline
(divisor-closed, since lifting old forms to a level needs the orbits of
every divisor), assigns each level a q-expansion precision, and writes
one JSONL file per level.  Existing files with sufficient precision are
kept, so the run is resumable.
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from msengine import compute_level  # noqa: E402
from x0star import nfdata  # noqa: E402
from x0star.arith import divisors  # noqa: E402
from x0star.genus import (  # noqa: E402
    char2_candidates,
    classification_candidates,
    delta_lists,
)
from x0star.tables import hyperelliptic_genus2_levels, load_table  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "data" / "orbits"

# levels with small star genus whose doubles stay in scope
L1 = [101, 107, 131, 161, 167, 177, 191, 205, 209, 213, 221, 285, 287,
      299, 357]
# survivors of the characteristic-2 hyperellipticity screen
L2 = [183, 185, 187, 203, 335, 345, 385]
# bielliptic levels whose doubles stay in scope
L3 = [249, 303, 455]
# survivors of the odd-level exclusion battery
SURVIVORS = [201, 219, 265, 309, 321, 335, 345, 371, 399, 437, 447, 465,
             483, 551, 555, 561, 609, 615, 645, 663, 665, 689, 705, 861,
             957, 987, 1055, 1155, 1365]


def build_plan():
    prec = {}

    def add(levels, p):
        for n in levels:
            for d in divisors(int(n)):
                if d > 1:
                    prec[d] = max(prec.get(d, 0), p)

    thm1 = load_table("thm1")
    bi = [int(n) for g in thm1["bielliptic_by_genus"].values() for n in g]
    add(classification_candidates(), 25)
    add(char2_candidates(), 25)
    add(sorted(hyperelliptic_genus2_levels()) + bi, 25)
    add([255, 330, 1551, 1555], 25)

    dl = delta_lists(3000)
    evens = sorted({2 * n for n in
                    set(L1) | set(L2) | set(L3)
                    | set(dl[-1]) | set(dl[0]) | set(dl[1]) | set(dl[2])})
    add(evens, 100)
    add(SURVIVORS, 100)
    add([2 * n for n in L2] + [366, 370, 534, 606, 910, 966, 1290], 120)
    add([645], 120)
    add([1378], 190)
    return dict(sorted(prec.items()))


# closures generated first: development of downstream modules needs these
PRIORITY = [37, 43, 61, 67, 97, 122, 129, 183, 215, 366, 645, 106, 689,
            1378, 202, 303, 606, 101]


def existing_prec(path):
    if not path.exists():
        return None
    lines = path.read_text().strip().splitlines()
    if not lines:
        return 10 ** 9   # no orbits at this level: any precision suffices
    try:
        for i, line in enumerate(lines):
            nfdata._validate(json.loads(line), str(path), i + 1)
    except Exception:
        return None      # invalid file: regenerate
    return json.loads(lines[0])["prec"]


def run(only=None, limit=None, dry=False):
    plan = build_plan()
    order = []
    seen = set()
    for n in PRIORITY:
        for d in sorted(divisors(n)):
            if d > 1 and d in plan and d not in seen:
                order.append(d)
                seen.add(d)
    for d in plan:
        if d not in seen:
            order.append(d)

    if only:
        order = [n for n in order if n in only]
    if limit:
        order = order[:limit]

    OUT.mkdir(parents=True, exist_ok=True)
    todo = []
    for n in order:
        have = existing_prec(OUT / f"N={n}.jsonl")
        if have is None or have < plan[n]:
            todo.append(n)
    print(f"plan: {len(plan)} levels, {len(todo)} to generate", flush=True)
    if dry:
        for n in todo:
            print(f"  N={n} prec={plan[n]}")
        return 0

    fails = []
    for i, n in enumerate(todo):
        t0 = time.time()
        recs = None
        err = None
        prec = plan[n]
        # rank of the q-expansion rows can degenerate at low precision
        # (columns at multiples of bad primes repeat earlier ones), so
        # validate and retry with more coefficients before giving up
        for attempt in range(3):
            try:
                cand = compute_level(n, prec)
                for r in cand:
                    nfdata._validate(r, f"N={n}", 0)
                recs = cand
                break
            except Exception as e:
                err = e
                prec += 25
        if recs is None:
            print(f"[{i + 1}/{len(todo)}] N={n} FAILED: {err}", flush=True)
            fails.append(n)
            continue
        path = OUT / f"N={n}.jsonl"
        with path.open("w") as fh:
            for r in recs:
                fh.write(json.dumps(r, separators=(",", ":")) + "\n")
        dims = [r["dim"] for r in recs]
        print(f"[{i + 1}/{len(todo)}] N={n} dims={dims} prec={prec} "
              f"{time.time() - t0:.1f}s", flush=True)
    if fails:
        print(f"FAILED levels: {fails}", flush=True)
        return 1
    print("all fixtures generated", flush=True)
    return 0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--only", type=lambda s: {int(x) for x in s.split(",")})
    ap.add_argument("--limit", type=int)
    ap.add_argument("--dry", action="store_true")
    a = ap.parse_args()
    return run(only=a.only, limit=a.limit, dry=a.dry)


if __name__ == "__main__":
    sys.exit(main())
