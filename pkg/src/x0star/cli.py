"""Command-line driver: classification, reporting, table reproduction.

Subcommands mirror the pipeline stages: genus/delta are closed
formulas, candidates enumerates the finite search pools, discard and
splitting and petri expose single stages at one level, classify runs
the whole decision procedure, reproduce-table regenerates a bundled
reference table and diffs it, cache manages the persisted memo file.

Exit codes: 0 success (command ran, tables match, discard fired);
1 a reproduced table differs from the bundle or a discard criterion
came back inconclusive; 2 missing or invalid input data (fixtures,
arguments, precision); 3 internal contradiction (both orientations of
a sign pattern survive every check, or point counts break the series
model).  Known discrepancies recorded inside a table are reported and
never counted as mismatches.
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import classnum, criteria, frobenius, genus, hypermodel, nfdata
from . import petri, tables
from .arith import divisors, is_squarefree, prime_factors, squarefree_odd_range
from .criteria import DEFAULT_PRIMES

CACHE_SCHEMA = 1
CACHE_NAME = "x0star-cache.json"
REPORT_SCHEMA = 1

DOMINANCE_MAX_N = 6
FREE_PARITY_MAX_N = 8


class ContradictionError(Exception):
    """Mutually inconsistent conclusions from independent routes."""


# ---------------------------------------------------------------------------
# persisted cache (class numbers + Frobenius charpolys, one JSON file)
# ---------------------------------------------------------------------------

def cache_path(cache_dir) -> Path:
    return Path(cache_dir) / CACHE_NAME


def load_cache(cache_dir) -> bool:
    path = cache_path(cache_dir)
    if not path.is_file():
        return False
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return False
    if data.get("schema") != CACHE_SCHEMA:
        return False
    classnum.seed_cache(data.get("classnum", {}))
    frobenius.seed_cache(data.get("frobenius", {}))
    return True


def save_cache(cache_dir) -> None:
    path = cache_path(cache_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {
        "schema": CACHE_SCHEMA,
        "classnum": classnum.export_cache(),
        "frobenius": frobenius.export_cache(),
    }
    path.write_text(json.dumps(data, sort_keys=True))


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------

def _jsonable(obj):
    """Plain JSON types only, deterministic; Fractions become strings."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def _signs_str(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


# ---------------------------------------------------------------------------
# classification pipeline
# ---------------------------------------------------------------------------

_CLASSIFY_MEMO: dict = {}


def classify(N, source=None) -> dict:
    key = (int(N), str(source) if source is not None else "")
    if key not in _CLASSIFY_MEMO:
        _CLASSIFY_MEMO[key] = _classify(int(N), source)
    return _CLASSIFY_MEMO[key]


def _classify(N, source):
    if N <= 1 or not is_squarefree(N):
        raise ValueError(f"level must be square-free and > 1, got {N}")
    g = genus.genus_x0_star(N)
    odd = N % 2 == 1
    rep = {
        "schema": REPORT_SCHEMA,
        "level": N,
        "genus": g,
        "odd": odd,
        "evidence": [],
    }
    if odd:
        rep["delta"] = genus.delta_2n(N)

    bg = tables.bielliptic_genus(N)
    if g == 2:
        # always hyperelliptic; the reference tables settle the group
        rep["verdict"] = "hyperelliptic"
        rep["bielliptic"] = bg == 2
        rep["aut_order"] = 4 if bg == 2 else 2
        rep["listed_order_2"] = N in tables.hyperelliptic_genus2_levels()
        rep["evidence"].append({"step": "genus-gate", "genus": 2})
        return rep
    if bg is not None:
        rep["verdict"] = "bielliptic"
        rep["aut_order"] = 2 if g > 2 else 4
        rep["quotient_genus"] = 1
        rep["evidence"].append({"step": "genus-gate", "genus": g,
                                "reference": "bielliptic table"})
        return rep
    if g <= 3:
        # genus <= 1 has no finite classification here; genus 3 carries
        # a non-trivial involution only in the bielliptic case, which
        # was ruled out above
        rep["verdict"] = "out-of-scope"
        if g == 3:
            rep["aut_order"] = 1
            rep["evidence"].append({
                "step": "genus-gate", "genus": 3,
                "note": "genus-3 group is non-trivial only when bielliptic",
            })
        else:
            rep["evidence"].append({"step": "genus-gate", "genus": g})
        return rep

    primes = prime_factors(N)
    if len(primes) == 1:
        rep["verdict"] = "trivial"
        rep["aut_order"] = 1
        rep["evidence"].append({
            "step": "prime-level",
            "note": "prime level of genus above 2 has trivial group "
                    "(published classification)",
        })
        return rep

    # 1. odd-degree place parity at the good small primes
    tried = []
    for p in DEFAULT_PRIMES:
        if N % p == 0:
            continue
        tried.append(p)
        verdict = criteria.lemma1_parity(N, p, source=source)
        if verdict.excluded:
            rep["evidence"].append(verdict.to_dict())
            rep["verdict"] = "trivial"
            rep["aut_order"] = 1
            return rep
    rep["evidence"].append({"step": "parity", "excluded": False,
                            "primes": tried})

    # 2. quotient-genus window against attainable block dimensions
    wv = criteria.window_subset(N, source=source)
    rep["evidence"].append(wv.to_dict())
    if wv.excluded:
        rep["verdict"] = "trivial"
        rep["aut_order"] = 1
        return rep

    # 3. constraints from the degree-p coverings
    basis = nfdata.star_basis(N, source=source)
    rep["splitting"] = [[lvl, d] for lvl, d in
                        zip(basis.block_levels(), basis.block_dims())]
    window = list(genus.genus_window(g, odd))
    constraints, excluded = _restriction_constraints(N, g, window,
                                                     basis, source)
    rep["evidence"].extend(c["record"] for c in constraints)
    if excluded is not None:
        rep["evidence"].append(excluded)
        rep["verdict"] = "trivial"
        rep["aut_order"] = 1
        return rep

    # 4. diagonal sign patterns preserving the canonical ideal
    spaces = [petri.vanishing_forms(basis, 2)]
    if g == 4:
        # the quadric alone does not cut out a genus-4 canonical curve;
        # degree-3 invariance is an extra necessary condition
        spaces.append(petri.vanishing_forms(basis, 3))
    patterns = petri.sign_pattern_search(
        spaces, basis.block_dims(), window,
        pattern_ok=_pattern_filter(constraints))
    petri_step = {
        "step": "petri",
        "dim_L2": spaces[0].dim,
        "petri_general_dim": (g - 2) * (g - 3) // 2,
        "window": window,
        "patterns_found": len(patterns),
        "patterns": [_signs_str(p.signs) for p in patterns],
    }
    if g == 4:
        petri_step["dim_L3"] = spaces[1].dim
    rep["evidence"].append(petri_step)
    if not patterns:
        rep["verdict"] = "trivial"
        rep["aut_order"] = 1
        return rep

    # 5. orientation of the surviving patterns
    involutions = []
    unresolved = []
    for pattern in patterns:
        outcome = _resolve_pattern(N, g, odd, basis, window, constraints,
                                   spaces[0], pattern, source)
        rep["evidence"].append(outcome["record"])
        if outcome["status"] == "resolved":
            involutions.append(outcome)
        elif outcome["status"] == "unresolved":
            unresolved.append(outcome)

    if unresolved:
        rep["verdict"] = "unresolved"
        return rep
    if not involutions:
        rep["verdict"] = "trivial"
        rep["aut_order"] = 1
        return rep

    rep["verdict"] = "order-2"
    rep["aut_order"] = 2
    rep["involutions_found"] = len(involutions)
    rep["involution"] = involutions[0]["involution"]
    rep["quotient_genus"] = rep["involution"]["quotient_genus"]
    return rep


def _lower_aut(report):
    """Reduce a lower-level report to the restriction trichotomy.

    Returns (kind, quotient_keys): kind "trivial" forces the identity
    on the lifted blocks, "involution" allows identity or the known
    involution (quotient_keys = its quotient blocks, None when only
    the quotient dimension is known), "unknown" is unusable.
    """
    v = report["verdict"]
    if v == "trivial":
        return "trivial", None
    if v == "out-of-scope":
        # genus 3 reached here only when non-bielliptic, hence trivial
        return ("trivial", None) if report["genus"] == 3 else ("unknown", None)
    if v == "bielliptic":
        return "involution", None
    if v == "order-2":
        inv = report.get("involution")
        if inv is not None and report.get("involutions_found", 1) == 1:
            return "involution", [tuple(k) for k in inv["quotient_block_keys"]]
        return "unknown", None
    return "unknown", None


def _nonhyp_modp(M, p, source):
    """Is X0*(M) mod p certifiably non-hyperelliptic?  (ok, note)."""
    if p == 2:
        if M % 2 == 0 or genus.genus_x0_star(M) <= 2:
            return False, "characteristic-2 screen needs odd M, genus > 2"
        if M in hypermodel.MOD2_SURVIVORS:
            return False, "survives the characteristic-2 screen"
        return True, "excluded by the characteristic-2 screen"
    try:
        res = hypermodel.star_hyperelliptic_modp(M, p, source=source)
    except nfdata.FixtureError:
        return False, "no fixtures for the lower level"
    if res["hyperelliptic"]:
        return False, f"hyperelliptic mod {p}"
    return True, res["reason"]


def _restriction_constraints(N, g, window, basis, source):
    """Usable covering constraints at N, plus an immediate exclusion.

    Returns (constraints, excluded_record_or_None).  Each constraint
    carries the member block indices and the branch rule checked at
    orientation time.
    """
    levels = basis.block_levels()
    dims = basis.block_dims()
    keys = [orb.key for orb, _ in basis.blocks]
    out = []
    for p in prime_factors(N):
        M = N // p
        gM = genus.genus_x0_star(M)
        if gM <= 2:
            continue
        ok, note = _nonhyp_modp(M, p, source)
        if not ok:
            continue
        lower = classify(M, source)
        kind, w_keys = _lower_aut(lower)
        if kind == "unknown":
            continue
        part = tuple(i for i, lvl in enumerate(levels) if M % lvl == 0)
        record = {
            "step": "restriction", "p": p, "sub_level": M,
            "sub_genus": gM, "lower_verdict": lower["verdict"],
            "modp_note": note,
            "forced_blocks": [[levels[i], dims[i]] for i in part],
        }
        c = {"p": p, "sub_level": M, "sub_genus": gM, "kind": kind,
             "part": part, "record": record}
        if kind == "involution":
            if w_keys is not None:
                c["w_plus"] = tuple(i for i in part if keys[i] in set(w_keys))
            else:
                # bielliptic lower: the involution fixes exactly the
                # differentials of its elliptic quotient
                c["w_dim1"] = tuple(i for i in part if dims[i] == 1)
        out.append(c)
        if kind == "trivial" and gM > max(window):
            record = dict(record)
            record["step"] = "restriction-window"
            record["excluded"] = True
            record["note"] = (f"forced quotient genus {gM} exceeds the "
                              f"window maximum {max(window)}")
            return out, record
    return out, None


def _pattern_filter(constraints):
    """Necessary sign-uniformity prune for the canonical patterns."""
    if not constraints:
        return None

    def ok(pat):
        for c in constraints:
            part = c["part"]
            sigs = {pat.signs[i] for i in part}
            if len(sigs) <= 1:
                continue
            if c["kind"] != "involution":
                return False
            if "w_plus" in c:
                ref = c["w_plus"]
                plus = {i for i in part if pat.signs[i] > 0}
                if plus != set(ref) and plus != set(part) - set(ref):
                    return False
            else:
                for split in (1, -1):
                    odd_out = [i for i in part if pat.signs[i] == split]
                    if len(odd_out) == 1 and odd_out[0] in c["w_dim1"]:
                        break
                else:
                    return False
        return True

    return ok


def _constraint_satisfied(c, quotient_set, part_dims):
    """Branch test with the quotient side (true +1 eigenspace) known."""
    part = set(c["part"])
    inside = part & quotient_set
    if inside == part:
        return True              # the identity branch
    if c["kind"] != "involution":
        return False
    if "w_plus" in c:
        return inside == set(c["w_plus"])
    return (len(inside) == 1 and
            part_dims[next(iter(inside))] == 1 and
            next(iter(inside)) in c["w_dim1"])


def _resolve_pattern(N, g, odd, basis, window, constraints, space2,
                     pattern, source):
    """Decide the quotient side of one accepted pattern.

    Every veto is recorded with its witness.  Exactly one surviving
    orientation resolves the pattern to an involution; zero refutes
    the pattern; two is a contradiction surfaced to the caller.
    """
    orbits = [orb for orb, _ in basis.blocks]
    dims = basis.block_dims()
    levels = basis.block_levels()
    good = [p for p in DEFAULT_PRIMES if N % p]
    sides = []
    for g_u, bidx in ((pattern.plus_dim, pattern.plus_blocks()),
                      (pattern.minus_dim, pattern.minus_blocks())):
        fix = 2 * g + 2 - 4 * g_u
        side = {"quotient_genus": g_u, "fixed_points": fix,
                "blocks": [[levels[i], dims[i]] for i in bidx],
                "vetoes": []}
        vet = side["vetoes"]
        if g_u not in window:
            vet.append({"check": "window", "window": window})
        if fix < 0:
            vet.append({"check": "hurwitz", "fixed_points": fix})
        if odd and fix > petri.FIXED_POINT_CAP_ODD:
            vet.append({"check": "fixed-point-cap", "fixed_points": fix})
        qset = set(bidx)
        for c in constraints:
            if not vet and not _constraint_satisfied(c, qset, dims):
                vet.append({"check": "restriction", "p": c["p"],
                            "sub_level": c["sub_level"]})
        if not vet:
            sub = [orbits[i] for i in bidx]
            hit = _count_veto(orbits, sub, good, fix)
            if hit:
                vet.append(hit)
        if not vet:
            probe = _quotient_probe_veto(basis, bidx, g_u, g)
            if probe is not None:
                if probe.get("veto"):
                    vet.append(probe)
                else:
                    side["probe"] = probe
        sides.append((side, bidx))

    alive = [sb for sb in sides if not sb[0]["vetoes"]]
    if len(alive) == 2 and g >= 5:
        # count rational fixed points on the two coordinate subspaces;
        # exact for genus >= 5 where the quadrics cut the curve
        signs = pattern.variable_signs()
        plus = petri.subspace_point_count(
            space2, [i for i, s in enumerate(signs) if s > 0])
        minus = petri.subspace_point_count(
            space2, [i for i, s in enumerate(signs) if s < 0])
        if plus is not None and minus is not None:
            total = plus + minus
            for side, _ in alive:
                if side["fixed_points"] != total:
                    side["vetoes"].append({"check": "fixed-point-count",
                                           "counted": total})
            alive = [sb for sb in alive if not sb[0]["vetoes"]]

    record = {"step": "orientation", "pattern": _signs_str(pattern.signs),
              "block_dims": list(dims), "sides": [s for s, _ in sides]}
    if len(alive) == 1:
        side, bidx = alive[0]
        inv = {
            "order": 2,
            "sign_pattern": _signs_str(pattern.signs),
            "quotient_genus": side["quotient_genus"],
            "fixed_points": side["fixed_points"],
            "quotient_blocks": side["blocks"],
            "quotient_block_keys": [list(orbits[i].key) for i in bidx],
            "blocks": [[levels[i], dims[i], 1 if i in set(bidx) else -1]
                       for i in range(len(dims))],
        }
        if side["quotient_genus"] == 2:
            model = side.get("probe")
            if model is None or "poly" not in model:
                raise ContradictionError(
                    f"level {N}: resolved genus-2 quotient has no model")
            if model["terms_checked"] < 8 * g + 8:
                raise petri.PrecisionError(
                    f"model identity checked to {model['terms_checked']} "
                    f"terms, need {8 * g + 8}")
            inv["model"] = model
        record["resolved"] = inv["sign_pattern"]
        return {"status": "resolved", "record": record, "involution": inv}
    if not alive:
        record["resolved"] = None
        return {"status": "refuted", "record": record}
    record["resolved"] = None
    record["note"] = "both orientations survive every check"
    return {"status": "unresolved", "record": record}


def _count_veto(all_orbits, sub_orbits, good_primes, fix):
    """Point-count vetoes: covering dominance and free-action parity."""
    for p in good_primes:
        for n in range(1, DOMINANCE_MAX_N + 1):
            total = frobenius.point_count(all_orbits, p, n)
            quot = frobenius.point_count(sub_orbits, p, n)
            if total > 2 * quot:
                return {"check": "dominance", "p": p, "n": n,
                        "count": total, "quotient_count": quot}
    if fix == 0:
        for p in good_primes:
            if p == 2:
                continue          # wild ramification can create fixed points
            for n in range(1, FREE_PARITY_MAX_N + 1):
                total = frobenius.point_count(all_orbits, p, n)
                if total % 2:
                    return {"check": "free-parity", "p": p, "n": n,
                            "count": total}
    return None


def _quotient_probe_veto(basis, bidx, g_u, g):
    """Canonical-degree test of the candidate quotient differentials.

    A genuine quotient curve satisfies dim >= expected (equality in the
    non-hyperelliptic generic case), so only a deficit is a veto.  A
    genus-2 candidate must fit a hyperelliptic model outright.
    """
    rows = []
    for i in bidx:
        rng = basis.blocks[i][1]
        rows.extend(basis.series[r] for r in rng)
    if g_u == 2:
        try:
            model = hypermodel.genus2_model(rows)
        except ArithmeticError as exc:
            return {"check": "genus-2-model", "veto": True,
                    "reason": str(exc)}
        except hypermodel.PrecisionError:
            return None
        model["check"] = "genus-2-model"
        return model
    try:
        dim, expected, degree = petri.quotient_probe(
            rows, g, basis.prec, g_u)
    except petri.PrecisionError:
        return None
    out = {"check": "quotient-forms", "degree": degree,
           "dim": dim, "expected": expected}
    if dim < expected:
        out["veto"] = True
    return out


# ---------------------------------------------------------------------------
# table reproduction
# ---------------------------------------------------------------------------

def _flags(name):
    return [e["note"] for e in
            tables.load_table(name).get("known_discrepancies", ())]


def _repro_thm1(source):
    t = tables.load_table("thm1")
    found = [n for n in range(2, 2001) if is_squarefree(n)
             and genus.genus_x0_star(n) == 2]
    listed = set(t["hyperelliptic_genus2"])
    listed |= {n for n in t["bielliptic_by_genus"]["2"]}
    extras = sorted(set(found) - listed)
    missing = sorted(listed - set(found))
    flagged_extras = {int(k.split(":")[1])
                      for k in tables.known_discrepancy_keys("thm1")}
    diffs = []
    if set(extras) != flagged_extras:
        diffs.append({"field": "hyperelliptic_genus2",
                      "extra_genus2_levels": extras})
    if missing:
        diffs.append({"field": "hyperelliptic_genus2",
                      "listed_but_not_genus2": missing})
    for gq, lv in t["bielliptic_by_genus"].items():
        bad = [n for n in lv if genus.genus_x0_star(n) != int(gq)]
        if bad:
            diffs.append({"field": f"bielliptic_by_genus:{gq}",
                          "wrong_genus": bad})
    return diffs


def _repro_prop4_delta(source):
    t = tables.load_table("prop4_delta")
    got = genus.delta_lists(3000)
    diffs = []
    for key, d in (("delta_minus1", -1), ("delta_0", 0),
                   ("delta_plus1", 1), ("delta_plus2", 2)):
        if got[d] != sorted(t[key]):
            diffs.append({"field": key, "computed": got[d],
                          "stored": sorted(t[key])})
    return diffs


def _repro_odd_candidates(source):
    t = tables.load_table("odd_candidates")
    pool = genus.gonality_pool()
    cand = genus.classification_candidates()
    diffs = []
    if len(pool) != t["pool_count"] or max(pool) != t["pool_max"]:
        diffs.append({"field": "pool", "count": len(pool),
                      "max": max(pool)})
    if cand != sorted(t["filtered"]):
        diffs.append({"field": "filtered", "computed_count": len(cand)})
    return diffs


def _repro_char2(source):
    t = tables.load_table("char2")
    screen = hypermodel.char2_screen(source=source)
    diffs = []
    for N, m, printed in t["a_values"]:
        level = 595 if N == 592 else N       # flagged transcription slip
        value = hypermodel.a_value(level, m, source=source)
        if value != printed and (N, m) not in ((592, 2), (391, 1)):
            diffs.append({"row": [N, m], "printed": printed,
                          "computed": value})
        if (N, m) == (592, 2) and value != printed:
            diffs.append({"row": [N, m], "printed": printed,
                          "computed_at_595": value})
        if (N, m) == (391, 1) and value != -1:
            diffs.append({"row": [N, m], "computed": value,
                          "expected_recomputed": -1})
    if sorted(screen["parity_discards"]) != sorted(t["crit1_p2"]):
        diffs.append({"field": "crit1_p2",
                      "computed": sorted(screen["parity_discards"])})
    if sorted(screen["survivors"]) != sorted(t["survivors"]):
        diffs.append({"field": "survivors",
                      "computed": sorted(screen["survivors"])})
    if 455 in screen["survivors"]:
        diffs.append({"field": "survivors", "unexpected": 455})
    return diffs


def _repro_r_parity(source):
    t = tables.load_table("r_parity")
    diffs = []
    for N, p, k, printed in t["rows"]:
        orbits = nfdata.load_orbits(source, 2 * N)
        value = frobenius.point_count(orbits, p, k)
        if value != printed or value % 2 == 0:
            diffs.append({"row": [N, p, k], "printed": printed,
                          "computed": value})
        if genus.delta_2n(N) != -1:
            diffs.append({"row": [N, p, k], "delta": genus.delta_2n(N)})
    return diffs


def _repro_splittings(source):
    t = tables.load_table("splittings")
    diffs = []
    for key, stored in sorted(t["odd"].items(), key=lambda kv: int(kv[0])):
        sig = nfdata.splitting_signature(int(key), source)
        if sorted(map(tuple, stored)) != sorted((d, l) for l, d in sig):
            diffs.append({"field": f"odd:{key}", "computed": sorted(sig)})
    for key, stored in sorted(t["even"].items(), key=lambda kv: int(kv[0])):
        sig = nfdata.splitting_signature(2 * int(key), source)
        if sorted(map(tuple, stored)) != sorted((d, l) for l, d in sig):
            diffs.append({"field": f"even:{key}", "computed": sorted(sig)})
    return diffs


def _repro_crit1_odd(source):
    t = tables.load_table("crit1_odd")
    buckets = {p: [] for p in (2, 3, 5, 7, 11)}
    window = []
    survivors = []
    for N in genus.classification_candidates():
        for p in (2, 3, 5, 7, 11):
            if N % p == 0:
                continue
            if criteria.lemma1_parity(N, p, source=source).excluded:
                buckets[p].append(N)
                break
        else:
            if criteria.window_subset(N, source=source).excluded:
                window.append(N)
            else:
                survivors.append(N)
    diffs = []
    for p, got in buckets.items():
        stored = sorted(t["discards"].get(str(p), []))
        if got != stored:
            diffs.append({"field": f"discards:{p}", "computed": got,
                          "stored": stored})
    stored_window = sorted(t["window_subset"])
    flagged = {715}
    if sorted(set(window) | flagged) != stored_window:
        diffs.append({"field": "window_subset", "computed": window,
                      "stored": stored_window})
    stored_surv = sorted(t["survivors"])
    if sorted(set(survivors) - flagged) != stored_surv:
        diffs.append({"field": "survivors", "computed": survivors,
                      "stored": stored_surv})
    return diffs


def _repro_ell_lists(source):
    t = tables.load_table("ell_lists")
    diffs = []
    dl = genus.delta_lists(3000)
    l1 = [n for n in squarefree_odd_range(3, 400)
          if genus.genus_x0_star(n) <= 2 and genus.genus_x0_star(2 * n) > 3]
    if l1 != sorted(t["l1"]["values"]):
        diffs.append({"field": "l1", "computed": l1})
    if sorted(hypermodel.MOD2_SURVIVORS) != sorted(t["l2"]["values"]):
        diffs.append({"field": "l2",
                      "computed": sorted(hypermodel.MOD2_SURVIVORS)})
    l3 = sorted(n for lv in
                tables.load_table("thm1")["bielliptic_by_genus"].values()
                for n in lv
                if n % 2 and genus.genus_x0_star(n) > 2
                and n not in hypermodel.MOD2_SURVIVORS)
    if l3 != sorted(t["l3"]["values"]):
        diffs.append({"field": "l3", "computed": l3})
    l4m = [n for n in dl[-1] if n not in hypermodel.MOD2_SURVIVORS]
    if l4m != sorted(t["l4_minus1"]["values"]):
        diffs.append({"field": "l4_minus1", "computed": l4m})
    if dl[0] != sorted(t["l4_zero"]["values"]):
        diffs.append({"field": "l4_zero", "computed": dl[0]})
    l5 = sorted(set(dl[1]) | set(dl[2]) - {249, 303})
    stored_l5 = sorted(t["l5"]["values"])
    if sorted(set(stored_l5) - {303}) != sorted(set(l5) - {249, 303}):
        diffs.append({"field": "l5", "computed": l5, "stored": stored_l5})
    for lname in ("l1", "l4_zero", "l5"):
        for key, p in t[lname].get("crit1", {}).items():
            v = criteria.lemma1_parity(2 * int(key), p, source=source)
            if not v.excluded:
                diffs.append({"field": f"{lname}:crit1:{key}", "p": p,
                              "fired": False})
    for lname in ("l1", "l2"):
        for n in t[lname].get("window", []):
            if not criteria.window_subset(2 * n, source=source).excluded:
                diffs.append({"field": f"{lname}:window:{n}",
                              "fired": False})
    for lname in ("l4_zero", "l5"):
        for key, M in t[lname].get("restrict_mod3", {}).items():
            res = hypermodel.star_hyperelliptic_modp(M, 3, source=source)
            if res["hyperelliptic"]:
                diffs.append({"field": f"{lname}:restrict_mod3:{key}",
                              "hyperelliptic": True})
    dom = t["dominance_1551"]
    orbits = nfdata.load_orbits(source, dom["plausible_level"])
    sub = [o for o in orbits if int(o.level) == dom["reference"]]
    w = dom["plausible_witness"]
    total = frobenius.point_count(orbits, w["p"], w["n"])
    quot = frobenius.point_count(sub, w["p"], w["n"])
    if total != w["count"] or quot != w["quotient_count"]:
        diffs.append({"field": "dominance_1551", "count": total,
                      "quotient_count": quot})
    return diffs


def _quadric_key(space, idx):
    out = {}
    for mono, c in zip(space.monos, space.basis[idx]):
        if c:
            out[f"{mono[0] + 1},{mono[1] + 1}"] = c
    return out


def _repro_petri645(source):
    t = tables.load_table("petri645")
    basis = nfdata.star_basis(645, source=source)
    space = petri.vanishing_forms(basis, 2)
    diffs = []
    stored = [t["quadrics"][k] for k in sorted(t["quadrics"])]
    if len(stored) != space.dim:
        diffs.append({"field": "quadrics", "dim": space.dim})
        return diffs
    for i, want in enumerate(stored):
        got = _quadric_key(space, i)
        want = {k: Fraction(v) for k, v in want.items()}
        if {k: Fraction(v) for k, v in got.items()} != want:
            diffs.append({"field": f"Q{i + 1}", "computed": got})
    ns = petri.nonsquare_subspace(space)
    names = sorted(t["quadrics"])
    span_idx = [names.index(q) for q in t["nonsquare_span"]]
    if ns.dim != len(span_idx):
        diffs.append({"field": "nonsquare_span", "dim": ns.dim})
    else:
        for row in ns.basis:
            if not space.contains(row):
                diffs.append({"field": "nonsquare_span", "not_in_L2": True})
        for i in span_idx:
            if not ns.contains(space.basis[i]):
                diffs.append({"field": "nonsquare_span",
                              "missing": names[i]})
    patterns = petri.sign_pattern_search(
        [space], basis.block_dims(),
        genus.genus_window(basis.genus, True))
    if len(patterns) != 1:
        diffs.append({"field": "flip_pair", "patterns": len(patterns)})
    else:
        signs = patterns[0].variable_signs()
        flips = [i + 1 for i, s in enumerate(signs) if s < 0]
        if flips != t["flip_pair"]:
            diffs.append({"field": "flip_pair", "computed": flips})
    return diffs


def _shifted(poly, shift):
    import sympy
    X = sympy.Symbol("X")
    expr = sympy.expand(
        sum(c * (X + shift) ** k for k, c in enumerate(poly)))
    out = [int(expr.coeff(X, k)) for k in range(len(poly))]
    return out


def _repro_sextics(source):
    t = tables.load_table("sextics")
    diffs = []
    for key, printed in sorted(t["models"].items()):
        N = int(key)
        rep = classify(N, source)
        if rep["verdict"] != "order-2":
            diffs.append({"field": key, "verdict": rep["verdict"]})
            continue
        inv = rep["involution"]
        if inv["quotient_genus"] != t["quotient_genus"][key]:
            diffs.append({"field": f"{key}:quotient_genus",
                          "computed": inv["quotient_genus"]})
        shift = t["x_shift"][key]
        expect = _shifted(printed, shift)
        if inv["model"]["poly"] != expect:
            diffs.append({"field": f"{key}:model",
                          "computed": inv["model"]["poly"],
                          "printed_shifted": expect})
        fp = t["fixed_points"].get(key)
        if fp is not None and inv["fixed_points"] != fp:
            diffs.append({"field": f"{key}:fixed_points",
                          "computed": inv["fixed_points"]})
    return diffs


_REPRO = {
    "thm1": _repro_thm1,
    "prop4_delta": _repro_prop4_delta,
    "odd_candidates": _repro_odd_candidates,
    "char2": _repro_char2,
    "r_parity": _repro_r_parity,
    "splittings": _repro_splittings,
    "crit1_odd": _repro_crit1_odd,
    "ell_lists": _repro_ell_lists,
    "petri645": _repro_petri645,
    "sextics": _repro_sextics,
}


def reproduce_table(name, source=None):
    stem = name.replace("-", "_")
    for cand, table in ((stem, stem),) + tuple(
            (k, k) for k in _REPRO
            if tables.load_table(k)["table"] == name):
        if cand in _REPRO:
            stem = cand
            break
    if stem not in _REPRO:
        raise ValueError(f"unknown table {name!r}; "
                         f"available: {', '.join(sorted(_REPRO))}")
    diffs = _REPRO[stem](source)
    return {"table": stem, "match": not diffs, "diffs": diffs,
            "flagged": _flags(stem)}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_genus(args):
    N = _level(args.N)
    out = {"level": N, "genus_x0": genus.genus_x0(N),
           "genus_x0_star": genus.genus_x0_star(N)}
    if args.json:
        print(_dump(out))
    else:
        print(f"X0({N}): genus {out['genus_x0']}")
        print(f"X0*({N}): genus {out['genus_x0_star']}")
    return 0


def cmd_delta(args):
    N = _level(args.N)
    if N % 2 == 0:
        raise ValueError("delta is defined for odd levels")
    out = {"level": N, "delta": genus.delta_2n(N),
           "genus_x0_star": genus.genus_x0_star(N),
           "genus_x0_star_2N": genus.genus_x0_star(2 * N)}
    if args.json:
        print(_dump(out))
    else:
        print(f"delta({N}) = g*(2N) - 2 g*(N) = {out['delta']} "
              f"(g*({N}) = {out['genus_x0_star']}, "
              f"g*({2 * N}) = {out['genus_x0_star_2N']})")
    return 0


def cmd_candidates(args):
    if args.kind == "odd":
        levels = genus.classification_candidates()
        note = "odd square-free composite levels inside the gonality bound"
    else:
        levels = genus.char2_candidates()
        note = "odd levels where the mod-2 reduction could be hyperelliptic"
    out = {"kind": args.kind, "count": len(levels), "levels": levels,
           "note": note}
    if args.json:
        print(_dump(out))
    else:
        print(f"{len(levels)} candidates ({note}):")
        print(" ".join(str(n) for n in levels))
    return 0


def cmd_discard(args):
    N = _level(args.N)
    verdict = criteria.lemma1_parity(N, args.prime, k_max=args.k,
                                     source=args.source)
    if args.json:
        print(_dump(verdict.to_dict()))
    else:
        w = verdict.witness
        state = "excluded" if verdict.excluded else "inconclusive"
        print(f"parity criterion at p={args.prime}: {state} "
              f"(sum {w['sum']}, threshold {w['threshold']})")
    return 0 if verdict.excluded else 1


def cmd_splitting(args):
    N = _level(args.N)
    sig = nfdata.splitting_signature(N, args.source)
    out = {"level": N, "genus": sum(d for _, d in sig),
           "splitting": [[lvl, d] for lvl, d in sig]}
    if args.json:
        print(_dump(out))
    else:
        body = " + ".join(f"{d}_{lvl}" for lvl, d in sig)
        print(f"J0*({N}) ~ {body}")
    return 0


def cmd_petri(args):
    N = _level(args.N)
    basis = nfdata.star_basis(N, source=args.source)
    g = basis.genus
    space = petri.vanishing_forms(basis, 2)
    ns = petri.nonsquare_subspace(space)
    window = list(genus.genus_window(g, N % 2 == 1))
    patterns = petri.sign_pattern_search([space], basis.block_dims(),
                                         window)
    out = {
        "level": N, "genus": g,
        "block_levels": basis.block_levels(),
        "block_dims": basis.block_dims(),
        "dim_L2": space.dim,
        "petri_general_dim": (g - 2) * (g - 3) // 2,
        "dim_L2_nonsquare": ns.dim,
        "expected_nonsquare": (g - 1) * (g - 6) // 2 if g >= 6 else None,
        "window": window,
        "patterns": [{"signs": _signs_str(p.signs),
                      "plus_dim": p.plus_dim,
                      "minus_dim": p.minus_dim} for p in patterns],
    }
    if args.json:
        print(_dump(out))
    else:
        print(f"X0*({N}): genus {g}, dim L2 = {space.dim} "
              f"(Petri general: {out['petri_general_dim']}), "
              f"non-square part {ns.dim}")
        if patterns:
            for p in out["patterns"]:
                print(f"  pattern {p['signs']} "
                      f"dims {p['plus_dim']}/{p['minus_dim']}")
        else:
            print("  no admissible sign pattern")
    return 0


def cmd_classify(args):
    N = _level(args.N)
    rep = classify(N, source=args.source)
    if args.json:
        print(_dump(rep))
    else:
        print(_human_report(rep))
    return 3 if rep["verdict"] == "unresolved" else 0


def _human_report(rep):
    N = rep["level"]
    lines = [f"X0*({N}): genus {rep['genus']}, verdict {rep['verdict']}"]
    for ev in rep["evidence"]:
        step = ev.get("step", ev.get("criterion", "?"))
        if step == "parity" and ev.get("excluded"):
            w = ev["witness"]
            lines.append(f"  parity p={ev['params']['p']}: sum {w['sum']} "
                         f"> {w['threshold']}")
        elif step == "window_subset" and ev.get("excluded"):
            w = ev["witness"]
            lines.append(f"  window {w['window']}: unattainable from "
                         f"blocks {w['block_dims']}")
        elif step == "restriction-window":
            lines.append(f"  restriction at p={ev['p']}: {ev['note']}")
        elif step == "petri":
            lines.append(f"  dim L2 = {ev['dim_L2']}, patterns: "
                         f"{ev['patterns_found']}")
        elif step == "orientation":
            state = ev["resolved"] or "refuted"
            lines.append(f"  pattern {ev['pattern']}: {state}")
    inv = rep.get("involution")
    if inv:
        lines.append(f"  involution: pattern {inv['sign_pattern']}, "
                     f"quotient genus {inv['quotient_genus']}, "
                     f"{inv['fixed_points']} fixed points")
        if "model" in inv:
            lines.append(f"  model: y^2 = {_poly_str(inv['model']['poly'])}")
    return "\n".join(lines)


def _poly_str(poly):
    terms = []
    for k in range(len(poly) - 1, -1, -1):
        c = poly[k]
        if not c:
            continue
        if k == 0:
            terms.append(f"{c:+d}")
        else:
            x = "x" if k == 1 else f"x^{k}"
            if c == 1:
                terms.append(f"+{x}")
            elif c == -1:
                terms.append(f"-{x}")
            else:
                terms.append(f"{c:+d}*{x}")
    body = " ".join(terms)
    return body[1:] if body.startswith("+") else body


def cmd_reproduce(args):
    names = sorted(_REPRO) if args.table == "all" else [args.table]
    rc = 0
    results = []
    for name in names:
        res = reproduce_table(name, source=args.source)
        results.append(res)
        if not res["match"]:
            rc = 1
    if args.json:
        print(_dump(results if args.table == "all" else results[0]))
    else:
        for res in results:
            state = "OK" if res["match"] else "MISMATCH"
            extra = (f", {len(res['flagged'])} known discrepancies flagged"
                     if res["flagged"] else "")
            print(f"{res['table']}: {state}{extra}")
            for d in res["diffs"]:
                print(f"  diff: {json.dumps(_jsonable(d), sort_keys=True)}")
    return rc


def cmd_cache(args):
    path = cache_path(args.cache_dir)
    if args.action == "clear":
        classnum.clear_cache()
        frobenius.clear_cache()
        if path.is_file():
            path.unlink()
        if not args.json:
            print(f"cache cleared ({path})")
        else:
            print(_dump({"path": str(path), "cleared": True}))
        return 0
    exists = path.is_file()
    out = {"path": str(path), "exists": exists, "schema": None,
           "classnum_entries": 0, "frobenius_entries": 0}
    if exists:
        try:
            data = json.loads(path.read_text())
            out["schema"] = data.get("schema")
            out["classnum_entries"] = len(data.get("classnum", {}))
            out["frobenius_entries"] = len(data.get("frobenius", {}))
        except (OSError, json.JSONDecodeError):
            out["schema"] = "unreadable"
    if args.json:
        print(_dump(out))
    else:
        print(f"cache file: {out['path']} "
              f"({'present' if exists else 'absent'})")
        if exists:
            print(f"  schema {out['schema']}, "
                  f"{out['classnum_entries']} class numbers, "
                  f"{out['frobenius_entries']} Frobenius polynomials")
    return 0


def _level(raw):
    N = int(raw)
    if N <= 1 or not is_squarefree(N):
        raise ValueError(f"level must be square-free and > 1, got {N}")
    return N


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="x0star",
        description="Automorphism classification of the star quotients "
                    "X0*(N) for square-free N.")
    ap.add_argument("--json", action="store_true",
                    help="machine-readable output")
    ap.add_argument("--orbit-dir", default=None,
                    help="newform fixture directory (default: "
                    f"${nfdata.ORBIT_DIR_ENV} or the bundled data path)")
    ap.add_argument("--cache-dir", default=".cache",
                    help="directory for the persisted computation cache")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("genus", help="genus of X0(N) and X0*(N)")
    p.add_argument("N")
    p.set_defaults(func=cmd_genus)

    p = sub.add_parser("delta", help="g*(2N) - 2 g*(N) for odd N")
    p.add_argument("N")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("candidates", help="finite candidate pools")
    p.add_argument("kind", choices=["odd", "hyp2"])
    p.set_defaults(func=cmd_candidates)

    p = sub.add_parser("discard",
                       help="parity exclusion criterion at one prime")
    p.add_argument("N")
    p.add_argument("--prime", "-p", type=int, required=True)
    p.add_argument("--k", type=int, default=None,
                   help="largest degree index (default: adaptive)")
    p.set_defaults(func=cmd_discard)

    p = sub.add_parser("splitting", help="jacobian block decomposition")
    p.add_argument("N")
    p.set_defaults(func=cmd_splitting)

    p = sub.add_parser("petri",
                       help="canonical quadrics and sign patterns")
    p.add_argument("N")
    p.set_defaults(func=cmd_petri)

    p = sub.add_parser("classify",
                       help="full automorphism-group decision")
    p.add_argument("N")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reproduce-table",
                       help="regenerate a bundled table and diff it")
    p.add_argument("table",
                   help="table name or 'all' "
                        f"({', '.join(sorted(_REPRO))})")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("cache", help="persisted cache management")
    p.add_argument("action", choices=["show", "clear"])
    p.set_defaults(func=cmd_cache)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.source = Path(args.orbit_dir) if args.orbit_dir else None
    if args.command != "cache":
        load_cache(args.cache_dir)
    try:
        rc = args.func(args)
    except (nfdata.FixtureError, nfdata.OrbitInvariantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (petri.PrecisionError, hypermodel.PrecisionError) as exc:
        print(f"error: insufficient fixture precision: {exc}",
              file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ContradictionError, ArithmeticError,
            petri.SignResolutionError) as exc:
        print(f"error: internal contradiction: {exc}", file=sys.stderr)
        return 3
    finally:
        if args.command != "cache":
            try:
                save_cache(args.cache_dir)
            except OSError:
                pass
    return rc


if __name__ == "__main__":
    sys.exit(main())
