"""Sweep the single-equation specification over pairs of small primes.

    python3 scripts/single_spec_sweep.py --max-prime 13 --bound 2000 --out sweep.json
"""

from __future__ import annotations

import argparse
import itertools
import json
from dataclasses import asdict, dataclass

from meadowkit.numeric import primes_upto
from meadowkit.numberfield import verify_single_spec


@dataclass
class SweepConfig:
    max_prime: int = 13
    bound: int = 2000
    workers: int = 1
    out: str | None = None


def run(cfg: SweepConfig) -> dict:
    rows = []
    for p0, p1 in itertools.combinations(primes_upto(cfg.max_prime), 2):
        r = verify_single_spec(p0, p1, cfg.bound, workers=cfg.workers)
        rows.append({
            "p0": p0,
            "p1": p1,
            "passed": r["passed"],
            "primes_checked": r["primes_checked"],
            "primes_without_root": r["primes_without_root"],
            "legendre_discrepancies": r["legendre_discrepancies"],
        })
    return {"config": asdict(cfg), "pairs": rows, "all_passed": all(r["passed"] for r in rows)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for k, v in asdict(SweepConfig()).items():
        ap.add_argument("--" + k.replace("_", "-"), type=type(v) if v is not None else str, default=v)
    cfg = SweepConfig(**vars(ap.parse_args()))
    res = run(cfg)
    for r in res["pairs"]:
        print(f"p0={r['p0']:<3} p1={r['p1']:<3} primes={r['primes_checked']:<5} {'ok' if r['passed'] else 'FAIL'}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(res, fh, indent=2)
    return 0 if res["all_passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
