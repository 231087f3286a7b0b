"""Run the acceptance criteria and write a JSON summary.

    python3 scripts/run_acceptance.py --out acceptance.json
"""

from __future__ import annotations

import argparse
import importlib.util
import json
import pathlib
import time
from dataclasses import asdict, dataclass

ROOT = pathlib.Path(__file__).resolve().parents[1]


@dataclass
class AcceptanceConfig:
    only: str = ""
    out: str | None = None


def _criteria():
    spec = importlib.util.spec_from_file_location("acceptance", ROOT / "tests" / "test_acceptance.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod.CRITERIA


def run(cfg: AcceptanceConfig) -> dict:
    wanted = {s for s in cfg.only.split(",") if s}
    rows = []
    for name, fn in _criteria():
        if wanted and name.split()[0] not in wanted:
            continue
        t = time.perf_counter()
        ok, detail = fn()
        rows.append({"criterion": name, "passed": ok, "detail": detail, "seconds": round(time.perf_counter() - t, 2)})
        print(f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}", flush=True)
    return {"config": asdict(cfg), "criteria": rows, "passed": all(r["passed"] for r in rows)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", default="", help="comma-separated criterion numbers")
    ap.add_argument("--out", default=None)
    cfg = AcceptanceConfig(**vars(ap.parse_args()))
    res = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(res, fh, indent=2)
    return 0 if res["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
