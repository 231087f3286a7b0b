"""Congruence lattices, simplicity and the inverse law across finite meadows.

    python3 scripts/congruence_survey.py --max-n 42
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

from meadowkit.congruence import all_congruences, is_simple, subdirect_decompose
from meadowkit.meadows import make_meadow
from meadowkit.modelcheck import check_il
from meadowkit.numeric import factorize, is_squarefree


@dataclass
class SurveyConfig:
    max_n: int = 42
    products: str = "prod:[zp:2,zp:2];prod:[zp:2,zp:3];prod:[zp:3,zp:3];prod:[zp:2,zp:5]"
    out: str | None = None


def survey_one(desc: str) -> dict:
    m = make_meadow(desc)
    lattice = all_congruences(m)
    dec = subdirect_decompose(m)
    return {
        "meadow": desc,
        "size": m.size,
        "congruences": len(lattice),
        "simple": is_simple(m),
        "inverse_law": check_il(m).holds,
        "si_factors": [q.size for q in dec.quotients],
        "decomposition_ok": dec.ok,
    }


def run(cfg: SurveyConfig) -> dict:
    descs = [f"zsf:{n}" for n in range(2, cfg.max_n + 1) if is_squarefree(n)]
    descs += [d for d in cfg.products.split(";") if d]
    rows = [survey_one(d) for d in descs]
    for r in rows:
        n = int(r["meadow"][4:]) if r["meadow"].startswith("zsf:") else None
        # Z/n with n squarefree has 2^k congruences for k prime factors
        r["expected"] = 2 ** len(factorize(n)) if n else None
    consistent = all(r["simple"] == r["inverse_law"] and r["decomposition_ok"] for r in rows)
    consistent &= all(r["expected"] in (None, r["congruences"]) for r in rows)
    return {"config": asdict(cfg), "rows": rows, "consistent": consistent}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for k, v in asdict(SurveyConfig()).items():
        ap.add_argument("--" + k.replace("_", "-"), type=type(v) if v is not None else str, default=v)
    cfg = SurveyConfig(**vars(ap.parse_args()))
    res = run(cfg)
    for r in res["rows"]:
        print(
            f"{r['meadow']:<22} |M|={r['size']:<3} cong={r['congruences']:<3} "
            f"simple={r['simple']!s:<5} IL={r['inverse_law']!s:<5} factors={r['si_factors']}"
        )
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(res, fh, indent=2)
    return 0 if res["consistent"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
