"""Transmutation discrepancies and empirical Carne-type constants on the lazy path walk.

    python3 scripts/carne_constants.py [--dim 401] [--out results/carne.json]
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field

from convpow.carne import (BandedHermitian, WalkParams, carne_bound_report, diag_lower_check,
                           regularized_bound_report, transmutation_check)


@dataclass
class Config:
    dim: int = 401
    diag_dim: int = 4001
    ks: list[int] = field(default_factory=lambda: [1, 2, 3])
    s: float = 0.5
    c: float = 0.1
    ns: list[int] = field(default_factory=lambda: [25, 50, 100, 200])
    diag_ns: list[int] = field(default_factory=lambda: [64, 128, 256, 512, 1024])
    out: str | None = None


def run(cfg: Config) -> dict:
    M = BandedHermitian.path_walk(cfg.dim)
    out = {}
    for k in cfg.ks:
        params = WalkParams(cfg.s, k)
        disc = max(transmutation_check(M, params, n) for n in cfg.ns if n <= 200)
        rep = carne_bound_report(M, k, cfg.ns, cfg.c)
        reg = regularized_bound_report(M, k, 1, cfg.ns, cfg.c)
        diag = diag_lower_check(BandedHermitian.path_walk(cfg.diag_dim), k, cfg.diag_ns)
        out[k] = {"discrepancy": disc, "C_of_n": rep.C_of_n, "spread": rep.spread,
                  "locality_violations": rep.locality_violations,
                  "regularized_C_of_n": reg.C_of_n, "annulus_of_n": reg.annulus_of_n,
                  "diag_ratios": diag.ratios}
        print(f"k={k}: transmutation discrepancy {disc:.2e}, locality violations "
              f"{rep.locality_violations}")
        print("   C(n)      " + " ".join(f"{v:9.4f}" for v in rep.C_of_n.values())
              + f"   spread {rep.spread:.3f}")
        print("   (I-M)M_k^n" + " ".join(f"{v:9.4f}" for v in reg.C_of_n.values()))
        print("   diagonal  " + " ".join(f"{v:9.4f}" for v in diag.ratios.values()))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dim", type=int, default=401)
    p.add_argument("--out", default=None)
    a = p.parse_args()
    cfg = Config(dim=a.dim, out=a.out)
    results = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "results": {str(k): v for k, v in results.items()}},
                      fh, indent=2, default=str)


if __name__ == "__main__":
    main()
