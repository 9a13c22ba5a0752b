"""Scaled sup errors of the local limit approximation for the example library.

    python3 scripts/llt_reproduction.py [--out results/llt.json]
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from convpow.fixtures import complex_single, cos4, quartic_example, cubic_drift, three_point
from convpow.llt import llt_error_curve, llt_odd3_error
from convpow.symbol import analyze
from convpow.zfun import bernoulli, lazy_bernoulli, psi


@dataclass
class Config:
    even_ns: list[int] = field(default_factory=lambda: [200, 800, 3200])
    odd_ns: list[int] = field(default_factory=lambda: [500, 2000, 8000, 32000])
    out: str | None = None


CASES = {
    "quartic (gamma = 1/9)": quartic_example,
    "bernoulli": bernoulli,
    "lazy bernoulli s=1/2": lambda: lazy_bernoulli(0.5),
    "cos4 symbol": cos4,
    "three-point twin (1/2, 1/4, -1/4)": lambda: three_point(0.5, 0.25, -0.25),
    "complex single": complex_single,
    "mixed orders psi(1/sqrt2, 2)": lambda: psi(2 ** -0.5, 2),
}


def run(cfg: Config) -> dict:
    results = {"even": {}, "odd": {}}
    for name, make in CASES.items():
        f = make()
        t0 = time.perf_counter()
        reps = llt_error_curve(f, analyze(f), cfg.even_ns)
        results["even"][name] = {str(r.n): r.sup_error_scaled for r in reps}
        errs = " ".join(f"{r.sup_error_scaled:10.3e}" for r in reps)
        print(f"{name:36s} {errs}   ({time.perf_counter() - t0:.2f}s)")
    print("\nodd order three, cubic-drift example a = 1/8 (scaled by n^{1/3}):")
    for n in cfg.odd_ns:
        e = llt_odd3_error(cubic_drift(1 / 8), n)
        results["odd"][str(n)] = e
        print(f"  n={n:6d}  {e:.4f}")
    return results


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default=None)
    cfg = Config(out=p.parse_args().out)
    results = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "results": results}, fh, indent=2)


if __name__ == "__main__":
    main()
