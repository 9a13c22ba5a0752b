"""Fitted l1 growth exponents of unstable examples against (1 - mu/nu)/2.

Includes the three-point boundary case (1, 1, -0.2), where mu = 3, nu = 4:
the fit decides between exponent 1/8 and the competing value 1/4.

    python3 scripts/growth_exponents.py [--out results/growth.json]
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field

from convpow.classify import classify, growth_exponent_fit
from convpow.fixtures import quartic_example, cubic_drift, three_point
from convpow.symbol import analyze


@dataclass
class Config:
    windows: list[tuple[int, int]] = field(
        default_factory=lambda: [(100, 800), (500, 8000), (1000, 8192)])
    out: str | None = None


CASES = {
    "cubic drift a=1/8": lambda: cubic_drift(1 / 8),
    "cubic drift a=1/4": lambda: cubic_drift(1 / 4),
    "three-point boundary (1, 1, -0.2)": lambda: three_point(1.0, 1.0, -0.2),
    "quartic stable": quartic_example,
}


def run(cfg: Config) -> dict:
    out = {}
    for name, make in CASES.items():
        f = make()
        _, verdict = classify(f)
        g = f * (1 / analyze(f).normalization)
        fits = {f"{a}-{b}": growth_exponent_fit(g, a, b) for a, b in cfg.windows}
        target = verdict.growth_exponent or 0.0
        out[name] = {"case": verdict.case.value, "predicted": target, "fitted": fits}
        cols = " ".join(f"{v:8.4f}" for v in fits.values())
        print(f"{name:36s} {verdict.case.value:9s} predicted {target:6.4f}  fitted {cols}")
    return out


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
