"""Compare the Steenrod formula with the R-bullet oracle over a grid of BO(n) monomials."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from qfi import bo_ring as bo


@dataclass
class SweepConfig:
    max_n: int = 6
    max_degree: int = 12
    max_k: int = 12
    literal_binomial: bool = False  # use C(m-k, j) instead of the Wu coefficient


def literal_sq_generator(ring: bo.PolyRing, m: int, k: int) -> bo.Poly:
    if k == 0:
        return ring.gen(m - 1)
    if k > m:
        return ring.zero()
    u = [ring.one()] + [ring.gen(i) for i in range(ring.ngens)] + [ring.zero()] * (k + 1)
    acc = ring.zero()
    for j in range(k + 1):
        if (m - k) >= j and ((m - k) & j) == j:
            acc = acc + u[k - j] * u[m + j]
    return acc


def sweep(cfg: SweepConfig) -> tuple[int, list[tuple]]:
    cases, bad = 0, []
    for n in range(1, cfg.max_n + 1):
        ring = bo.bo_ring(n)
        if cfg.literal_binomial:
            # generators only: the product rule is shared
            for m in range(1, n + 1):
                for k in range(cfg.max_k + 1):
                    cases += 1
                    if bo.delta_star_sym(literal_sq_generator(ring, m, k)) != bo.sq_oracle_sym(k, ring.gen(m - 1)):
                        bad.append((n, f"u{m}", k))
            continue
        for e in bo.monomials(n, cfg.max_degree):
            x = bo.monomial(ring, e)
            for k in range(cfg.max_k + 1):
                cases += 1
                if bo.delta_star_sym(bo.sq(k, x)) != bo.sq_oracle_sym(k, x):
                    bad.append((n, e, k))
    return cases, bad


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=SweepConfig.max_n)
    ap.add_argument("--max-degree", type=int, default=SweepConfig.max_degree)
    ap.add_argument("--max-k", type=int, default=SweepConfig.max_k)
    ap.add_argument("--literal-binomial", action="store_true")
    a = ap.parse_args()
    cfg = SweepConfig(a.max_n, a.max_degree, a.max_k, a.literal_binomial)
    start = time.perf_counter()
    cases, bad = sweep(cfg)
    print(f"{cases} cases, {len(bad)} mismatches, {time.perf_counter() - start:.2f}s")
    for row in bad[:10]:
        print("  mismatch:", row)


if __name__ == "__main__":
    main()
