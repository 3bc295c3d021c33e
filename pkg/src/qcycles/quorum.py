"""Cyclic quorum sets with R-redundant pair coverage.

A base ``B`` in Z_N generates N quorums by rotation. The number of rotated
quorums that contain a fixed pair ``(i, j)`` equals the multiplicity of the
difference ``(i - j) mod N`` among ordered pairs of ``B``, so redundancy can
be checked on the base alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np


class QuorumError(ValueError):
    pass


class InfeasibleError(QuorumError):
    pass


class BudgetExhausted(QuorumError):
    pass


@dataclass(frozen=True)
class QuorumBase:
    n: int
    members: tuple[int, ...]
    redundancy: int = 1

    def __post_init__(self):
        m = tuple(sorted(set(int(x) for x in self.members)))
        if len(m) != len(self.members):
            raise QuorumError(f"duplicate residues in {self.members}")
        if not m or m[0] < 0 or m[-1] >= self.n:
            raise QuorumError(f"members must be non-empty residues in [0, {self.n})")
        if self.redundancy < 1:
            raise QuorumError("redundancy must be >= 1")
        object.__setattr__(self, "members", m)

    @property
    def size(self) -> int:
        return len(self.members)

    def verified(self) -> bool:
        return verify_redundancy(self)


@dataclass(frozen=True)
class QuorumSet:
    base: QuorumBase
    quorums: tuple[tuple[int, ...], ...]

    @classmethod
    def from_base(cls, base: QuorumBase) -> "QuorumSet":
        return cls(base, tuple(rotate_quorum(base, i) for i in range(base.n)))

    def hub(self, i: int) -> int:
        """Hub of quorum ``i``: the rotated image of the base's first member."""
        return (self.base.members[0] + i) % self.base.n

    def __len__(self) -> int:
        return len(self.quorums)


def rotate_quorum(base: QuorumBase, i: int) -> tuple[int, ...]:
    """Members of quorum ``i`` in base order (first element is the hub)."""
    if not 0 <= i < base.n:
        raise QuorumError(f"rotation index {i} outside [0, {base.n})")
    return tuple((x + i) % base.n for x in base.members)


def difference_multiplicity(members: Iterable[int], n: int) -> dict[int, int]:
    """lambda(d) for d in 1..n-1: ordered pairs (x, y), x != y, with x - y = d mod n."""
    lam = _lambda_array(members, n)
    return {d: int(lam[d]) for d in range(1, n)}


def _lambda_array(members: Iterable[int], n: int) -> np.ndarray:
    m = np.fromiter(members, dtype=np.int64)
    diffs = (m[:, None] - m[None, :]) % n
    lam = np.bincount(diffs.ravel(), minlength=n)
    lam[0] = 0
    return lam


def verify_redundancy(base: QuorumBase) -> bool:
    if base.n == 1:
        return True
    lam = _lambda_array(base.members, base.n)
    return int(lam[1:].min()) >= base.redundancy


def pair_count(k: int) -> int:
    return k * (k - 1) // 2


def total_pair_count(n: int, k: int) -> int:
    return n * pair_count(k)


def sizing_estimate(k: int, r: int) -> int:
    """ceil(sqrt(r) * k), the growth estimate for the enlarged quorum size."""
    if k < 1 or r < 1:
        raise QuorumError("k and r must be >= 1")
    # exact integer ceil of sqrt(r*k*k)
    return math.isqrt(r * k * k - 1) + 1


def size_lower_bound(n: int, r: int) -> int:
    """Smallest k with k(k-1) >= r(n-1): each of the n-1 differences needs r hits."""
    k = 1
    while k * (k - 1) < r * (n - 1):
        k += 1
    return k


def _check_feasible(n: int, r: int) -> None:
    if n < 3:
        raise QuorumError("n must be >= 3")
    if r < 1:
        raise QuorumError("r must be >= 1")
    # the full residue set gives lambda(d) = n for every d
    if r > n:
        raise InfeasibleError(
            f"redundancy {r} unreachable for n={n}: even the full set Z_{n} "
            f"covers each difference only {n} times")


def find_min_redundant_base(n: int, r: int = 1, strategy: str = "exhaustive",
                            seed: int = 0, budget: int = 200_000) -> QuorumBase:
    """Smallest base whose rotations cover every node pair at least ``r`` times.

    ``exhaustive`` returns the lexicographically first base of provably minimal
    size among bases containing 0. ``randomized`` runs seeded restart
    hill-climbing and returns the smallest verified base found within
    ``budget`` swap evaluations.
    """
    _check_feasible(n, r)
    if strategy == "exhaustive":
        return _exhaustive(n, r)
    if strategy == "randomized":
        return _randomized(n, r, seed, budget)
    raise QuorumError(f"unknown strategy {strategy!r}")


def _exhaustive(n: int, r: int) -> QuorumBase:
    for k in range(size_lower_bound(n, r), n + 1):
        found = _dfs_first(n, r, k)
        if found is not None:
            return QuorumBase(n, found, r)
    raise InfeasibleError(f"no base for n={n}, r={r}")  # unreachable after _check_feasible


def _dfs_first(n: int, r: int, k: int) -> tuple[int, ...] | None:
    """Lexicographically first k-subset containing 0 with min lambda >= r.

    Branches are pruned when the remaining deficit exceeds the number of
    ordered differences the still-missing elements can contribute.
    """
    lam = [0] * n
    chosen = [0]

    def deficit() -> int:
        return sum(r - lam[d] for d in range(1, n) if lam[d] < r)

    def add(x: int, sign: int) -> None:
        for y in chosen:
            lam[(x - y) % n] += sign
            lam[(y - x) % n] += sign

    def rec(start: int) -> bool:
        s = len(chosen)
        if s == k:
            return deficit() == 0
        if deficit() > k * (k - 1) - s * (s - 1):
            return False
        need = k - s
        for x in range(start, n - need + 1):
            add(x, 1)
            chosen.append(x)
            if rec(x + 1):
                return True
            chosen.pop()
            add(x, -1)
        return False

    return tuple(chosen) if rec(1) else None


def _randomized(n: int, r: int, seed: int, budget: int) -> QuorumBase:
    rng = np.random.default_rng(seed)
    remaining = budget
    k = size_lower_bound(n, r)
    # each size gets a slice so an unreachable lower bound cannot eat the budget
    per_size = max(budget // 4, 1)
    while k <= n and remaining > 0:
        if k == n:
            return QuorumBase(n, tuple(range(n)), r)
        spend = min(per_size, remaining)
        found, used = _hill_climb(n, r, k, rng, spend)
        remaining -= used
        if found is not None:
            return QuorumBase(n, found, r)
        k += 1
    raise BudgetExhausted(f"no verified base for n={n}, r={r} within budget {budget}")


def _deficit(lam: np.ndarray, r: int) -> int:
    return int(np.maximum(0, r - lam[1:]).sum())


def _hill_climb(n: int, r: int, k: int, rng: np.random.Generator,
                budget: int) -> tuple[tuple[int, ...] | None, int]:
    """Restarted first-improvement swap search with 0 pinned in the base."""
    used = 0
    stall_limit = 4 * n * k
    while used < budget:
        rest = rng.choice(np.arange(1, n), size=k - 1, replace=False)
        members = np.concatenate(([0], rest))
        lam = _lambda_array(members, n)
        score = _deficit(lam, r)
        stall = 0
        while score > 0 and used < budget and stall < stall_limit:
            used += 1
            pos = int(rng.integers(1, k))
            out = int(members[pos])
            outside = np.setdiff1d(np.arange(n), members, assume_unique=False)
            inn = int(outside[rng.integers(0, len(outside))])
            others = np.delete(members, pos)
            new = lam.copy()
            np.subtract.at(new, (out - others) % n, 1)
            np.subtract.at(new, (others - out) % n, 1)
            np.add.at(new, (inn - others) % n, 1)
            np.add.at(new, (others - inn) % n, 1)
            new[0] = 0
            s = _deficit(new, r)
            if s <= score:
                stall = 0 if s < score else stall + 1
                members[pos] = inn
                lam, score = new, s
            else:
                stall += 1
        if score == 0:
            return tuple(sorted(int(x) for x in members)), used
    return None, used


def parse_base_line(line: str) -> QuorumBase | None:
    """One ``N R k m_0 ... m_{k-1}`` entry, re-verified; ``None`` for blank/comment lines."""
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    try:
        vals = [int(x) for x in line.split()]
    except ValueError:
        raise QuorumError("non-integer token") from None
    if len(vals) < 4:
        raise QuorumError("expected 'N R k m_0 ...'")
    n, r, k, members = vals[0], vals[1], vals[2], vals[3:]
    if len(members) != k:
        raise QuorumError(f"declared size {k} but {len(members)} members")
    base = QuorumBase(n, tuple(members), r)
    if not verify_redundancy(base):
        raise QuorumError(f"base {members} does not reach R={r} for N={n}")
    return base


def read_bases(path: str | Path) -> list[QuorumBase]:
    """Load a base-set file, rejecting any entry that fails verification."""
    out = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        try:
            base = parse_base_line(raw)
        except QuorumError as exc:
            raise QuorumError(f"{path}:{lineno}: {exc}") from None
        if base is not None:
            out.append(base)
    return out


def format_base(base: QuorumBase) -> str:
    return " ".join(str(x) for x in (base.n, base.redundancy, base.size, *base.members))


def write_bases(path: str | Path, bases: Iterable[QuorumBase]) -> None:
    Path(path).write_text("".join(format_base(b) + "\n" for b in bases))


def lookup_base(bases: Iterable[QuorumBase], n: int, r: int) -> QuorumBase | None:
    for b in bases:
        if b.n == n and b.redundancy == r:
            return b
    return None
