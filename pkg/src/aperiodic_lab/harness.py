"""Seeded theorem-verification experiments with JSON reports.

Each runner samples outer automorphisms from the homologically trivial
(mod 3) generator family, probes orbits of conjugacy classes, free factor
classes, or splittings, and records a histogram of outcomes.  A violation
is a Period(p > 1) outcome under the congruence hypothesis; the shipped
configurations expect zero.  Control sections rerun the probe with
automorphisms outside the congruence kernel, where genuine periods exist,
so the hypotheses are shown necessary.

Reports are deterministic functions of (config, seed) apart from the
elapsed field.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

from .aut import (
    FreeAutomorphism,
    ad,
    basis_cycle,
    compose,
    identity_automorphism,
    inverse,
    is_inner,
    sample,
    standard_generators,
    swap,
)
from .homology import (
    abelianization,
    finite_order,
    identity_matrix,
    in_ia3,
)
from .splittings import (
    MarkedGraph,
    edge_of_groups,
    rose_marked,
    splitting_orbit_period,
    theta_marked,
)
from .subgroups import (
    FreeFactorSystem,
    OrbitOutcome,
    exact_word_orbit,
    image_class,
    orbit_period,
    subgroup_class,
)
from .words import Alphabet, CyclicWord, Word, parse_word, word_str


@dataclass(frozen=True)
class ExperimentConfig:
    rank: int = 2
    family: str = "ia3"
    samples: int = 100
    budget: int = 5
    pool_size: int = 5
    pool_length: int = 6
    max_iter: int = 12
    length_cap: int = 10_000
    seed: int = 0
    out: Optional[str] = None

    def __post_init__(self):
        if self.rank < 2:
            raise ValueError("free-group experiments need rank >= 2")
        for name in ("samples", "budget", "pool_size", "pool_length", "max_iter", "length_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


def _histogram() -> Dict[str, int]:
    return {"Period(1)": 0, "Period(>1)": 0, "NoPeriodWithin": 0, "Blowup": 0}


def _record(hist: Dict[str, int], outcome: OrbitOutcome) -> bool:
    """Update the histogram; returns True when the outcome is a violation."""
    if outcome.kind == "Period":
        if outcome.period == 1:
            hist["Period(1)"] += 1
            return False
        hist["Period(>1)"] += 1
        return True
    hist[outcome.kind] += 1
    return False


def _outcome_json(outcome: OrbitOutcome) -> dict:
    return {
        "outcome": outcome.kind,
        "period": outcome.period,
        "iterations": outcome.iterations,
    }


def _finish(report: dict, start: float, path: Optional[str]) -> dict:
    report["violations_count"] = len(report["violations"])
    report["elapsed"] = time.perf_counter() - start
    if path:
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def _random_cyclic_word(alphabet: Alphabet, max_len: int, rng: random.Random) -> CyclicWord:
    length = rng.randrange(1, max_len + 1)
    letters: List[int] = []
    while len(letters) < length:
        letter = rng.choice(alphabet.signed_letters())
        if letters and letters[-1] == -letter:
            continue
        letters.append(letter)
    return CyclicWord(alphabet, letters)


def run_conjugacy_experiment(cfg: ExperimentConfig) -> dict:
    """Orbits of conjugacy classes (outer version) and of exact words under
    a fixed representative (Aut version), for sampled congruence-kernel
    automorphisms.  Expected: no Period(p > 1) in either mode."""
    start = time.perf_counter()
    alphabet = Alphabet(cfg.rank)
    gens = standard_generators(cfg.rank, cfg.family)
    rng = random.Random(cfg.seed)
    hist_outer = _histogram()
    hist_aut = _histogram()
    violations = []
    for trial in range(cfg.samples):
        phi = sample(gens, cfg.budget, rng.randrange(2**32))
        assert in_ia3(phi), "sampled automorphism left the congruence kernel"
        pool = [
            _random_cyclic_word(alphabet, cfg.pool_length, rng)
            for _ in range(cfg.pool_size)
        ]
        for cyclic in pool:
            outcome = orbit_period(phi, cyclic, cfg.max_iter, cfg.length_cap)
            if _record(hist_outer, outcome):
                violations.append(
                    {
                        "trial": trial,
                        "mode": "outer",
                        "word": word_str(cyclic.as_word()),
                        **_outcome_json(outcome),
                    }
                )
            exact = exact_word_orbit(
                phi, cyclic.as_word(), cfg.max_iter, cfg.length_cap
            )
            if _record(hist_aut, exact):
                violations.append(
                    {
                        "trial": trial,
                        "mode": "aut",
                        "word": word_str(cyclic.as_word()),
                        **_outcome_json(exact),
                    }
                )

    # inner sanity: conjugation fixes every class
    inner_ok = True
    for _ in range(5):
        w = _random_cyclic_word(alphabet, cfg.pool_length, rng).as_word()
        phi_inner = ad(w)
        target = _random_cyclic_word(alphabet, cfg.pool_length, rng)
        outcome = orbit_period(phi_inner, target, cfg.max_iter, cfg.length_cap)
        inner_ok = inner_ok and outcome == OrbitOutcome("Period", 1)

    # control: the basis swap is outside the kernel and has genuine 2-orbits
    control_hist = _histogram()
    sw = swap(alphabet, 1, 2)
    control_examples = [CyclicWord(alphabet, (1,)), CyclicWord(alphabet, (2,))]
    for cyclic in control_examples:
        _record(control_hist, orbit_period(sw, cyclic, cfg.max_iter, cfg.length_cap))

    report = {
        "experiment": "conjugacy",
        "config": asdict(cfg),
        "trials": cfg.samples,
        "outcomes_outer": hist_outer,
        "outcomes_aut": hist_aut,
        "inner_sanity_period1": inner_ok,
        "control": {
            "automorphism": "swap x1<->x2",
            "outcomes": control_hist,
            "nontrivial_periods": control_hist["Period(>1)"],
        },
        "violations": violations,
    }
    return _finish(report, start, cfg.out)


def _random_proper_subsets(rank: int, rng: random.Random) -> List[frozenset]:
    """One or two disjoint nonempty proper basis subsets."""
    indices = list(range(1, rank + 1))
    rng.shuffle(indices)
    size = rng.randrange(1, rank)
    first = frozenset(indices[:size])
    if rank - size >= 2 and rng.random() < 0.5:
        second_size = rng.randrange(1, rank - size)
        return [first, frozenset(indices[size : size + second_size])]
    return [first]


def run_factor_experiment(cfg: ExperimentConfig) -> dict:
    """Orbits of witness free factor classes under sampled congruence-kernel
    automorphisms.  Factors are built by construction: images of basis
    subsets under random certified automorphisms."""
    start = time.perf_counter()
    alphabet = Alphabet(cfg.rank)
    gens = standard_generators(cfg.rank, cfg.family)
    nielsen = standard_generators(cfg.rank, "nielsen")
    rng = random.Random(cfg.seed)
    hist = _histogram()
    violations = []
    for trial in range(cfg.samples):
        phi = sample(gens, cfg.budget, rng.randrange(2**32))
        witness = sample(nielsen, min(cfg.budget, 4), rng.randrange(2**32))
        subsets = _random_proper_subsets(cfg.rank, rng)
        system = FreeFactorSystem(witness, subsets)
        for cls in system.classes:
            outcome = orbit_period(phi, cls, cfg.max_iter, cfg.length_cap)
            if _record(hist, outcome):
                violations.append(
                    {
                        "trial": trial,
                        "class": repr(cls),
                        **_outcome_json(outcome),
                    }
                )

    control_hist = _histogram()
    control_period = None
    if cfg.rank >= 3:
        cycle = basis_cycle(alphabet, [1, 2, 3])
        cls = subgroup_class(alphabet, [Word(alphabet, (1,))])
        outcome = orbit_period(cycle, cls, cfg.max_iter, cfg.length_cap)
        _record(control_hist, outcome)
        control_period = outcome.period
    identity_ok = all(
        orbit_period(
            identity_automorphism(alphabet),
            subgroup_class(alphabet, [Word(alphabet, (i,))]),
            cfg.max_iter,
        )
        == OrbitOutcome("Period", 1)
        for i in alphabet.letters()
    )

    report = {
        "experiment": "factors",
        "config": asdict(cfg),
        "trials": cfg.samples,
        "outcomes": hist,
        "identity_sanity_period1": identity_ok,
        "control": {
            "automorphism": "3-cycle x1->x2->x3->x1" if cfg.rank >= 3 else None,
            "outcomes": control_hist,
            "period": control_period,
        },
        "violations": violations,
    }
    return _finish(report, start, cfg.out)


def run_torsion_experiment(cfg: ExperimentConfig) -> dict:
    """Sampled non-inner congruence-kernel automorphisms have no inner power
    up to the iteration bound.

    A shortcut disposes of most samples exactly: an inner power forces the
    abelianized action to have finite order, and a finite-order integer
    matrix congruent to I mod 3 is I.  Samples whose abelianization is not I
    therefore certify themselves; the rest iterate powers with an honest
    length cap (capped samples count as Blowup, not as clean trials).
    """
    start = time.perf_counter()
    alphabet = Alphabet(cfg.rank)
    gens = standard_generators(cfg.rank, cfg.family)
    rng = random.Random(cfg.seed)
    clean = 0
    skipped_inner = 0
    blowups = 0
    certified_by_homology = 0
    checked_by_iteration = 0
    violations = []
    attempts = 0
    max_attempts = cfg.samples * 20
    while clean < cfg.samples and attempts < max_attempts:
        attempts += 1
        phi = sample(gens, cfg.budget, rng.randrange(2**32))
        if is_inner(phi) is not None:
            skipped_inner += 1
            continue
        ab = abelianization(phi)
        if ab != identity_matrix(cfg.rank):
            # infinite-order abelianization: no power can be inner
            assert finite_order(ab) is None
            certified_by_homology += 1
            clean += 1
            continue
        power = phi
        capped = False
        inner_power = None
        for k in range(2, cfg.max_iter + 1):
            power = compose(phi, power)
            if power.max_image_length() > cfg.length_cap:
                capped = True
                break
            if is_inner(power) is not None:
                inner_power = k
                break
        if capped:
            blowups += 1
            continue
        checked_by_iteration += 1
        clean += 1
        if inner_power is not None:
            violations.append({"attempt": attempts, "order": inner_power})

    control_order = None
    sw = swap(alphabet, 1, 2)
    for k in range(1, cfg.max_iter + 1):
        if is_inner(sw**k) is not None:
            control_order = k
            break

    report = {
        "experiment": "torsion",
        "config": asdict(cfg),
        "trials": clean,
        "attempts": attempts,
        "skipped_inner": skipped_inner,
        "blowups": blowups,
        "certified_by_homology": certified_by_homology,
        "checked_by_iteration": checked_by_iteration,
        "control": {"automorphism": "swap x1<->x2", "order": control_order},
        "violations": violations,
    }
    return _finish(report, start, cfg.out)


def default_splitting_pool(alphabet: Alphabet) -> List[MarkedGraph]:
    """Rose, a two-vertex splitting with cyclic vertex groups, and (rank 2)
    the theta graph."""
    pool = [rose_marked(alphabet)]
    left = [Word(alphabet, (1,))]
    right = [Word(alphabet, (i,)) for i in range(2, alphabet.rank + 1)]
    pool.append(edge_of_groups(alphabet, left, right))
    if alphabet.rank == 2:
        pool.append(theta_marked(alphabet))
    return pool


def run_splitting_experiment(cfg: ExperimentConfig) -> dict:
    """Orbits of marked-graph splittings under sampled congruence-kernel
    automorphisms: never a Period(p > 1)."""
    start = time.perf_counter()
    alphabet = Alphabet(cfg.rank)
    gens = standard_generators(cfg.rank, cfg.family)
    rng = random.Random(cfg.seed)
    pool = default_splitting_pool(alphabet)
    hist = _histogram()
    violations = []
    for trial in range(cfg.samples):
        phi = sample(gens, cfg.budget, rng.randrange(2**32))
        for idx, marked in enumerate(pool):
            outcome = splitting_orbit_period(
                marked, phi, cfg.max_iter, cfg.length_cap
            )
            if _record(hist, outcome):
                violations.append(
                    {"trial": trial, "splitting": idx, **_outcome_json(outcome)}
                )
    identity_ok = all(
        splitting_orbit_period(m, identity_automorphism(alphabet), cfg.max_iter)
        == OrbitOutcome("Period", 1)
        for m in pool
    )

    # control: swap on an asymmetrically marked rose
    control_hist = _histogram()
    a = Word(alphabet, (1,))
    ab = Word(alphabet, (1, 2))
    rest = [Word(alphabet, (i,)) for i in range(3, alphabet.rank + 1)]
    asym = rose_marked(
        alphabet,
        [a, ab] + rest,
        [a, Word(alphabet, (-1, 2))] + rest,
    )
    sw = swap(alphabet, 1, 2)
    control_outcome = splitting_orbit_period(asym, sw, cfg.max_iter, cfg.length_cap)
    _record(control_hist, control_outcome)

    report = {
        "experiment": "splittings",
        "config": asdict(cfg),
        "trials": cfg.samples,
        "pool_size": len(pool),
        "outcomes": hist,
        "identity_sanity_period1": identity_ok,
        "control": {
            "automorphism": "swap x1<->x2 on asymmetric rose",
            "outcomes": control_hist,
            "outcome": _outcome_json(control_outcome),
        },
        "violations": violations,
    }
    return _finish(report, start, cfg.out)
