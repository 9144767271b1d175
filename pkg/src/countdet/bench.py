"""Timing and size statistics for the determinisation methods."""
from __future__ import annotations

import csv
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional, TextIO

from .automaton import CountingAutomaton, Dca
from .config import Limits
from .errors import BudgetExceeded, CountdetError, Timeout
from .frontend import compile_pattern
from .generaldet import determinise as general_determinise
from .generaldet import determinise_reachable
from .monadicdet import determinise_monadic
from .naive import Dfa
from .naive import determinise as naive_determinise

METHODS = ("dfa", "dfa-min", "general", "general-basic", "general-reach", "monadic")


def run_method(a: CountingAutomaton, method: str, limits: Limits, trace: Optional[list] = None,
               prune_infeasible: bool = False, sphere_budget: Optional[int] = None):
    """Determinise ``a`` with one of :data:`METHODS`; returns a Dfa or Dca."""
    if method == "dfa":
        return naive_determinise(a, minimal=False, limits=limits)
    if method == "dfa-min":
        return naive_determinise(a, minimal=True, limits=limits)
    if method == "general":
        return general_determinise(a, "terminating", limits, trace)
    if method == "general-basic":
        return general_determinise(a, "basic", limits, trace, sphere_budget=sphere_budget)
    if method == "general-reach":
        return determinise_reachable(a, limits, trace)
    if method == "monadic":
        return determinise_monadic(a, limits, trace, prune_infeasible)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def sizes(machine) -> tuple[int, int, int]:
    """(states, transitions, parameters) of a Dfa or Dca."""
    if isinstance(machine, Dfa):
        return machine.num_states, machine.num_transitions, 0
    assert isinstance(machine, Dca)
    return machine.num_states, machine.num_transitions, machine.num_params


@dataclass
class StatsRecord:
    regex: str
    method: str
    states: int = 0
    transitions: int = 0
    params: int = 0
    ms_mean: float = 0.0
    ms_median: float = 0.0
    ms_stddev: float = 0.0
    runs: int = 0
    outcome: str = "ok"
    detail: str = ""


def measure(pattern: str, method: str, timeout: Optional[float] = 60.0, repeat: int = 1,
            alphabet_size: int = 256, search: bool = False) -> StatsRecord:
    """Compile once, then time ``repeat`` determinisations (compilation is
    not timed)."""
    rec = StatsRecord(pattern, method)
    try:
        a = compile_pattern(pattern, alphabet_size, search)
    except CountdetError as e:
        rec.outcome, rec.detail = "error", str(e)
        return rec
    times = []
    for _ in range(max(1, repeat)):
        limits = Limits.with_timeout(timeout)
        start = time.perf_counter()
        try:
            machine = run_method(a, method, limits)
        except Timeout as e:
            rec.outcome, rec.detail = "timeout", str(e)
            break
        except BudgetExceeded as e:
            rec.outcome, rec.detail = "budget", str(e)
            break
        except CountdetError as e:
            rec.outcome, rec.detail = "error", str(e)
            break
        times.append((time.perf_counter() - start) * 1000.0)
        rec.states, rec.transitions, rec.params = sizes(machine)
    if times:
        rec.runs = len(times)
        rec.ms_mean = statistics.fmean(times)
        rec.ms_median = statistics.median(times)
        rec.ms_stddev = statistics.stdev(times) if len(times) > 1 else 0.0
    return rec


def _measure_args(args):
    return measure(*args)


def bench(patterns: Iterable[str], methods: Iterable[str], timeout: Optional[float] = 60.0,
          repeat: int = 1, workers: int = 1, alphabet_size: int = 256,
          search: bool = False) -> list[StatsRecord]:
    jobs = [(p, m, timeout, repeat, alphabet_size, search) for p in patterns for m in methods]
    if workers <= 1:
        return [_measure_args(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_measure_args, jobs))


def write_csv(records: Iterable[StatsRecord], out: TextIO) -> None:
    names = [f.name for f in fields(StatsRecord)]
    w = csv.DictWriter(out, fieldnames=names, lineterminator="\n")
    w.writeheader()
    for r in records:
        row = asdict(r)
        for k in ("ms_mean", "ms_median", "ms_stddev"):
            row[k] = f"{row[k]:.3f}"
        w.writerow(row)


def read_patterns(lines: Iterable[str]) -> list[str]:
    """Non-empty lines, skipping ``#`` comments."""
    out = []
    for line in lines:
        line = line.rstrip("\n")
        if line.strip() and not line.lstrip().startswith("#"):
            out.append(line)
    return out
