"""Random workloads and benchmark sweeps over mapping modes."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliExponential, PauliGadget
from .synth import MAPPING_MODES, synthesize
from .topology import load_topology

log = logging.getLogger(__name__)

ANGLES = (np.pi, np.pi / 2, np.pi / 4, np.pi / 8, np.pi / 16)
COLUMNS = (
    "topology",
    "mapping_mode",
    "n_gadgets",
    "mean_cnot_count",
    "mean_cnot_depth",
    "mean_runtime_ms",
)


def derive_seed(*keys: int) -> int:
    """Stable 63-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence(list(keys)).generate_state(1, dtype=np.uint64)[0] >> 1)


def random_exponential(n_qubits: int, n_gadgets: int, seed: int | None) -> PauliExponential:
    """Draw ``n_gadgets`` gadgets on ``n_qubits`` qubits.

    Each gadget picks a leg count uniformly from ``1..n_qubits``, that many
    distinct positions, a uniform letter from X, Y, Z per position, and an
    angle uniformly from ``ANGLES``.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if n_gadgets < 0:
        raise ValueError("n_gadgets must be >= 0")
    rng = np.random.default_rng(seed)
    gadgets = []
    for i in range(n_gadgets):
        k = int(rng.integers(1, n_qubits + 1))
        pos = rng.choice(n_qubits, size=k, replace=False)
        letters = rng.integers(0, 3, size=k)
        s = ["I"] * n_qubits
        for p, c in zip(pos, letters):
            s[p] = "XYZ"[c]
        angle = float(ANGLES[rng.integers(len(ANGLES))])
        gadgets.append(PauliGadget("".join(s), angle, i))
    return PauliExponential(gadgets, n_qubits)


@dataclass
class BenchConfig:
    topology: str
    min_gadgets: int
    max_gadgets: int
    step: int = 1
    samples: int = 20
    seed: int = 0
    modes: tuple[str, ...] = ("sppf", "random")
    output: str | None = None
    n_qubits: int | None = None  # defaults to the topology size
    timeout_s: float | None = None
    timing: bool = True
    sizes: list[int] = field(init=False)

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.step < 1:
            raise ValueError("step must be >= 1")
        if self.min_gadgets < 1:
            raise ValueError("gadget counts start at 1")
        self.sizes = list(range(self.min_gadgets, self.max_gadgets + 1, self.step))
        if not self.sizes:
            raise ValueError(f"empty gadget range {self.min_gadgets}..{self.max_gadgets}")
        self.modes = tuple(self.modes)
        bad = [m for m in self.modes if m not in MAPPING_MODES]
        if bad or not self.modes:
            raise ValueError(f"unknown mapping modes {bad}; expected a subset of {MAPPING_MODES}")


class BenchTimeout(RuntimeError):
    pass


def _run_sample(args):
    topology, n_qubits, size, sample, seed, modes = args
    g = load_topology(topology)
    e = random_exponential(n_qubits, size, derive_seed(seed, size, sample))
    out = []
    with warnings.catch_warnings():
        # random gadgets rarely commute; the bench measures cost, not semantics
        warnings.simplefilter("ignore")
        for mode in modes:
            t0 = time.perf_counter()
            c, st = synthesize(
                e, g, mapping_mode=mode, seed=derive_seed(seed, size, sample, 1), allow_reorder=True
            )
            out.append((st.cnot_count, st.cnot_depth, (time.perf_counter() - t0) * 1e3))
    return out


def _workers() -> int:
    env = os.environ.get("SPPF_THREADS")
    cpus = os.cpu_count() or 1
    if env:
        return max(1, min(int(env), cpus))
    return cpus


def run_bench(config: BenchConfig) -> list[dict]:
    """Run the sweep; one row per (size, mode), averaged over samples.

    Every mode sees the same sampled exponentials. Samples may run in worker
    processes; results are merged in (size, sample) order so rows do not
    depend on scheduling.
    """
    g = load_topology(config.topology)
    n = config.n_qubits or g.n_qubits
    if n > g.n_qubits:
        raise ValueError(f"{n} logical qubits exceed {g.n_qubits} physical qubits")
    jobs = [
        (config.topology, n, size, s, config.seed, config.modes)
        for size in config.sizes
        for s in range(config.samples)
    ]
    workers = _workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_sample, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_sample(j) for j in jobs]

    rows = []
    for si, size in enumerate(config.sizes):
        chunk = np.array(results[si * config.samples : (si + 1) * config.samples], dtype=float)
        for mi, mode in enumerate(config.modes):
            runtimes = chunk[:, mi, 2]
            if config.timeout_s is not None and runtimes.max() > config.timeout_s * 1e3:
                raise BenchTimeout(
                    f"{mode} at {size} gadgets took {runtimes.max():.0f} ms "
                    f"(limit {config.timeout_s * 1e3:.0f} ms)"
                )
            rows.append(
                {
                    "topology": config.topology,
                    "mapping_mode": mode,
                    "n_gadgets": size,
                    "mean_cnot_count": float(chunk[:, mi, 0].mean()),
                    "mean_cnot_depth": float(chunk[:, mi, 1].mean()),
                    "mean_runtime_ms": float(runtimes.mean()) if config.timing else None,
                }
            )
        log.info("finished %d gadgets", size)
    return rows


def format_rows(rows: list[dict], fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: "" if r[k] is None else r[k] for k in COLUMNS})
    return buf.getvalue()
