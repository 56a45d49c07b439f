"""Single-qubit randomized benchmarking of a simulated gate.

The 24-element single-qubit Clifford group is generated by breadth-first
closure over {I, X90, X180, X-90, Y90, Y-90}.  During benchmarking every
X90 occurrence in a Clifford's decomposition is replaced by the simulated
gate under test while the other generators stay ideal, so sequence errors
accumulate exactly where the real experiment puts them.  Recovery gates
are computed from the ideal composition via precomputed multiplication
and inverse tables.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .transmon import embed_qubit_gate, measure_population, rotation_unitary

GENERATOR_NAMES = ("identity", "x90", "x180", "xm90", "y90", "ym90")
X90_GENERATOR_INDEX = 1

# log-spaced default sequence-length ladder, dense at short lengths
DEFAULT_RB_LENGTHS = (
    0, 1, 2, 3, 4, 5, 6, 8, 11, 14, 19, 25, 32, 42, 55, 72, 93, 122, 159,
    208, 272, 355, 463, 605, 790, 1032, 1347, 1759, 2297, 3000,
)


class RBFitError(RuntimeError):
    """Decay fit failed to converge; ``residuals`` holds the last misfit."""

    def __init__(self, message: str, residuals: np.ndarray | None = None):
        super().__init__(message)
        self.residuals = residuals


def _generator_unitaries() -> tuple[np.ndarray, ...]:
    return (
        np.eye(2, dtype=complex),
        rotation_unitary("x", math.pi / 2.0),
        rotation_unitary("x", math.pi),
        rotation_unitary("x", -math.pi / 2.0),
        rotation_unitary("y", math.pi / 2.0),
        rotation_unitary("y", -math.pi / 2.0),
    )


def _canonical_key(u: np.ndarray) -> tuple:
    """Hashable fingerprint of a 2x2 unitary modulo global phase.

    The phase reference is the first entry of magnitude > 0.25; Clifford
    entries are 0 or >= 1/2 in magnitude, so the pivot choice is stable
    against roundoff (unlike a magnitude argmax, which ties).
    """
    flat = u.reshape(-1)
    pivot = next(v for v in flat if abs(v) > 0.25)
    fixed = flat * (abs(pivot) / pivot)
    return tuple(np.round(fixed, 6).tolist())


@dataclass(frozen=True)
class CliffordGroup:
    """Phase-canonical unitaries plus composition bookkeeping.

    ``decompositions[k]`` lists generator indices applied left-to-right
    (earliest first) to build element ``k``.  ``multiplication[i, j]`` is
    the element equal to applying ``i`` then ``j``; ``inverse[i]`` composes
    with ``i`` to the identity (element 0).
    """

    unitaries: tuple[np.ndarray, ...]
    decompositions: tuple[tuple[int, ...], ...]
    multiplication: np.ndarray
    inverse: np.ndarray

    def __len__(self) -> int:
        return len(self.unitaries)

    def index_of(self, u: np.ndarray) -> int:
        key = _canonical_key(np.asarray(u, dtype=complex))
        for k, elem in enumerate(self.unitaries):
            if _canonical_key(elem) == key:
                return k
        raise KeyError("unitary is not a group element")


def build_clifford_group() -> CliffordGroup:
    """Breadth-first closure of the generator set; asserts order 24."""
    gens = _generator_unitaries()
    elements: list[np.ndarray] = []
    decomps: list[tuple[int, ...]] = []
    index: dict[tuple, int] = {}

    def add(u: np.ndarray, decomp: tuple[int, ...]) -> None:
        key = _canonical_key(u)
        if key not in index:
            index[key] = len(elements)
            elements.append(u)
            decomps.append(decomp)

    add(gens[0], ())
    head = 0
    while head < len(elements):
        base = elements[head]
        base_decomp = decomps[head]
        for g_idx, g in enumerate(gens):
            add(g @ base, base_decomp + (g_idx,))
        head += 1
    assert len(elements) == 24, f"Clifford closure found {len(elements)} elements"

    n = len(elements)
    multiplication = np.empty((n, n), dtype=np.intp)
    for i in range(n):
        for j in range(n):
            key = _canonical_key(elements[j] @ elements[i])
            multiplication[i, j] = index[key]
    inverse = np.empty(n, dtype=np.intp)
    for i in range(n):
        matches = np.flatnonzero(multiplication[i] == 0)
        assert matches.size == 1, "group inverse must be unique"
        inverse[i] = matches[0]
    return CliffordGroup(
        unitaries=tuple(elements),
        decompositions=tuple(decomps),
        multiplication=multiplication,
        inverse=inverse,
    )


@functools.lru_cache(maxsize=1)
def clifford_group() -> CliffordGroup:
    """Memoized group instance (construction is pure)."""
    return build_clifford_group()


def compile_cliffords(
    group: CliffordGroup, gate_under_test: np.ndarray
) -> list[np.ndarray]:
    """Matrices of all Cliffords with X90 slots replaced by the test gate."""
    gate_under_test = np.asarray(gate_under_test, dtype=complex)
    n_levels = gate_under_test.shape[0]
    gen_mats = [embed_qubit_gate(g, n_levels) for g in _generator_unitaries()]
    gen_mats[X90_GENERATOR_INDEX] = gate_under_test
    compiled = []
    for decomp in group.decompositions:
        u = np.eye(n_levels, dtype=complex)
        for g_idx in decomp:
            u = gen_mats[g_idx] @ u
        compiled.append(u)
    return compiled


@dataclass(frozen=True)
class RBData:
    """Mean ground-state survival per sequence length."""

    lengths: np.ndarray
    survival: np.ndarray
    n_sequences: int
    shots: int
    interleaved: bool


def run_rb(
    gate: np.ndarray,
    lengths,
    n_sequences: int,
    shots: int = 0,
    seed: int | np.random.Generator | None = None,
    interleaved: bool = False,
) -> RBData:
    """Simulate randomized benchmarking of ``gate`` (an X90 candidate).

    Random Clifford sequences of each length are applied to the ground
    state, followed by the ideal-composition recovery Clifford; survival
    is the measured ground population.  ``interleaved=True`` inserts the
    gate under test after every Clifford.
    """
    gate = np.asarray(gate, dtype=complex)
    if gate.ndim != 2 or gate.shape[0] != gate.shape[1] or gate.shape[0] < 2:
        raise ValueError("gate must be a square propagator with >= 2 levels")
    lengths = np.asarray(lengths, dtype=int)
    if lengths.ndim != 1 or lengths.size < 1 or np.any(lengths < 0):
        raise ValueError("lengths must be a non-empty list of m >= 0")
    if n_sequences < 1:
        raise ValueError(f"n_sequences must be >= 1, got {n_sequences}")
    if shots < 0:
        raise ValueError(f"shots must be >= 0, got {shots}")
    rng = np.random.default_rng(seed)
    group = clifford_group()
    compiled = compile_cliffords(group, gate)
    x90_element = group.index_of(rotation_unitary("x", math.pi / 2.0))
    mult = group.multiplication
    n_levels = gate.shape[0]
    ground = np.zeros(n_levels, dtype=complex)
    ground[0] = 1.0

    survival = np.empty(lengths.size)
    for li, m in enumerate(lengths):
        acc = 0.0
        for _ in range(n_sequences):
            draws = rng.integers(0, len(group), size=m)
            psi = ground
            composite = 0
            for idx in draws:
                psi = compiled[idx] @ psi
                composite = mult[composite, idx]
                if interleaved:
                    psi = gate @ psi
                    composite = mult[composite, x90_element]
            psi = compiled[group.inverse[composite]] @ psi
            meas_rng = rng if shots > 0 else None
            acc += measure_population(psi, shots, meas_rng).ground
        survival[li] = acc / n_sequences
    return RBData(
        lengths=lengths,
        survival=survival,
        n_sequences=n_sequences,
        shots=shots,
        interleaved=interleaved,
    )


@dataclass(frozen=True)
class RBFitResult:
    """Parameters and standard errors of ``amplitude * decay**m + offset``."""

    amplitude: float
    offset: float
    decay_rate: float
    stderr_amplitude: float
    stderr_offset: float
    stderr_decay: float
    degenerate: bool = False


def _decay_model(m, amplitude, offset, decay):
    return amplitude * decay**m + offset


def fit_rb_decay(lengths, survival) -> RBFitResult:
    """Least-squares fit of the RB decay curve.

    Exactly constant survival carries no decay information and is returned
    as ``decay_rate = 1`` with infinite errors and ``degenerate=True``.
    A singular fit covariance also sets the degenerate flag.
    """
    lengths = np.asarray(lengths, dtype=float)
    survival = np.asarray(survival, dtype=float)
    if lengths.shape != survival.shape or lengths.ndim != 1 or lengths.size < 3:
        raise ValueError("need >= 3 aligned (length, survival) points")
    if np.ptp(survival) == 0.0:
        return RBFitResult(
            amplitude=0.0,
            offset=float(survival[0]),
            decay_rate=1.0,
            stderr_amplitude=math.inf,
            stderr_offset=math.inf,
            stderr_decay=math.inf,
            degenerate=True,
        )
    try:
        with warnings.catch_warnings():
            # singular covariance is reported via the degenerate flag instead
            warnings.simplefilter("ignore")
            # physical bounds keep shallow decays off the A*(1-p) ~ const
            # ridge where amplitude and decay are unidentifiable
            popt, pcov = curve_fit(
                _decay_model,
                lengths,
                survival,
                p0=(0.5, 0.5, 0.99),
                bounds=([0.0, 0.0, 0.0], [1.0, 1.0, 1.01]),
                maxfev=20000,
            )
    except RuntimeError as exc:
        residuals = survival - _decay_model(lengths, 0.5, 0.5, 0.99)
        raise RBFitError(f"RB decay fit did not converge: {exc}", residuals) from exc
    stderr = np.sqrt(np.diag(pcov))
    degenerate = not np.all(np.isfinite(stderr))
    amplitude, offset, decay = (float(v) for v in popt)
    if not 0.0 < decay <= 1.01:
        raise RBFitError(
            f"fitted decay {decay} outside (0, 1.01]",
            residuals=survival - _decay_model(lengths, *popt),
        )
    return RBFitResult(
        amplitude=amplitude,
        offset=offset,
        decay_rate=decay,
        stderr_amplitude=float(stderr[0]),
        stderr_offset=float(stderr[1]),
        stderr_decay=float(stderr[2]),
        degenerate=degenerate,
    )


def interleaved_gate_fidelity(p_reference: float, p_interleaved: float) -> float:
    """Gate fidelity from reference and interleaved decays.

    ``1 - (1 - p_int/p_ref)/2`` for a single qubit.  A ratio above 1
    (possible through fit noise) produces a warning, not an error.
    """
    for name, p in (("p_reference", p_reference), ("p_interleaved", p_interleaved)):
        if not 0.0 < p <= 1.01:
            raise ValueError(f"{name} must lie in (0, 1.01], got {p}")
    if p_interleaved > p_reference:
        warnings.warn(
            "interleaved decay exceeds reference decay; "
            "estimated fidelity exceeds 1",
            stacklevel=2,
        )
    return 1.0 - (1.0 - p_interleaved / p_reference) / 2.0
