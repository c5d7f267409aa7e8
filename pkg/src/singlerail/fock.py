"""Sparse multimode bosonic Fock states.

A :class:`PureState` maps occupation tuples ``(n_0, ..., n_{m-1})`` to complex
amplitudes. States are not required to be normalised: conditioned outputs are
carried unnormalised so that their squared norm is the herald probability.
"""

from __future__ import annotations

import math
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

EPS_PRUNE = 1e-14
EPS_NUM = 1e-10
EPS_ZERO = 1e-12
DEFAULT_CUTOFF = 6

Occupation = tuple[int, ...]


class CutoffError(ValueError):
    """An occupation carries more photons than the state's cutoff allows."""


class ModeMismatchError(ValueError):
    """Two objects disagree on the number of optical modes."""


class ZeroStateError(ValueError):
    """Raised when normalising a state with (numerically) zero norm.

    This signals an impossible conditioning branch.
    """


def _check_occupation(occ: Sequence[int], mode_count: int) -> Occupation:
    occ = tuple(int(n) for n in occ)
    if len(occ) != mode_count:
        raise ModeMismatchError(f"occupation {occ} does not have {mode_count} modes")
    if any(n < 0 for n in occ):
        raise ValueError(f"negative photon number in occupation {occ}")
    return occ


class PureState:
    """Immutable sparse pure state over ``mode_count`` modes.

    Parameters
    ----------
    mode_count : int
        Number of optical modes.
    amplitudes : mapping
        Occupation tuple -> complex amplitude. Entries with magnitude below
        ``EPS_PRUNE`` are dropped.
    cutoff : int
        Maximum total photon number retained. Occupations above it raise
        :class:`CutoffError` unless ``truncate=True``, in which case they are
        discarded and their weight is added to ``truncated_weight``.
    """

    __slots__ = ("_mode_count", "_amps", "_cutoff", "_truncated_weight")

    def __init__(
        self,
        mode_count: int,
        amplitudes: Mapping[Sequence[int], complex],
        cutoff: int = DEFAULT_CUTOFF,
        *,
        truncate: bool = False,
        truncated_weight: float = 0.0,
    ):
        if mode_count < 0:
            raise ValueError("mode_count must be non-negative")
        if cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        amps: dict[Occupation, complex] = {}
        dropped = float(truncated_weight)
        for occ, amp in amplitudes.items():
            occ = _check_occupation(occ, mode_count)
            amp = complex(amp)
            if sum(occ) > cutoff:
                if not truncate:
                    raise CutoffError(
                        f"occupation {occ} has {sum(occ)} photons, cutoff is {cutoff}"
                    )
                dropped += abs(amp) ** 2
                continue
            amps[occ] = amps.get(occ, 0j) + amp
        amps = {occ: amp for occ, amp in amps.items() if abs(amp) >= EPS_PRUNE}
        self._mode_count = mode_count
        self._amps = MappingProxyType(amps)
        self._cutoff = cutoff
        self._truncated_weight = dropped

    @property
    def mode_count(self) -> int:
        return self._mode_count

    @property
    def cutoff(self) -> int:
        return self._cutoff

    @property
    def amplitudes(self) -> Mapping[Occupation, complex]:
        return self._amps

    @property
    def truncated_weight(self) -> float:
        """Squared-amplitude weight discarded by cutoff truncation so far."""
        return self._truncated_weight

    def __getitem__(self, occ: Sequence[int]) -> complex:
        return self._amps.get(tuple(occ), 0j)

    def __iter__(self) -> Iterator[Occupation]:
        return iter(self._amps)

    def __len__(self) -> int:
        return len(self._amps)

    def items(self):
        return self._amps.items()

    def max_photons(self) -> int:
        return max((sum(occ) for occ in self._amps), default=0)

    def with_cutoff(self, cutoff: int) -> "PureState":
        """Same amplitudes under a different cutoff (truncating if lower)."""
        return PureState(
            self._mode_count,
            self._amps,
            cutoff,
            truncate=True,
            truncated_weight=self._truncated_weight,
        )

    def __add__(self, other: "PureState") -> "PureState":
        if not isinstance(other, PureState):
            return NotImplemented
        _require_same_modes(self, other)
        amps = dict(self._amps)
        for occ, amp in other.items():
            amps[occ] = amps.get(occ, 0j) + amp
        return PureState(self._mode_count, amps, max(self._cutoff, other._cutoff))

    def __sub__(self, other: "PureState") -> "PureState":
        return self + (-1) * other

    def __mul__(self, scalar: complex) -> "PureState":
        scalar = complex(scalar)
        return PureState(
            self._mode_count,
            {occ: scalar * amp for occ, amp in self._amps.items()},
            self._cutoff,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "PureState":
        return (-1) * self

    def allclose(self, other: "PureState", atol: float = EPS_NUM) -> bool:
        """Amplitude-wise comparison; absent keys count as zero."""
        if self._mode_count != other._mode_count:
            return False
        keys = set(self._amps) | set(other._amps)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def to_dict(self) -> dict[Occupation, complex]:
        return dict(self._amps)

    def __repr__(self) -> str:
        terms = ", ".join(
            f"|{''.join(map(str, occ)) if max(occ, default=0) < 10 else occ}>: {amp:.6g}"
            for occ, amp in sorted(self._amps.items())
        )
        return f"PureState({{{terms}}}, modes={self._mode_count}, cutoff={self._cutoff})"


def _require_same_modes(a: PureState, b: PureState) -> None:
    if a.mode_count != b.mode_count:
        raise ModeMismatchError(f"mode counts differ: {a.mode_count} vs {b.mode_count}")


def make_basis_state(occupation: Sequence[int], cutoff: int = DEFAULT_CUTOFF) -> PureState:
    """Fock basis state with unit amplitude on ``occupation``."""
    occupation = tuple(occupation)
    if sum(occupation) > cutoff:
        raise CutoffError(
            f"occupation {occupation} has {sum(occupation)} photons, cutoff is {cutoff}"
        )
    return PureState(len(occupation), {occupation: 1.0}, cutoff)


def vacuum(mode_count: int, cutoff: int = DEFAULT_CUTOFF) -> PureState:
    return make_basis_state((0,) * mode_count, cutoff)


def single_mode(coefficients: Iterable[complex], cutoff: int | None = None) -> PureState:
    """Single-mode state ``sum_n c_n |n>`` from a coefficient list."""
    coefficients = list(coefficients)
    if cutoff is None:
        cutoff = max(len(coefficients) - 1, DEFAULT_CUTOFF)
    return PureState(1, {(n,): c for n, c in enumerate(coefficients)}, cutoff)


def coherent_state(chi: float, cutoff: int = DEFAULT_CUTOFF) -> PureState:
    """Unnormalised truncated coherent state ``sum_{n<=cutoff} chi^n/sqrt(n!) |n>``.

    Multiply by ``exp(-|chi|^2/2)`` for the (approximately) normalised state.
    """
    if cutoff < 1:
        raise ValueError("coherent_state needs cutoff >= 1")
    amps = {(n,): chi**n / math.sqrt(math.factorial(n)) for n in range(cutoff + 1)}
    return PureState(1, amps, cutoff)


def tensor(a: PureState, b: PureState, cutoff: int | None = None) -> PureState:
    """Tensor product ``a (x) b``; modes of ``b`` follow those of ``a``.

    The result cutoff defaults to ``max(a.cutoff, b.cutoff)``. Occupations
    above it are dropped and accounted in ``truncated_weight``.
    """
    if cutoff is None:
        cutoff = max(a.cutoff, b.cutoff)
    amps: dict[Occupation, complex] = {}
    for occ_a, amp_a in a.items():
        for occ_b, amp_b in b.items():
            amps[occ_a + occ_b] = amp_a * amp_b
    return PureState(
        a.mode_count + b.mode_count,
        amps,
        cutoff,
        truncate=True,
        truncated_weight=a.truncated_weight + b.truncated_weight,
    )


def tensor_all(states: Iterable[PureState], cutoff: int | None = None) -> PureState:
    states = list(states)
    if not states:
        raise ValueError("tensor_all needs at least one state")
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s, cutoff)
    return out


def inner_product(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _require_same_modes(a, b)
    if len(a) > len(b):
        return np.conj(inner_product(b, a))
    return complex(sum(np.conj(amp) * b[occ] for occ, amp in a.items()))


def norm_squared(a: PureState) -> float:
    return float(sum(abs(amp) ** 2 for amp in a.amplitudes.values()))


def normalize(a: PureState) -> PureState:
    n2 = norm_squared(a)
    if n2 <= EPS_ZERO:
        raise ZeroStateError(f"cannot normalise state with norm^2 = {n2:.3g}")
    return a * (1 / math.sqrt(n2))


def fidelity(a: PureState, b: PureState) -> float:
    """``|<a|b>|^2 / (<a|a><b|b>)`` for unnormalised pure states."""
    return abs(inner_product(a, b)) ** 2 / (norm_squared(a) * norm_squared(b))


def permute_modes(state: PureState, order: Sequence[int]) -> PureState:
    """Reorder modes so that new mode ``i`` is old mode ``order[i]``."""
    if sorted(order) != list(range(state.mode_count)):
        raise ValueError(f"{order} is not a permutation of {state.mode_count} modes")
    return PureState(
        state.mode_count,
        {tuple(occ[i] for i in order): amp for occ, amp in state.items()},
        state.cutoff,
    )
