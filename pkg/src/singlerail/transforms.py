"""Linear-optics mode transforms and their exact action on Fock states.

A :class:`ModeTransform` holds the matrix ``U`` of the annihilation-operator
map ``a_out = U a_in``. Acting on a state, each input creation operator is
replaced by ``a_in_i^dag -> sum_j U[j, i] a_out_j^dag`` and the resulting
polynomial is expanded back into Fock amplitudes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .fock import EPS_NUM, ModeMismatchError, PureState

SQRT2 = math.sqrt(2.0)
SQRT6 = math.sqrt(6.0)

ETA_1 = 1.0 / 3.0
ETA_2 = (3.0 + SQRT6) / 6.0


class ModeTransform:
    """Unitary matrix over optical modes."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix, *, check: bool = True):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"mode transform must be a non-empty square matrix, got {m.shape}")
        if check:
            err = unitarity_error(m)
            if err >= EPS_NUM:
                raise ValueError(f"matrix is not unitary (max |UU^dag - I| = {err:.3g})")
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dimension(self) -> int:
        return self._matrix.shape[0]

    def dagger(self) -> "ModeTransform":
        return ModeTransform(self._matrix.conj().T, check=False)

    def allclose(self, other: "ModeTransform", atol: float = EPS_NUM) -> bool:
        return self.dimension == other.dimension and bool(
            np.abs(self._matrix - other._matrix).max() <= atol
        )

    def __repr__(self) -> str:
        return f"ModeTransform({np.array2string(self._matrix, precision=5)})"


def unitarity_error(matrix) -> float:
    m = np.asarray(matrix, dtype=complex)
    return float(np.abs(m @ m.conj().T - np.eye(m.shape[0])).max())


def identity(dimension: int) -> ModeTransform:
    return ModeTransform(np.eye(dimension), check=False)


def beamsplitter(eta: float) -> ModeTransform:
    """Two-mode beamsplitter of reflectivity ``eta``.

    ``a_out = sqrt(eta) a + sqrt(1-eta) b`` and
    ``b_out = -sqrt(1-eta) a + sqrt(eta) b``; the transmitted ``a -> b`` path
    carries the sign flip.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"reflectivity must lie in [0, 1], got {eta}")
    r, t = math.sqrt(eta), math.sqrt(1.0 - eta)
    return ModeTransform([[r, t], [-t, r]], check=False)


def phase_shift(phi: float) -> ModeTransform:
    """Single-mode phase delay: ``|n> -> exp(i n phi) |n>``."""
    return ModeTransform([[np.exp(1j * phi)]], check=False)


def embed(t: ModeTransform, target_modes: Sequence[int], total_modes: int) -> ModeTransform:
    """Place ``t`` on ``target_modes`` (in that order) of a ``total_modes`` network."""
    target_modes = [int(m) for m in target_modes]
    if len(target_modes) != t.dimension:
        raise ValueError(
            f"transform acts on {t.dimension} modes, got {len(target_modes)} targets"
        )
    if len(set(target_modes)) != len(target_modes):
        raise ValueError(f"target modes {target_modes} are not distinct")
    if any(m < 0 or m >= total_modes for m in target_modes):
        raise ValueError(f"target modes {target_modes} out of range for {total_modes} modes")
    m = np.eye(total_modes, dtype=complex)
    idx = np.array(target_modes)
    m[np.ix_(idx, idx)] = t.matrix
    return ModeTransform(m, check=False)


def compose(first: ModeTransform, then: ModeTransform) -> ModeTransform:
    """Network applying ``first`` and then ``then``."""
    if first.dimension != then.dimension:
        raise ModeMismatchError(
            f"cannot compose {first.dimension}-mode and {then.dimension}-mode transforms"
        )
    return ModeTransform(then.matrix @ first.matrix)


def compose_all(transforms: Sequence[ModeTransform]) -> ModeTransform:
    out = transforms[0]
    for t in transforms[1:]:
        out = compose(out, t)
    return out


def signs(values: Sequence[int]) -> ModeTransform:
    """Diagonal +-1 transform, i.e. pi phase plates on the ports marked -1."""
    return ModeTransform(np.diag(np.asarray(values, dtype=float)), check=False)


# --- CS network ----------------------------------------------------------

def cs_network_matrix() -> np.ndarray:
    """Operator-evolution coefficients of the heralded controlled-sign network over modes (a, b, c, d)."""
    p = math.sqrt(3.0 + SQRT6)
    q = math.sqrt(3.0 - SQRT6)
    k = 1.0 / (3.0 * SQRT2)
    return np.array(
        [
            [-1 / 3, SQRT2 / 3, SQRT2 / 3, -2 / 3],
            [-SQRT2 / 3, -1 / 3, 2 / 3, SQRT2 / 3],
            [k * p * SQRT2, k * q * SQRT2, k * p, k * q],
            [-k * q * SQRT2, k * p * SQRT2, -k * q, k * p],
        ]
    )


@dataclass(frozen=True)
class PortAssignment:
    """A four-beamsplitter realisation ``diag(output_signs) B4 B3 B2 B1 diag(input_signs)``.

    ``splitters`` lists ``(eta, (mode_i, mode_j))`` in the order light meets
    them; the mode order fixes the orientation passed to :func:`embed`.
    """

    splitters: tuple[tuple[float, tuple[int, int]], ...]
    input_signs: tuple[int, ...]
    output_signs: tuple[int, ...]

    @property
    def sign_flips(self) -> int:
        return sum(s < 0 for s in self.input_signs) + sum(s < 0 for s in self.output_signs)

    def transform(self) -> ModeTransform:
        n = len(self.input_signs)
        stages = [signs(self.input_signs)]
        stages += [embed(beamsplitter(eta), modes, n) for eta, modes in self.splitters]
        stages.append(signs(self.output_signs))
        return compose_all(stages)


# Found by find_port_assignment(cs_network_matrix()); pi phase plates on the
# two qubit inputs are required, no sign-free assignment exists.
CS_PORT_ASSIGNMENT = PortAssignment(
    splitters=(
        (ETA_1, (0, 2)),
        (ETA_1, (1, 3)),
        (ETA_1, (1, 0)),
        (ETA_2, (2, 3)),
    ),
    input_signs=(-1, -1, 1, 1),
    output_signs=(1, 1, 1, 1),
)


def find_port_assignment(
    target,
    etas: Sequence[float] = (ETA_1, ETA_2),
    n_splitters: int = 4,
    atol: float = EPS_NUM,
) -> list[PortAssignment]:
    """All beamsplitter sequences that reproduce ``target`` up to port signs.

    Every splitter is drawn from ``etas`` and any ordered pair of modes.
    A candidate matches when its entries agree with ``target`` in magnitude
    and the sign discrepancy factorises as ``output_sign[i] * input_sign[j]``.
    Results are sorted by the number of sign plates needed.
    """
    target = np.real_if_close(np.asarray(target))
    if np.iscomplexobj(target):
        raise ValueError("port-assignment search handles real networks only")
    n = target.shape[0]
    choices = [(eta, pair) for eta in etas for pair in itertools.permutations(range(n), 2)]
    mats = np.stack([embed(beamsplitter(eta), pair, n).matrix.real for eta, pair in choices])

    n_choices = len(choices)
    products = mats
    labels = np.arange(n_choices)[:, None]
    for _ in range(n_splitters - 1):
        # row b * n_choices + a holds B_a @ products[b]
        products = np.einsum("aij,bjk->baik", mats, products).reshape(-1, n, n)
        labels = np.concatenate(
            [
                np.repeat(labels, n_choices, axis=0),
                np.tile(np.arange(n_choices), len(labels))[:, None],
            ],
            axis=1,
        )
    mag_ok = np.abs(np.abs(products) - np.abs(target)).max(axis=(1, 2)) < atol

    found: list[PortAssignment] = []
    nz = np.abs(target) > atol
    for k in np.flatnonzero(mag_ok):
        m = products[k]
        s = np.where(nz, np.sign(m) * np.sign(target), 0.0)
        # factorise the sign pattern as an outer product
        i0, j0 = np.argwhere(nz)[0]
        din = np.where(nz[i0], s[i0] * s[i0, j0], 0.0)
        dout = np.where(nz[:, j0], s[:, j0], 0.0)
        if np.any(din == 0) or np.any(dout == 0):
            continue
        if not np.allclose(np.outer(dout, din)[nz], s[nz]):
            continue
        # canonical global sign: fewer plates
        if (dout < 0).sum() + (din < 0).sum() > (dout > 0).sum() + (din > 0).sum():
            dout, din = -dout, -din
        found.append(
            PortAssignment(
                splitters=tuple(choices[c] for c in labels[k]),
                input_signs=tuple(int(v) for v in din),
                output_signs=tuple(int(v) for v in dout),
            )
        )
    found.sort(key=lambda pa: pa.sign_flips)
    return found


@lru_cache(maxsize=1)
def cs_network() -> ModeTransform:
    """Heralded controlled-sign network over modes (a, b, c, d), qubits in a and b.

    Built from the closed-form coefficients and checked against the
    beamsplitter realisation in :data:`CS_PORT_ASSIGNMENT`.
    """
    direct = ModeTransform(cs_network_matrix())
    composed = CS_PORT_ASSIGNMENT.transform()
    if not direct.allclose(composed):
        err = float(np.abs(direct.matrix - composed.matrix).max())
        raise RuntimeError(f"CS network disagrees with its beamsplitter realisation ({err:.3g})")
    return direct


# --- Fock-space action -----------------------------------------------------

def _active_modes(m: np.ndarray) -> list[int]:
    eye = np.eye(m.shape[0])
    diff = np.abs(m - eye) > 0
    return [i for i in range(m.shape[0]) if diff[i].any() or diff[:, i].any()]


@lru_cache(maxsize=None)
def _power_expansion(column: tuple[complex, ...], n: int) -> dict[tuple[int, ...], complex]:
    """Coefficients of ``(sum_j column[j] x_j)^n`` keyed by exponent tuples."""
    if n == 0:
        return {(0,) * len(column): 1.0}
    prev = _power_expansion(column, n - 1)
    out: dict[tuple[int, ...], complex] = {}
    for exps, coef in prev.items():
        for j, u in enumerate(column):
            if u == 0:
                continue
            e = list(exps)
            e[j] += 1
            e = tuple(e)
            out[e] = out.get(e, 0j) + coef * u
    return out


@lru_cache(maxsize=None)
def _basis_image(columns: tuple[tuple[complex, ...], ...], occ: tuple[int, ...]) -> tuple:
    """Image of the basis state ``occ`` as ``((out_occ, amplitude), ...)``."""
    poly: dict[tuple[int, ...], complex] = {(0,) * len(columns[0]): 1.0}
    for col, n in zip(columns, occ):
        if n == 0:
            continue
        factor = _power_expansion(col, n)
        nxt: dict[tuple[int, ...], complex] = {}
        for e1, c1 in poly.items():
            for e2, c2 in factor.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                nxt[e] = nxt.get(e, 0j) + c1 * c2
        poly = nxt
    norm_in = math.prod(math.factorial(n) for n in occ)
    out = []
    for e, c in poly.items():
        amp = c * math.sqrt(math.prod(math.factorial(k) for k in e) / norm_in)
        if abs(amp) > 0:
            out.append((e, amp))
    return tuple(out)


def apply(state: PureState, t: ModeTransform) -> PureState:
    """Evolve ``state`` through the linear-optics network ``t``.

    Photon number is conserved, so the result lives under the same cutoff
    without truncation.
    """
    if state.mode_count != t.dimension:
        raise ModeMismatchError(
            f"state has {state.mode_count} modes, transform acts on {t.dimension}"
        )
    m = t.matrix
    active = _active_modes(m)
    if not active:
        return state
    sub = m[np.ix_(active, active)]
    # columns[i][j] = U[j, i]: image of input creation operator i
    columns = tuple(tuple(complex(v) for v in sub[:, i]) for i in range(len(active)))
    amps: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.items():
        sub_occ = tuple(occ[i] for i in active)
        base = list(occ)
        for out_sub, coef in _basis_image(columns, sub_occ):
            for i, k in zip(active, out_sub):
                base[i] = k
            key = tuple(base)
            amps[key] = amps.get(key, 0j) + amp * coef
    return PureState(state.mode_count, amps, state.cutoff)


def apply_on(state: PureState, t: ModeTransform, modes: Sequence[int]) -> PureState:
    """Shorthand for ``apply(state, embed(t, modes, state.mode_count))``."""
    return apply(state, embed(t, modes, state.mode_count))
