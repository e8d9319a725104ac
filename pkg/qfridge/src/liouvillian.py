"""Block structure, spectrum and steady state of the refrigerator generator.

Superoperators act on row-major vectorised matrices: ``vec(rho)[6i + j]``
is ``rho[i, j]``. In that convention ``vec(A X B) = (A kron B^T) vec(X)``.
"""

import logging
from itertools import product

import numpy as np
import scipy.linalg
from msgspec import Struct

from .model import (
    DIM,
    ENERGY_BASIS,
    DensityMatrix,
    JumpOperator,
    RefrigeratorParams,
    build_eigenbasis,
    build_jump_operators,
    diagonal_eigenbasis,
)
from .types import (
    Basis,
    DecompositionError,
    LiouvillianStructureError,
    NonErgodicError,
    NumericalError,
)

TYPE_CHECKING = False
if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

type Coord = tuple[int, int]
type PairKey = tuple[Coord, Coord]

# coherences coupled by the cold bath, zero-based (rho_63 with rho_52, ...)
PAIR_KEYS: tuple[PairKey, ...] = (
    ((5, 2), (4, 1)),
    ((2, 5), (1, 4)),
    ((5, 4), (2, 1)),
    ((4, 5), (1, 2)),
)
_PAIRED = frozenset(c for key in PAIR_KEYS for c in key)
SCALAR_KEYS: tuple[Coord, ...] = tuple(
    (i, j) for i, j in product(range(DIM), repeat=2) if i != j and (i, j) not in _PAIRED
)
POPULATIONS: tuple[Coord, ...] = tuple((i, i) for i in range(DIM))

STRUCTURE_TOL = 1e-12
DEFECT_TOL = 1e-10
NULL_SPACE_TOL = 1e-10
NEGATIVITY_TOL = 1e-10
TIE_TOL = 1e-12


def vec_index(i: int, j: int) -> int:
    return DIM * i + j


def matrix_unit(i: int, j: int) -> "NDArray[np.complex128]":
    e = np.zeros((DIM, DIM), dtype=np.complex128)
    e[i, j] = 1
    return e


def apply_generator(
    rho: "NDArray[np.complex128]",
    hamiltonian: "NDArray[np.complex128]",
    jumps: "Iterable[JumpOperator]",
) -> "NDArray[np.complex128]":
    """-i[H, rho] + sum_k rate_k (A rho A^dag - {A^dag A, rho}/2)."""
    out = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for jump in jumps:
        if jump.rate == 0:
            continue
        a = jump.matrix
        ad = a.conj().T
        ada = ad @ a
        out += jump.rate * (a @ rho @ ad - 0.5 * (ada @ rho + rho @ ada))
    return out


def superoperator(
    hamiltonian: "NDArray[np.complex128]", jumps: "Iterable[JumpOperator]"
) -> "NDArray[np.complex128]":
    eye = np.eye(DIM)
    sup = -1j * (np.kron(hamiltonian, eye) - np.kron(eye, hamiltonian.T))
    for jump in jumps:
        if jump.rate == 0:
            continue
        a = jump.matrix
        ada = a.conj().T @ a
        sup += jump.rate * (
            np.kron(a, a.conj()) - 0.5 * (np.kron(ada, eye) + np.kron(eye, ada.T))
        )
    return sup


def change_superoperator_basis(
    sup: "NDArray[np.complex128]", basis_matrix: "NDArray[np.float64]"
) -> "NDArray[np.complex128]":
    """Conjugate ``sup`` by ``rho -> B rho B^T`` for a real orthogonal ``B``."""
    s = np.kron(basis_matrix, basis_matrix)
    return s @ sup @ s.T


def assemble_full_superoperator(
    params: RefrigeratorParams, basis: Basis = Basis.ENERGY
) -> "NDArray[np.complex128]":
    """Brute-force 36x36 generator, the reference for every block assembly.

    At g = 0 the channels are built in the product basis, which then is an
    eigenbasis of H; the analytic basis is only used when it is
    nondegenerate.
    """
    params.validate()
    if params.g > 0:
        eigenbasis = build_eigenbasis(params)
        native = Basis.ENERGY
    else:
        eigenbasis = diagonal_eigenbasis(params)
        native = Basis.PRODUCT
    jumps = build_jump_operators(params, eigenbasis)
    sup = superoperator(eigenbasis.hamiltonian.astype(np.complex128), jumps)
    match native, basis:
        case (Basis.ENERGY, Basis.PRODUCT):
            return change_superoperator_basis(sup, ENERGY_BASIS.T)
        case (Basis.PRODUCT, Basis.ENERGY):
            return change_superoperator_basis(sup, ENERGY_BASIS)
    return sup


class BlockLiouvillian(Struct, frozen=True, eq=False):
    params: RefrigeratorParams
    pop_block: "NDArray[np.float64]"
    pair_blocks: "dict[PairKey, NDArray[np.complex128]]"
    scalar_modes: "dict[Coord, complex]"

    @property
    def d_values(self) -> "NDArray[np.float64]":
        """D_i with the population diagonal equal to -D_i / 2."""
        return -2 * np.diag(self.pop_block)

    def census(self) -> tuple[int, int, int]:
        return (
            self.pop_block.shape[0],
            sum(b.shape[0] for b in self.pair_blocks.values()),
            len(self.scalar_modes),
        )


def _block_pattern() -> "NDArray[np.bool_]":
    mask = np.zeros((DIM * DIM, DIM * DIM), dtype=bool)
    pops = [vec_index(*c) for c in POPULATIONS]
    mask[np.ix_(pops, pops)] = True
    for key in PAIR_KEYS:
        idx = [vec_index(*c) for c in key]
        mask[np.ix_(idx, idx)] = True
    for c in SCALAR_KEYS:
        mask[vec_index(*c), vec_index(*c)] = True
    return mask


def assemble_block_liouvillian(params: RefrigeratorParams) -> BlockLiouvillian:
    """Read the blocks off the generator's action on energy-basis matrix units."""
    eigenbasis = build_eigenbasis(params)
    jumps = build_jump_operators(params, eigenbasis)
    hamiltonian = eigenbasis.hamiltonian.astype(np.complex128)
    columns = np.empty((DIM * DIM, DIM * DIM), dtype=np.complex128)
    for k, l in product(range(DIM), repeat=2):
        image = apply_generator(matrix_unit(k, l), hamiltonian, jumps)
        columns[:, vec_index(k, l)] = image.ravel()

    scale = max(1.0, float(np.max(np.abs(columns))))
    if (leak := float(np.max(np.abs(columns[~_block_pattern()]), initial=0))) > (
        STRUCTURE_TOL * scale
    ):
        err = f"dissipator couples entries outside the block pattern (max {leak:.3e})"
        raise LiouvillianStructureError(err)

    pops = [vec_index(*c) for c in POPULATIONS]
    pop_block = columns[np.ix_(pops, pops)]
    if np.max(np.abs(pop_block.imag)) > STRUCTURE_TOL * scale:
        err = "population block has an imaginary part"
        raise LiouvillianStructureError(err)
    pair_blocks = {}
    for key in PAIR_KEYS:
        idx = [vec_index(*c) for c in key]
        pair_blocks[key] = columns[np.ix_(idx, idx)].copy()
    scalar_modes = {c: complex(columns[vec_index(*c), vec_index(*c)]) for c in SCALAR_KEYS}
    blocks = BlockLiouvillian(params, pop_block.real.copy(), pair_blocks, scalar_modes)
    logger.debug("block census %s", blocks.census())
    return blocks


def embed_blocks(blocks: BlockLiouvillian) -> "NDArray[np.complex128]":
    """Energy-basis 36x36 generator rebuilt from the blocks."""
    sup = np.zeros((DIM * DIM, DIM * DIM), dtype=np.complex128)
    pops = [vec_index(*c) for c in POPULATIONS]
    sup[np.ix_(pops, pops)] = blocks.pop_block
    for key, block in blocks.pair_blocks.items():
        idx = [vec_index(*c) for c in key]
        sup[np.ix_(idx, idx)] = block
    for c, lam in blocks.scalar_modes.items():
        sup[vec_index(*c), vec_index(*c)] = lam
    return sup


class Mode(Struct, frozen=True, eq=False):
    eigenvalue: complex
    right: "NDArray[np.complex128]"
    left: "NDArray[np.complex128]"
    block: str
    block_order: int


class SpectralDecomposition(Struct, frozen=True, eq=False):
    """Modes sorted by descending real part; mode 0 is the steady state."""

    params: RefrigeratorParams
    modes: tuple[Mode, ...]
    eigenvalues: "NDArray[np.complex128]"
    rights: "NDArray[np.complex128]"
    lefts: "NDArray[np.complex128]"

    def __len__(self):
        return len(self.modes)

    def overlaps(self, rho: DensityMatrix) -> "NDArray[np.complex128]":
        """Tr(l_i rho) for every mode."""
        m = rho.to_energy().matrix
        return np.einsum("kab,ba->k", self.lefts, m)

    def biorthonormality_residual(self) -> "NDArray[np.float64]":
        pairing = np.einsum("iab,jba->ij", self.lefts, self.rights)
        return np.abs(pairing - np.eye(len(self.modes)))

    @property
    def steady_state(self) -> DensityMatrix:
        r = self.rights[0]
        return DensityMatrix(0.5 * (r + r.conj().T), Basis.ENERGY)

    @property
    def gap(self) -> float:
        """|Re lambda_2|, the slowest relaxation rate."""
        return float(abs(self.eigenvalues[1].real))


def _lift(coords: "Sequence[Coord]", vector: "NDArray[np.complex128]", left: bool):
    op = np.zeros((DIM, DIM), dtype=np.complex128)
    for (i, j), v in zip(coords, vector, strict=True):
        if left:
            op[j, i] = v
        else:
            op[i, j] = v
    return op


def _block_modes(
    tag: str,
    order: int,
    coords: "Sequence[Coord]",
    block: "NDArray[np.complex128]",
    stationary: bool = False,
) -> list[Mode]:
    values, vectors = scipy.linalg.eig(block)
    cond = np.linalg.cond(vectors)
    if not np.isfinite(cond) or cond * DEFECT_TOL > 1:
        err = f"eigenvector matrix is numerically singular (cond {cond:.3e})"
        raise DecompositionError(tag, err)
    if stationary:
        k = int(np.argmin(np.abs(values)))
        scale = max(1.0, float(np.max(np.abs(block))))
        if abs(values[k]) <= DEFECT_TOL * scale:
            values[k] = 0
        vectors[:, k] /= vectors[:, k].sum()
    lefts = np.linalg.inv(vectors)
    return [
        Mode(
            complex(values[k]),
            _lift(coords, vectors[:, k], left=False),
            _lift(coords, lefts[k], left=True),
            tag,
            order,
        )
        for k in range(len(values))
    ]


def _sort_modes(modes: list[Mode]) -> list[Mode]:
    # exact zero first, then by real part descending with grouped ties
    by_real = sorted(
        range(len(modes)),
        key=lambda k: (modes[k].eigenvalue != 0, -modes[k].eigenvalue.real),
    )
    ordered: list[Mode] = []
    group: list[int] = []

    def flush():
        group.sort(
            key=lambda k: (
                abs(modes[k].eigenvalue.imag),
                modes[k].block_order,
                -modes[k].eigenvalue.imag,
                k,
            )
        )
        ordered.extend(modes[k] for k in group)
        group.clear()

    for k in by_real:
        if group:
            head = modes[group[0]].eigenvalue
            here = modes[k].eigenvalue
            same = (head == 0) == (here == 0) and abs(head.real - here.real) <= (
                TIE_TOL * max(1.0, abs(head.real))
            )
            if not same:
                flush()
        group.append(k)
    flush()
    return ordered


def spectral_decompose(blocks: BlockLiouvillian) -> SpectralDecomposition:
    modes = _block_modes(
        "pop", 0, POPULATIONS, blocks.pop_block.astype(np.complex128), stationary=True
    )
    for n, (key, block) in enumerate(blocks.pair_blocks.items(), 1):
        tag = "pair({},{}|{},{})".format(*(x + 1 for c in key for x in c))
        modes.extend(_block_modes(tag, n, key, block))
    offset = len(blocks.pair_blocks) + 1
    for n, (c, lam) in enumerate(blocks.scalar_modes.items(), offset):
        modes.append(
            Mode(
                lam,
                _lift((c,), np.ones(1), left=False),
                _lift((c,), np.ones(1), left=True),
                f"scalar({c[0] + 1},{c[1] + 1})",
                n,
            )
        )
    modes = _sort_modes(modes)
    if modes[0].eigenvalue != 0:
        logger.warning("no exact zero mode; leading eigenvalue %s", modes[0].eigenvalue)
    spec = SpectralDecomposition(
        blocks.params,
        tuple(modes),
        np.array([m.eigenvalue for m in modes]),
        np.stack([m.right for m in modes]),
        np.stack([m.left for m in modes]),
    )
    logger.debug(
        "lambda_2 = %s, lambda_3 = %s", spec.eigenvalues[1], spec.eigenvalues[2]
    )
    return spec


def solve_steady_state(blocks: BlockLiouvillian) -> DensityMatrix:
    _, sv, vh = scipy.linalg.svd(blocks.pop_block)
    if sv[-2] <= NULL_SPACE_TOL:
        err = (
            "population generator has a degenerate null space "
            f"(second smallest singular value {sv[-2]:.3e}); no unique steady state"
        )
        raise NonErgodicError(err)
    tau = vh[-1]
    tau = tau / tau.sum()
    if (low := tau.min()) < -NEGATIVITY_TOL:
        err = f"steady state has a negative population {low:.3e}"
        raise NumericalError(err)
    tau = np.clip(tau, 0, None)
    tau /= tau.sum()
    return DensityMatrix(np.diag(tau).astype(np.complex128), Basis.ENERGY)


def slowest_mode_set(spec: SpectralDecomposition, tol: float = 1e-10) -> tuple[int, ...]:
    """Indices of every nonzero mode sharing Re lambda_2."""
    values = spec.eigenvalues
    slow = values[1].real
    return tuple(
        k for k in range(1, len(values)) if values[k] != 0 and abs(values[k].real - slow) <= tol
    )
