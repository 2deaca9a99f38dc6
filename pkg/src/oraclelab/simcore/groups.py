"""Finite groups with unitary irreps and their Fourier-transform matrices.

A :class:`GroupSpec` carries a multiplication table plus, for every irrep, a
unitary matrix per group element.  The Fourier transform over the group is
the ``|G| x |G|`` matrix whose row ``(rep, i, j)`` has entries
``sqrt(d_rep / |G|) * rep(g)[i, j]``; row orthonormality is Schur
orthogonality of matrix coefficients.

Cyclic groups and bit-string (XOR) groups are generated by formula.  The
nonabelian examples of order <= 8 ship as irrep tables in
``data/groups.json``; constructing irreps from scratch is out of scope, so
the loader only validates what it reads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from ..errors import InvalidConfigError, InvalidGroupDataError
from .circuits import MatrixUnitary

IRREP_UNITARY_TOL = 1e-12
HOMOMORPHISM_TOL = 1e-10
FOURIER_UNITARY_TOL = 1e-10
EXHAUSTIVE_ASSOC_MAX_ORDER = 24


@dataclass(frozen=True)
class Irrep:
    """One unitary irreducible representation: a matrix per group element."""

    label: str
    dim: int
    matrices: np.ndarray = field(repr=False)  # shape (order, dim, dim)

    def __post_init__(self):
        mats = np.array(self.matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[1:] != (self.dim, self.dim):
            raise InvalidGroupDataError(
                f"irrep {self.label}: expected (order, {self.dim}, {self.dim}) matrices"
            )
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)


@dataclass(frozen=True)
class GroupSpec:
    """A finite group given by its multiplication table and unitary irreps."""

    name: str
    order: int
    mult_table: np.ndarray = field(repr=False)
    irreps: tuple[Irrep, ...] = ()

    def __post_init__(self):
        table = np.array(self.mult_table, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "mult_table", table)
        self._validate()

    def _validate(self) -> None:
        n = self.order
        table = self.mult_table
        if table.shape != (n, n):
            raise InvalidGroupDataError(f"{self.name}: mult_table must be {n}x{n}")
        if table.min() < 0 or table.max() >= n:
            raise InvalidGroupDataError(f"{self.name}: mult_table entries out of range")

        # Identity element, and each row/column a permutation (inverses exist).
        idx = np.arange(n)
        identity_rows = np.nonzero((table == idx[None, :]).all(axis=1))[0]
        if len(identity_rows) != 1 or not (table[:, identity_rows[0]] == idx).all():
            raise InvalidGroupDataError(f"{self.name}: no two-sided identity")
        if not ((np.sort(table, axis=1) == idx).all() and (np.sort(table, axis=0) == idx[:, None]).all()):
            raise InvalidGroupDataError(f"{self.name}: rows/columns are not permutations")

        if n <= EXHAUSTIVE_ASSOC_MAX_ORDER:
            left = table[table, :]  # left[g,h,k] = table[table[g,h], k]
            right = table[:, table]  # right[g,h,k] = table[g, table[h,k]]
            if not (left == right).all():
                raise InvalidGroupDataError(f"{self.name}: mult_table is not associative")

        if self.irreps:
            dims_sq = sum(rep.dim**2 for rep in self.irreps)
            if dims_sq != n:
                raise InvalidGroupDataError(
                    f"{self.name}: sum of squared irrep dims {dims_sq} != order {n}"
                )
            for rep in self.irreps:
                mats = rep.matrices
                if mats.shape[0] != n:
                    raise InvalidGroupDataError(
                        f"{self.name}/{rep.label}: need one matrix per element"
                    )
                eye = np.eye(rep.dim)
                defect = np.abs(
                    np.einsum("gij,gik->gjk", mats.conj(), mats) - eye[None]
                ).max()
                if defect > IRREP_UNITARY_TOL:
                    raise InvalidGroupDataError(
                        f"{self.name}/{rep.label}: non-unitary matrices (defect {defect:.2e})"
                    )
                products = np.einsum("gij,hjk->ghik", mats, mats)
                hom_defect = np.abs(products - mats[table]).max()
                if hom_defect > HOMOMORPHISM_TOL:
                    raise InvalidGroupDataError(
                        f"{self.name}/{rep.label}: not a homomorphism (defect {hom_defect:.2e})"
                    )

    @property
    def identity(self) -> int:
        idx = np.arange(self.order)
        return int(np.nonzero((self.mult_table == idx[None, :]).all(axis=1))[0][0])

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "order": self.order,
            "mult_table": self.mult_table.tolist(),
            "irreps": [
                {
                    "label": rep.label,
                    "dim": rep.dim,
                    "matrices": [
                        [[[float(z.real), float(z.imag)] for z in row] for row in mat]
                        for mat in rep.matrices
                    ],
                }
                for rep in self.irreps
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "GroupSpec":
        irreps = tuple(
            Irrep(
                label=item["label"],
                dim=int(item["dim"]),
                matrices=np.array(
                    [
                        [[complex(re, im) for re, im in row] for row in mat]
                        for mat in item["matrices"]
                    ],
                    dtype=complex,
                ),
            )
            for item in data["irreps"]
        )
        return cls(
            name=data["name"],
            order=int(data["order"]),
            mult_table=np.array(data["mult_table"], dtype=np.int64),
            irreps=irreps,
        )


@dataclass(frozen=True)
class FourierMatrix:
    """The Fourier transform over a finite group.

    Row ``r`` corresponds to ``row_index[r] = (label, i, j)`` with ``i, j``
    1-based matrix coordinates inside the irrep; column ``g`` runs over group
    elements.  Entries are ``sqrt(d / |G|) * rep(g)[i-1, j-1]``.
    """

    group: GroupSpec
    entries: np.ndarray = field(repr=False)
    row_index: tuple[tuple[str, int, int], ...] = ()

    def __post_init__(self):
        mat = np.array(self.entries, dtype=complex)
        n = self.group.order
        if mat.shape != (n, n):
            raise InvalidGroupDataError("Fourier matrix must be |G| x |G|")
        defect = np.abs(mat.conj().T @ mat - np.eye(n)).max()
        if defect > FOURIER_UNITARY_TOL:
            raise InvalidGroupDataError(
                f"Fourier matrix not unitary (defect {defect:.2e})"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    def row_for(self, label: str, i: int, j: int) -> int:
        return self.row_index.index((label, i, j))

    def rows_for_block(self, label: str, i: int) -> list[int]:
        """Rows ``(label, i, *)``: the measurement block of output label ``(label, i)``."""
        return [r for r, (lab, ii, _jj) in enumerate(self.row_index) if lab == label and ii == i]

    def block_labels(self) -> list[tuple[str, int]]:
        """All ``(irrep label, i)`` output labels, in row order."""
        seen: list[tuple[str, int]] = []
        for lab, i, _j in self.row_index:
            if (lab, i) not in seen:
                seen.append((lab, i))
        return seen

    def as_action(self) -> MatrixUnitary:
        """The matrix as a qubit-register action; order must be a power of two."""
        n = self.group.order
        if n & (n - 1):
            raise InvalidConfigError(
                f"group order {n} is not a power of two; no qubit register fits exactly"
            )
        return MatrixUnitary(self.entries)


def group_fourier(group: GroupSpec) -> FourierMatrix:
    """Assemble the Fourier matrix of ``group`` from its irrep tables."""
    if not group.irreps:
        raise InvalidGroupDataError(f"{group.name}: no irreps attached")
    rows = []
    index = []
    for rep in group.irreps:
        scale = np.sqrt(rep.dim / group.order)
        for i in range(rep.dim):
            for j in range(rep.dim):
                rows.append(scale * rep.matrices[:, i, j])
                index.append((rep.label, i + 1, j + 1))
    return FourierMatrix(group, np.array(rows), tuple(index))


def cyclic_group(n: int) -> GroupSpec:
    """Z_n with its characters chi_j(g) = exp(2 pi i j g / n)."""
    if n < 2:
        raise InvalidConfigError("cyclic group needs order >= 2")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    omega = np.exp(2j * np.pi / n)
    # Reduce exponents mod n before powering to keep phases at machine accuracy.
    irreps = tuple(
        Irrep(f"chi{j}", 1, (omega ** ((j * idx) % n)).reshape(n, 1, 1))
        for j in range(n)
    )
    return GroupSpec(f"Z{n}", n, table, irreps)


def xor_group(n_bits: int) -> GroupSpec:
    """The group of n-bit strings under XOR, with parity characters."""
    if n_bits < 1:
        raise InvalidConfigError("need at least one bit")
    n = 2**n_bits
    idx = np.arange(n)
    table = idx[:, None] ^ idx[None, :]
    irreps = []
    for a in range(n):
        parities = np.array([bin(a & g).count("1") & 1 for g in range(n)])
        chars = np.where(parities, -1.0, 1.0).astype(complex)
        irreps.append(Irrep(f"chi{a}", 1, chars.reshape(n, 1, 1)))
    return GroupSpec(f"XOR{n_bits}", n, table, tuple(irreps))


def qft_cyclic(n: int) -> FourierMatrix:
    """Fourier matrix over Z_n: entry(j, g) = omega^(j g) / sqrt(n)."""
    return group_fourier(cyclic_group(n))


def load_group_json(path) -> GroupSpec:
    """Load a group from the documented JSON layout."""
    with open(path, encoding="utf-8") as fh:
        return GroupSpec.from_json_dict(json.load(fh))


def builtin_group(name: str) -> GroupSpec:
    """One of the shipped nonabelian examples: ``s3``, ``d4`` or ``q8``."""
    data = json.loads(
        resources.files("oraclelab").joinpath("data/groups.json").read_text("utf-8")
    )
    for item in data["groups"]:
        if item["name"].lower() == name.lower():
            return GroupSpec.from_json_dict(item)
    raise InvalidConfigError(f"no builtin group named {name!r}")


def dump_matrix_csv(matrix: np.ndarray, path) -> None:
    """Debug dump: row-major CSV, cells formatted re+imj at 17 significant digits."""
    mat = np.asarray(matrix, dtype=complex)
    with open(path, "w", encoding="utf-8") as fh:
        for row in mat:
            fh.write(",".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
            fh.write("\n")
