"""CSS stabilizer code descriptions shared by the qubit and GKP decoders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ERROR_TYPES = ("X", "Z")


def _as_binary(rows, n=None):
    arr = np.asarray(rows, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, n or 0)
    if n is not None and arr.shape[1] != n:
        raise ValueError(f"expected {n} columns, got {arr.shape[1]}")
    if np.any((arr != 0) & (arr != 1)):
        raise ValueError("binary matrix expected")
    return arr


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """A CSS code given by its X- and Z-type checks and one logical pair.

    ``hx`` rows are X-type checks (they detect Z errors), ``hz`` rows are
    Z-type checks (they detect X errors).  ``lx`` and ``lz`` are the supports
    of the X and Z logical operators.  ``shapes`` optionally holds one 2x2
    symplectic GKP shape per mode acting on ``(q_i, p_i)``.
    """

    hx: np.ndarray
    hz: np.ndarray
    lx: np.ndarray
    lz: np.ndarray
    shapes: np.ndarray | None = None
    name: str = "code"

    def __post_init__(self):
        n = len(self.lx)
        object.__setattr__(self, "lx", _as_binary(self.lx).reshape(-1))
        object.__setattr__(self, "lz", _as_binary(self.lz, n).reshape(-1))
        object.__setattr__(self, "hx", _as_binary(self.hx, n))
        object.__setattr__(self, "hz", _as_binary(self.hz, n))
        if np.any((self.hx @ self.hz.T) % 2):
            raise ValueError("X and Z checks do not commute")
        if np.any((self.hz @ self.lx) % 2) or np.any((self.hx @ self.lz) % 2):
            raise ValueError("logical operators must commute with the checks")
        if int(self.lx @ self.lz) % 2 != 1:
            raise ValueError("X and Z logicals must anticommute")
        if self.shapes is not None:
            shapes = np.asarray(self.shapes, dtype=float)
            if shapes.shape != (n, 2, 2):
                raise ValueError("shapes must have shape (N, 2, 2)")
            dets = shapes[:, 0, 0] * shapes[:, 1, 1] - shapes[:, 0, 1] * shapes[:, 1, 0]
            if np.any(np.abs(dets - 1.0) > 1e-9):
                raise ValueError("each mode shape must be symplectic (det 1)")
            object.__setattr__(self, "shapes", shapes)

    @property
    def n(self) -> int:
        return len(self.lx)

    @property
    def k(self) -> int:
        return self.n - self.rank()

    def rank(self) -> int:
        return gf2_rank(self.hx) + gf2_rank(self.hz)

    def checks_for(self, error_type: str) -> np.ndarray:
        """Check rows that detect errors of ``error_type``."""
        _check_error_type(error_type)
        return self.hx if error_type == "Z" else self.hz

    def opposing_logical(self, error_type: str) -> np.ndarray:
        """Logical support whose overlap parity flags a logical error."""
        _check_error_type(error_type)
        return self.lx if error_type == "Z" else self.lz

    def symplectic_checks(self) -> np.ndarray:
        """Checks as rows ``[x | z]`` of length 2N."""
        n = self.n
        top = np.hstack([self.hx, np.zeros((len(self.hx), n), dtype=np.int64)])
        bottom = np.hstack([np.zeros((len(self.hz), n), dtype=np.int64), self.hz])
        return np.vstack([top, bottom])

    def symplectic_logicals(self) -> np.ndarray:
        """Rows ``[lx | 0]`` and ``[0 | lz]``."""
        z = np.zeros(self.n, dtype=np.int64)
        return np.vstack([np.concatenate([self.lx, z]), np.concatenate([z, self.lz])])

    def with_shapes(self, shapes) -> "CodeSpec":
        return CodeSpec(self.hx, self.hz, self.lx, self.lz, shapes, self.name)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "checks": {"x": self.hx.tolist(), "z": self.hz.tolist()},
            "logicals": {"x": self.lx.tolist(), "z": self.lz.tolist()},
        }
        if self.shapes is not None:
            out["shapes"] = self.shapes.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CodeSpec":
        logicals = data["logicals"]
        n = len(logicals["x"])
        checks = data.get("checks", {})
        hx = np.asarray(checks.get("x", []), dtype=np.int64).reshape(-1, n)
        hz = np.asarray(checks.get("z", []), dtype=np.int64).reshape(-1, n)
        shapes = None
        if "shapes" in data:
            shapes = np.asarray(data["shapes"], dtype=float)
        elif "shape" in data:
            shapes = shapes_from_description(data["shape"], n)
        return cls(hx, hz, logicals["x"], logicals["z"], shapes, data.get("name", "code"))


def _check_error_type(error_type):
    if error_type not in ERROR_TYPES:
        raise ValueError(f"error type must be 'X' or 'Z', got {error_type!r}")


def gf2_rank(rows) -> int:
    """Rank of a binary matrix over GF(2)."""
    m = np.array(rows, dtype=np.uint8) % 2
    if m.size == 0:
        return 0
    rank = 0
    n_rows, n_cols = m.shape
    for col in range(n_cols):
        pivot = None
        for r in range(rank, n_rows):
            if m[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(n_rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == n_rows:
            break
    return rank


def gf2_solve(a, b):
    """One solution x of ``a @ x = b`` over GF(2), or None."""
    a = np.array(a, dtype=np.uint8) % 2
    b = np.array(b, dtype=np.uint8).reshape(-1) % 2
    n_rows, n_cols = a.shape
    aug = np.hstack([a, b.reshape(-1, 1)])
    pivots = []
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if aug[r, col]), None)
        if pivot is None:
            continue
        aug[[rank, pivot]] = aug[[pivot, rank]]
        for r in range(n_rows):
            if r != rank and aug[r, col]:
                aug[r] ^= aug[rank]
        pivots.append(col)
        rank += 1
    if np.any(aug[rank:, -1]):
        return None
    x = np.zeros(n_cols, dtype=np.int64)
    for r, col in enumerate(pivots):
        x[col] = aug[r, -1]
    return x


def gf2_row_basis(rows) -> np.ndarray:
    """Independent rows spanning the same GF(2) space."""
    m = np.array(rows, dtype=np.uint8) % 2
    basis = []
    for row in m:
        v = row.copy()
        for b, lead in basis:
            if v[lead]:
                v ^= b
        nz = np.flatnonzero(v)
        if nz.size:
            basis.append((v, nz[0]))
    if not basis:
        return np.zeros((0, m.shape[1] if m.ndim == 2 else 0), dtype=np.int64)
    return np.array([b for b, _ in basis], dtype=np.int64)


# --- GKP mode shapes -------------------------------------------------------

def hexagonal_shape() -> np.ndarray:
    """Upper-triangular symplectic shape of the hexagonal GKP qubit."""
    g1 = np.sqrt(2.0) / 3.0 ** 0.25
    return np.array([[g1, -g1 / 2.0], [0.0, 1.0 / g1]])


def rectangular_shape(scale: float) -> np.ndarray:
    if scale <= 0:
        raise ValueError("rectangular scale must be positive")
    return np.array([[scale, 0.0], [0.0, 1.0 / scale]])


def shapes_from_description(desc, n: int) -> np.ndarray:
    """Per-mode shapes from a JSON description.

    Accepts ``"square"``, ``"hexagonal"``, ``{"name": "rectangular",
    "scale": g}`` (or ``"scales": [...]``) and ``{"name": "custom",
    "matrix": [[a, b], [c, d]]}``.
    """
    if isinstance(desc, str):
        desc = {"name": desc}
    name = desc["name"]
    if name == "square":
        return np.tile(np.eye(2), (n, 1, 1))
    if name == "hexagonal":
        return np.tile(hexagonal_shape(), (n, 1, 1))
    if name == "rectangular":
        scales = desc.get("scales", [desc.get("scale", 1.0)] * n)
        if len(scales) != n:
            raise ValueError("need one scale per mode")
        return np.array([rectangular_shape(s) for s in scales])
    if name == "custom":
        mat = np.asarray(desc["matrix"], dtype=float)
        return np.tile(mat, (n, 1, 1)) if mat.shape == (2, 2) else mat
    raise ValueError(f"unknown shape {name!r}")


# --- concrete codes --------------------------------------------------------

def rotated_surface_code(distance: int) -> CodeSpec:
    """Rotated surface code on a ``d x d`` grid, qubit index ``r * d + c``.

    Plaquette ``(r, c)`` touches qubits ``(r..r+1, c..c+1)`` and has X type
    when ``r + c`` is even.  Weight-two X plaquettes sit on the top and
    bottom boundaries, weight-two Z plaquettes on the left and right.
    Checks of each type are listed row-major.
    """
    d = int(distance)
    if d < 1 or d % 2 == 0:
        raise ValueError("distance must be an odd positive integer")
    x_rows, z_rows = [], []
    for r in range(-1, d):
        for c in range(-1, d):
            support = [rr * d + cc for rr in (r, r + 1) for cc in (c, c + 1)
                       if 0 <= rr < d and 0 <= cc < d]
            kind = "X" if (r + c) % 2 == 0 else "Z"
            if len(support) == 4:
                pass
            elif len(support) == 2:
                on_rows = r in (-1, d - 1)
                if not ((on_rows and kind == "X") or (not on_rows and kind == "Z")):
                    continue
            else:
                continue
            row = np.zeros(d * d, dtype=np.int64)
            row[support] = 1
            (x_rows if kind == "X" else z_rows).append(row)
    hx = np.array(x_rows, dtype=np.int64).reshape(-1, d * d)
    hz = np.array(z_rows, dtype=np.int64).reshape(-1, d * d)
    first_row = np.zeros(d * d, dtype=np.int64)
    first_row[:d] = 1
    first_col = np.zeros(d * d, dtype=np.int64)
    first_col[::d] = 1
    if not np.any((hz @ first_col) % 2):
        lx, lz = first_col, first_row
    else:
        lx, lz = first_row, first_col
    return CodeSpec(hx, hz, lx, lz, name=f"surface-d{d}")


def six_qubit_code() -> CodeSpec:
    """Six-qubit code with Z checks Z1Z2Z4, Z2Z3Z5, Z4Z6, Z5Z6 and X check X2X4X5X6."""
    hz = np.array([
        [1, 1, 0, 1, 0, 0],
        [0, 1, 1, 0, 1, 0],
        [0, 0, 0, 1, 0, 1],
        [0, 0, 0, 0, 1, 1],
    ])
    hx = np.array([[0, 1, 0, 1, 1, 1]])
    lx = np.array([1, 1, 1, 0, 0, 0])
    lz = np.array([1, 0, 0, 0, 0, 0])
    return CodeSpec(hx, hz, lx, lz, name="six-qubit")


def repetition_pair_code() -> CodeSpec:
    """Two qubits stabilized by Z1Z2, logicals X1X2 and Z1."""
    return CodeSpec(np.zeros((0, 2)), np.array([[1, 1]]), [1, 1], [1, 0], name="two-qubit")


def trivial_code(n_modes: int = 1) -> CodeSpec:
    """A single unencoded mode (no checks)."""
    if n_modes != 1:
        raise ValueError("only the single-mode trivial code is supported")
    return CodeSpec(np.zeros((0, 1)), np.zeros((0, 1)), [1], [1], name="trivial")
