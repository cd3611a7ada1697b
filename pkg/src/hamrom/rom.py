"""Assembly of the five reduced models for canonical two-block wave systems.

The full-order system must have the canonical block structure

    z = (u, v),  D = [[0, I], [-I, 0]],  Q = blkdiag(Q_u, I),  c = (c_u, 0),

which covers the nonlinear-wave benchmark with Q_u = -A.  Separate bases
phi_u, phi_v reduce the two blocks; all offline products are precomputed
so that the online right-hand side costs O(r^2) plus the nonlinear term:
an O(n r) projection for Galerkin and plain structure-preserving models,
or O(s r) sampled evaluation for the interpolation-based ones.

Variants
--------
g-rom       plain Galerkin projection; not structure preserving.
sp-pod-1/2  structure preserving via the reduced skew coupling
            [[0, phi_u^T phi_v], [-phi_v^T phi_u, 0]]; "-2" uses bases
            from snapshots shifted by the initial state.
sp-deim-1/2 same skew structure with the nonlinear gradient term
            evaluated at s interpolation points only.
"""

import struct

import numpy as np

from ._binio import FileFormatError, read_array, read_exact, write_array
from .core import eval_hamiltonian

__all__ = [
    "RomVariant",
    "VARIANT_TAGS",
    "ReducedModel",
    "build_rom",
    "save_rom",
    "load_rom",
]

_ROM_MAGIC = b"HRROM001"
_KIND_CODES = {"g-rom": 0, "sp-pod": 1, "sp-deim": 2}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}

VARIANT_TAGS = ("g-rom", "sp-pod-1", "sp-pod-2", "sp-deim-1", "sp-deim-2")


class RomVariant:
    """Model family (g-rom, sp-pod, sp-deim) plus the shifted-basis flag."""

    def __init__(self, kind, shifted=False):
        if kind not in _KIND_CODES:
            raise ValueError(f"unknown model kind {kind!r}")
        if kind == "g-rom" and shifted:
            raise ValueError("a shifted Galerkin model is not supported")
        self.kind = kind
        self.shifted = bool(shifted)

    @classmethod
    def from_tag(cls, tag):
        if tag == "g-rom":
            return cls("g-rom", False)
        for kind in ("sp-pod", "sp-deim"):
            if tag == kind + "-1":
                return cls(kind, False)
            if tag == kind + "-2":
                return cls(kind, True)
        raise ValueError(f"unknown model tag {tag!r}; expected one of {VARIANT_TAGS}")

    @property
    def tag(self) -> str:
        if self.kind == "g-rom":
            return "g-rom"
        return self.kind + ("-2" if self.shifted else "-1")

    def __eq__(self, other):
        return (
            isinstance(other, RomVariant)
            and self.kind == other.kind
            and self.shifted == other.shifted
        )

    def __repr__(self):
        return f"RomVariant({self.tag!r})"


class ReducedModel:
    """Reduced dynamics with precomputed offline operators.

    The reduced state is the concatenation (a, b) of the u- and v-block
    coefficients.  Use `make_rhs()` to obtain the online right-hand side
    and `hamiltonian()` for the reduced energy.
    """

    def __init__(
        self,
        variant: RomVariant,
        cuv,
        a_red,
        lin_u,
        lin_v,
        phi_u,
        phi_v,
        u_ref,
        v_ref,
        c_u,
        G_fn,
        g_fn,
        state_energy,
        bvu=None,
        deim_indices=None,
        deim_weights=None,
    ):
        self.variant = variant
        self.cuv = np.asarray(cuv, dtype=float)
        self.a_red = np.asarray(a_red, dtype=float)
        self.lin_u = np.asarray(lin_u, dtype=float)
        self.lin_v = np.asarray(lin_v, dtype=float)
        self.phi_u = np.asarray(phi_u, dtype=float)
        self.phi_v = np.asarray(phi_v, dtype=float)
        self.u_ref = np.asarray(u_ref, dtype=float)
        self.v_ref = np.asarray(v_ref, dtype=float)
        self.c_u = np.asarray(c_u, dtype=float)
        self.G_fn = G_fn
        self.g_fn = g_fn
        self.state_energy = state_energy
        self.bvu = None if bvu is None else np.asarray(bvu, dtype=float)
        self.n = self.phi_u.shape[0]
        self.r_u = self.phi_u.shape[1]
        self.r_v = self.phi_v.shape[1]

        if variant.kind == "g-rom" and self.bvu is None:
            raise ValueError("g-rom requires the cross projection phi_v^T A phi_u")

        # Weighted projection rows; exact for the all-ones wave weights and
        # general enough for arbitrary c_u.
        self._proj_u = (self.phi_u * self.c_u[:, None]).T
        self._proj_v = (self.phi_v * self.c_u[:, None]).T
        self._ncvt = -self.cuv.T

        if variant.kind == "sp-deim":
            if deim_indices is None or deim_weights is None:
                raise ValueError("sp-deim requires interpolation indices and weights")
            self.deim_indices = np.asarray(deim_indices, dtype=np.int64)
            self.deim_weights = np.asarray(deim_weights, dtype=float)
            self.s = self.deim_indices.shape[0]
            self._rows = self.phi_u[self.deim_indices, :]
            self._u_ref_s = self.u_ref[self.deim_indices]
            self._wmat = self._rows.T * self.deim_weights
            z_ref = np.concatenate([self.u_ref, self.v_ref])
            self._h_const = float(
                state_energy(z_ref) - self.deim_weights @ G_fn(self._u_ref_s)
            )
        else:
            if deim_indices is not None or deim_weights is not None:
                raise ValueError(f"{variant.tag} does not take interpolation data")
            self.deim_indices = None
            self.deim_weights = None
            self.s = 0

    @property
    def tag(self) -> str:
        return self.variant.tag

    def reduced_skew(self) -> np.ndarray:
        """Assembled reduced coupling [[0, cuv], [-cuv^T, 0]]."""
        ru, rv = self.r_u, self.r_v
        out = np.zeros((ru + rv, ru + rv))
        out[:ru, ru:] = self.cuv
        out[ru:, :ru] = -self.cuv.T
        return out

    def make_rhs(self, g=None):
        """Online right-hand side closure over the reduced state (a, b).

        Pass `g` to substitute (for example to count) the nonlinearity
        derivative; the default is the one captured at build time.
        """
        g_fn = self.g_fn if g is None else g
        ru = self.r_u
        cuv, ncvt, a_red = self.cuv, self._ncvt, self.a_red
        if self.variant.kind == "g-rom":
            bvu, proj_v, phi_u = self.bvu, self._proj_v, self.phi_u

            def f(z):
                a = z[:ru]
                b = z[ru:]
                return np.concatenate([cuv @ b, bvu @ a - proj_v @ g_fn(phi_u @ a)])

            return f
        if self.variant.kind == "sp-pod":
            proj_u, phi_u = self._proj_u, self.phi_u
            if self.variant.shifted:
                u_ref, lin_u, lin_v = self.u_ref, self.lin_u, self.lin_v

                def f(z):
                    a = z[:ru]
                    b = z[ru:]
                    grad_u = proj_u @ g_fn(phi_u @ a + u_ref) - a_red @ a - lin_u
                    return np.concatenate([cuv @ (b + lin_v), ncvt @ grad_u])

            else:

                def f(z):
                    a = z[:ru]
                    b = z[ru:]
                    grad_u = proj_u @ g_fn(phi_u @ a) - a_red @ a
                    return np.concatenate([cuv @ b, ncvt @ grad_u])

            return f
        wmat, rows = self._wmat, self._rows
        if self.variant.shifted:
            u_ref_s, lin_u, lin_v = self._u_ref_s, self.lin_u, self.lin_v

            def f(z):
                a = z[:ru]
                b = z[ru:]
                grad_u = wmat @ g_fn(rows @ a + u_ref_s) - a_red @ a - lin_u
                return np.concatenate([cuv @ (b + lin_v), ncvt @ grad_u])

        else:

            def f(z):
                a = z[:ru]
                b = z[ru:]
                grad_u = wmat @ g_fn(rows @ a) - a_red @ a
                return np.concatenate([cuv @ b, ncvt @ grad_u])

        return f

    def rhs(self, z) -> np.ndarray:
        return self.make_rhs()(z)

    def hamiltonian(self, z) -> float:
        """Reduced energy at a reduced state (a, b).

        Interpolation models evaluate the nonlinearity at the s sampled
        entries only (plus an offline constant); the others evaluate the
        full-order energy of the reconstruction.
        """
        z = np.asarray(z, dtype=float)
        a = z[: self.r_u]
        b = z[self.r_u :]
        if self.variant.kind == "sp-deim":
            return float(
                -0.5 * a @ (self.a_red @ a)
                - a @ self.lin_u
                + 0.5 * b @ b
                + b @ self.lin_v
                + self.deim_weights @ self.G_fn(self._rows @ a + self._u_ref_s)
                + self._h_const
            )
        full = np.concatenate(
            [self.phi_u @ a + self.u_ref, self.phi_v @ b + self.v_ref]
        )
        return float(self.state_energy(full))

    def initial_coefficients(self, z0) -> np.ndarray:
        """Reduced initial state: zeros for shifted models, block projections
        of the full initial state otherwise."""
        z0 = np.asarray(z0, dtype=float)
        if z0.shape != (2 * self.n,):
            raise ValueError(f"state has shape {z0.shape}, expected ({2 * self.n},)")
        if self.variant.shifted:
            return np.zeros(self.r_u + self.r_v)
        return np.concatenate(
            [self.phi_u.T @ z0[: self.n], self.phi_v.T @ z0[self.n :]]
        )

    def reconstruct_blocks(self, coeffs):
        """Map reduced states (rows of coeffs) to full blocks (U, V), n x m."""
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
        U = self.phi_u @ coeffs[:, : self.r_u].T + self.u_ref[:, None]
        V = self.phi_v @ coeffs[:, self.r_u :].T + self.v_ref[:, None]
        return U, V


def _split_fom(fom):
    """Validate the canonical two-block structure and extract (n, A, c_u)."""
    if fom.dim % 2 != 0:
        raise ValueError("full-order system dimension must be even")
    n = fom.dim // 2
    D = fom.D.matrix
    eye = np.eye(n)
    if (
        np.max(np.abs(D[:n, :n])) > 1e-14
        or np.max(np.abs(D[n:, n:])) > 1e-14
        or np.max(np.abs(D[:n, n:] - eye)) > 1e-14
        or np.max(np.abs(D[n:, :n] + eye)) > 1e-14
    ):
        raise ValueError("coefficient matrix is not the canonical block [[0,I],[-I,0]]")
    Q = fom.H.Q
    if np.max(np.abs(Q[:n, n:])) > 1e-12 or np.max(np.abs(Q[n:, :n])) > 1e-12:
        raise ValueError("quadratic part couples the u- and v-blocks")
    if np.max(np.abs(Q[n:, n:] - eye)) > 1e-12:
        raise ValueError("v-block quadratic part must be the identity")
    if np.max(np.abs(fom.H.c[n:])) > 0:
        raise ValueError("nonlinear weights must vanish on the v-block")
    return n, -Q[:n, :n], fom.H.c[:n]


def build_rom(variant, basis_u, basis_v, fom, deim=None, state_energy=None):
    """Assemble a reduced model from block bases and the full-order system.

    Parameters
    ----------
    variant : RomVariant
    basis_u, basis_v : PodBasis
        Block bases; for shifted variants both must carry shift references.
    fom : HamiltonianSystem
        Canonical two-block system (see module docstring).
    deim : DeimModel, optional
        Required for (and only for) sp-deim variants.
    state_energy : callable, optional
        Fast full-state energy z -> float; defaults to the dense evaluation
        through the system's split Hamiltonian.
    """
    n, A, c_u = _split_fom(fom)
    if basis_u.n != n or basis_v.n != n:
        raise ValueError("basis row count does not match the block dimension")
    if basis_u.shifted != variant.shifted or basis_v.shifted != variant.shifted:
        raise ValueError(
            f"{variant.tag} needs {'shifted' if variant.shifted else 'unshifted'} bases"
        )
    if variant.kind == "sp-deim":
        if deim is None:
            raise ValueError("sp-deim variants require a DEIM model")
        if deim.n != n:
            raise ValueError("DEIM basis row count does not match the block dimension")
        if deim.shifted != variant.shifted:
            raise ValueError("DEIM shift flag does not match the model variant")
    elif deim is not None:
        raise ValueError(f"{variant.tag} does not take a DEIM model")

    if state_energy is None:
        state_energy = lambda z: eval_hamiltonian(fom.H, z)  # noqa: E731

    phi_u, phi_v = basis_u.phi, basis_v.phi
    if variant.shifted:
        u_ref = np.asarray(basis_u.shift_ref, dtype=float)
        v_ref = np.asarray(basis_v.shift_ref, dtype=float)
    else:
        u_ref = np.zeros(n)
        v_ref = np.zeros(n)

    cuv = phi_u.T @ phi_v
    a_red = phi_u.T @ (A @ phi_u)
    lin_u = phi_u.T @ (A @ u_ref) if variant.shifted else np.zeros(phi_u.shape[1])
    lin_v = phi_v.T @ v_ref if variant.shifted else np.zeros(phi_v.shape[1])
    bvu = phi_v.T @ (A @ phi_u) if variant.kind == "g-rom" else None

    return ReducedModel(
        variant,
        cuv,
        a_red,
        lin_u,
        lin_v,
        phi_u,
        phi_v,
        u_ref,
        v_ref,
        c_u,
        fom.H.G,
        fom.H.g,
        state_energy,
        bvu=bvu,
        deim_indices=None if deim is None else deim.indices,
        deim_weights=None if deim is None else deim.weights,
    )


# ---------------------------------------------------------------------------
# Artifact persistence: header plus float64 arrays in a fixed order.


def save_rom(model: ReducedModel, path):
    with open(path, "wb") as fh:
        fh.write(
            struct.pack(
                "<8sIIBQQQQ",
                _ROM_MAGIC,
                1,
                _KIND_CODES[model.variant.kind],
                model.variant.shifted,
                model.n,
                model.r_u,
                model.r_v,
                model.s,
            )
        )
        for arr in (
            model.cuv,
            model.a_red,
            model.lin_u,
            model.lin_v,
            model.phi_u,
            model.phi_v,
            model.u_ref,
            model.v_ref,
            model.c_u,
        ):
            write_array(fh, arr)
        if model.bvu is not None:
            write_array(fh, model.bvu)
        if model.s:
            write_array(fh, model.deim_indices, dtype="<u8")
            write_array(fh, model.deim_weights)


def load_rom(path, fom, state_energy=None) -> ReducedModel:
    """Load a reduced-model artifact.

    The full-order system supplies the nonlinearity and (by default) the
    state-energy evaluator; its dimensions are validated against the file.
    """
    with open(path, "rb") as fh:
        head = read_exact(fh, struct.calcsize("<8sIIBQQQQ"), "artifact header")
        magic, version, kind_code, shifted, n, r_u, r_v, s = struct.unpack(
            "<8sIIBQQQQ", head
        )
        if magic != _ROM_MAGIC:
            raise FileFormatError(f"{path}: bad magic {magic!r}")
        if version != 1:
            raise FileFormatError(f"{path}: unsupported version {version}")
        if kind_code not in _KIND_NAMES:
            raise FileFormatError(f"{path}: unknown variant code {kind_code}")
        if max(n, r_u, r_v, s) > 1 << 32:
            raise FileFormatError(f"{path}: implausible dimensions")
        variant = RomVariant(_KIND_NAMES[kind_code], bool(shifted))
        cuv = read_array(fh, (r_u, r_v), "coupling block")
        a_red = read_array(fh, (r_u, r_u), "reduced quadratic block")
        lin_u = read_array(fh, (r_u,), "u-block offset")
        lin_v = read_array(fh, (r_v,), "v-block offset")
        phi_u = read_array(fh, (n, r_u), "u-block basis")
        phi_v = read_array(fh, (n, r_v), "v-block basis")
        u_ref = read_array(fh, (n,), "u reference")
        v_ref = read_array(fh, (n,), "v reference")
        c_u = read_array(fh, (n,), "nonlinear weights")
        bvu = (
            read_array(fh, (r_v, r_u), "cross projection")
            if variant.kind == "g-rom"
            else None
        )
        indices = weights = None
        if s:
            indices = read_array(fh, (s,), "interpolation indices", dtype="<u8")
            weights = read_array(fh, (s,), "interpolation weights")
    if fom.dim != 2 * n:
        raise ValueError(
            f"artifact dimension 2x{n} does not match the system dimension {fom.dim}"
        )
    if state_energy is None:
        state_energy = lambda z: eval_hamiltonian(fom.H, z)  # noqa: E731
    return ReducedModel(
        variant,
        cuv,
        a_red,
        lin_u,
        lin_v,
        phi_u,
        phi_v,
        u_ref,
        v_ref,
        c_u,
        fom.H.G,
        fom.H.g,
        state_energy,
        bvu=bvu,
        deim_indices=indices,
        deim_weights=weights,
    )
