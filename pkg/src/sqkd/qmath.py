"""Dense complex linear algebra and entropy helpers for small quantum systems.

All logarithms are base 2. States are plain numpy arrays: 1-d vectors for
pure states, square matrices for density operators. In every tensor product
the leftmost factor is the most significant subsystem of the flattened index.
"""

from __future__ import annotations

import math

import numpy as np

#: tolerance for normalization / hermiticity / trace validation
ATOL = 1e-9
#: largest imaginary residue tolerated when a trace should be real
IMAG_ATOL = 1e-10

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
KET_MINUS = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def as_state_vector(amplitudes, normalized: bool = True) -> np.ndarray:
    """Validate a complex amplitude vector.

    Sub-normalized fragments are accepted with ``normalized=False``;
    components must always be finite.
    """
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size == 0:
        raise ValueError("state vector must have at least one amplitude")
    if not (np.all(np.isfinite(v.real)) and np.all(np.isfinite(v.imag))):
        raise ValueError("state vector has non-finite amplitudes")
    if normalized:
        norm2 = float(np.vdot(v, v).real)
        if abs(norm2 - 1.0) > ATOL:
            raise ValueError(f"state vector is not normalized: |v|^2 = {norm2!r}")
    return v


def projector(v) -> np.ndarray:
    """|v><v| for a vector v (not required to be normalized)."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def check_density_operator(rho, check_trace: bool = True, atol: float = ATOL) -> np.ndarray:
    """Validate hermiticity, positivity and (optionally) unit trace.

    Intermediate branch operators that carry an explicit weight may skip the
    trace check.  Returns the operator as a complex array.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density operator must be square, got shape {rho.shape}")
    if not (np.all(np.isfinite(rho.real)) and np.all(np.isfinite(rho.imag))):
        raise ValueError("density operator has non-finite entries")
    herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_dev > atol:
        raise ValueError(f"operator is not Hermitian (max deviation {herm_dev:.3e})")
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if eigs.min() < -atol:
        raise ValueError(f"operator has negative eigenvalue {eigs.min():.3e}")
    if check_trace:
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > atol:
            raise ValueError(f"trace must be 1, got {tr!r}")
    return rho


def shannon_entropy(probs) -> float:
    """H(p) = -sum_i p_i log2 p_i with the convention 0 log2 0 = 0."""
    p = np.asarray(probs, dtype=float).reshape(-1)
    if p.size == 0:
        raise ValueError("empty probability vector")
    if np.any(p < -1e-12):
        raise ValueError(f"negative probability {p.min()!r}")
    p = np.clip(p, 0.0, None)
    total = float(p.sum())
    if abs(total - 1.0) > ATOL:
        raise ValueError(f"probabilities must sum to 1, got {total!r}")
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2(1-x)."""
    x = float(x)
    if x < -1e-12 or x > 1.0 + 1e-12:
        raise ValueError(f"binary entropy argument {x!r} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def von_neumann_entropy(rho) -> float:
    """Entropy of the eigenvalue spectrum of a density operator.

    Eigenvalues are clamped to [0, 1] before the entropy evaluation to guard
    against round-off; the result is clamped to be non-negative.
    """
    rho = check_density_operator(rho)
    eigs = np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)
    nz = eigs[eigs > 0.0]
    return max(0.0, float(-(nz * np.log2(nz)).sum()))


def eig_hermitian_2x2(m) -> tuple[float, float]:
    """Closed-form eigenvalues of a Hermitian 2x2 matrix, descending.

    For [[a, c], [conj(c), d]] they are (a+d)/2 +- sqrt((a-d)^2/4 + |c|^2).
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    dev = max(abs(m[0, 1] - m[1, 0].conjugate()), abs(m[0, 0].imag), abs(m[1, 1].imag))
    if dev > ATOL:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    a = m[0, 0].real
    d = m[1, 1].real
    half_gap = math.hypot((a - d) / 2.0, abs(m[0, 1]))
    mid = (a + d) / 2.0
    return (mid + half_gap, mid - half_gap)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the left operand is the most significant subsystem."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError("operands must both be vectors or both be matrices")
    return np.kron(a, b)


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Reduced operator on the subsystems listed in ``keep``.

    ``dims`` gives the dimension of each tensor factor, most significant
    first; their product must equal the dimension of ``rho``.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ValueError("subsystem dimensions must be positive")
    n = len(dims)
    total = math.prod(dims)
    if rho.ndim != 2 or rho.shape != (total, total):
        raise ValueError(f"operator shape {rho.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep={keep} out of range for {n} subsystems")
    reshaped = rho.reshape(dims + dims)
    row_subs = list(range(n))
    col_subs = [i + n if i in keep else i for i in range(n)]
    out_subs = keep + [i + n for i in keep]
    reduced = np.einsum(reshaped, row_subs + col_subs, out_subs)
    d_keep = math.prod(dims[i] for i in keep)
    return reduced.reshape(d_keep, d_keep)


def measure_probability(rho, op) -> float:
    """tr(op rho), which must be real up to a tiny imaginary residue."""
    rho = np.asarray(rho, dtype=complex)
    op = np.asarray(op, dtype=complex)
    if rho.shape != op.shape or rho.ndim != 2:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs operator {op.shape}")
    p = complex(np.trace(op @ rho))
    if abs(p.imag) > IMAG_ATOL:
        raise ValueError(f"trace has imaginary residue {p.imag:.3e}")
    return float(p.real)
