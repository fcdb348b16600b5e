"""Pre-orthogonal greedy algorithm over parameterized dictionaries.

Classical orthogonal greedy selection scores a candidate atom by its raw
inner product with the remainder and orthogonalizes afterwards.  The
pre-orthogonal variant orthogonalizes first: a candidate a is scored by
|<g_n, B_n^a>| where B_n^a completes the current orthonormal frame by the
Gram-Schmidt step on a, which equals |<g_n, a>| / r_n(a) with
r_n(a) = ||Q_{n-1}(a)|| the projection-residual norm.  Scoring therefore
always dominates the raw inner product, and candidates that fall inside the
frame span (r_n = 0) escalate to the next multiplicity order at the same
parameter, which realizes the derivative-closure of the dictionary without
numerical differentiation.

A weak variant accepts any candidate within a factor rho of the supremal
gain; among qualifying candidates the one with the smallest r is taken,
which keeps the rate constant small.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    DomainError,
    SpanDegeneracyError,
)
from .hardy import FourierCoeffs1D, FourierCoeffs2D, grid_points, require_nonzero
from .szego import AtomSpec, TensorAtomSpec, normalized_atom_coeffs, tensor_atom_coeffs

__all__ = [
    "EPS_SPAN",
    "OrthoFrame",
    "SelectionOutcome",
    "project_residual",
    "candidate_gain",
    "SzegoDictionary1D",
    "ProductSzegoDictionary2D",
    "poga_select",
    "oga_select",
    "PogaStep",
    "PogaRecord",
    "poga_decompose",
    "reconstruct_poga",
    "RateRow",
    "RateReport",
    "rate_report",
]

EPS_SPAN = 1e-8
MAX_ESCALATION = 24


def _as_vector(x):
    if isinstance(x, (FourierCoeffs1D, FourierCoeffs2D)):
        return x.data.ravel()
    return np.asarray(x, dtype=complex).ravel()


class OrthoFrame:
    """Orthonormal vectors built by Gram-Schmidt from selected atoms.

    The classical step runs twice per extension (one refinement pass), which
    keeps the frame orthonormal to machine precision even for near-parallel
    kernels; a full re-orthogonalization kicks in should the Gram defect
    ever exceed 1e-9.
    """

    def __init__(self, dim):
        self.dim = int(dim)
        self.matrix = np.zeros((0, self.dim), dtype=complex)
        self.specs = []

    def __len__(self):
        return self.matrix.shape[0]

    def project_residual(self, x):
        """Q(x) = x - sum <x, B_k> B_k and its norm."""
        x = _as_vector(x)
        if x.size != self.dim:
            raise DimensionMismatchError(
                "vector length %d does not match frame dimension %d" % (x.size, self.dim)
            )
        res = x - (np.conj(self.matrix) @ x) @ self.matrix
        return res, float(np.linalg.norm(res))

    def extend(self, x, spec=None):
        """Append the normalized Gram-Schmidt residual of x.

        Returns (new basis vector, r) where r is the residual norm before
        normalization.  Raises SpanDegeneracyError when x is numerically in
        the current span.
        """
        res, r = self.project_residual(x)
        if r < EPS_SPAN:
            raise SpanDegeneracyError("atom lies in the span of the frame", r=r)
        res = res - (np.conj(self.matrix) @ res) @ self.matrix
        norm = float(np.linalg.norm(res))
        vec = res / norm
        self.matrix = np.vstack([self.matrix, vec])
        self.specs.append(spec)
        if self.gram_defect() > 1e-9:
            self.reorthogonalize()
        return self.matrix[-1], r

    def gram_defect(self):
        if len(self) == 0:
            return 0.0
        gram = np.conj(self.matrix) @ self.matrix.T
        return float(np.max(np.abs(gram - np.eye(len(self)))))

    def reorthogonalize(self):
        """Sequential double Gram-Schmidt pass over the existing basis."""
        for k in range(len(self)):
            v = self.matrix[k]
            for _ in range(2):
                if k:
                    head = self.matrix[:k]
                    v = v - (np.conj(head) @ v) @ head
            self.matrix[k] = v / np.linalg.norm(v)


def project_residual(frame, x):
    """Module-level alias for OrthoFrame.project_residual."""
    return frame.project_residual(x)


@dataclass(frozen=True)
class SelectionOutcome:
    """A scored candidate: its spec, residual norm r, and gain |<g, B^a>|."""

    atom: object
    r: float
    gain: float


def candidate_gain(g, atom, frame, eps_span=EPS_SPAN, spec=None):
    """Score one candidate atom against the current frame.

    gain = |<g, atom>| / r with r = ||Q(atom)||; the identity
    gain * r = |<g, atom>| holds by construction and gain always dominates
    the raw inner product since r <= ||atom|| = 1.

    Raises
    ------
    SpanDegeneracyError
        When r < eps_span; the caller escalates the candidate to the next
        multiplicity order.
    """
    g = _as_vector(g)
    atom = _as_vector(atom)
    _, r = frame.project_residual(atom)
    if r < eps_span:
        raise SpanDegeneracyError("candidate atom lies in the frame span", r=r)
    inner = abs(complex(np.vdot(atom, g)))
    return SelectionOutcome(atom=spec, r=r, gain=inner / r)


class SzegoDictionary1D:
    """Complete kernel dictionary on the disc, parameterized by a polar grid.

    Supplies unit-norm atom vectors for (parameter, order) pairs, a batched
    scan of all base atoms, and the multiplicity-escalation rule.
    """

    def __init__(self, order, grid):
        self.order = int(order)
        self.grid = grid
        self.params = grid_points(grid)
        k = np.arange(self.order + 1)
        weights = np.sqrt(1.0 - np.abs(self.params) ** 2)
        self._base = weights[:, None] * np.conj(self.params)[:, None] ** k[None, :]
        self._base_norms_sq = np.sum(np.abs(self._base) ** 2, axis=1)
        self._index = {complex(p): i for i, p in enumerate(self.params)}

    @property
    def dim(self):
        return self.order + 1

    def __len__(self):
        return self.params.size

    def base_spec(self, i):
        return AtomSpec(complex(self.params[i]), 1)

    def base_index(self, spec):
        """Grid index of a first-order spec, None for anything else."""
        if getattr(spec, "m", None) != 1:
            return None
        return self._index.get(complex(spec.a))

    def atom_vector(self, spec):
        return normalized_atom_coeffs(spec, self.order).data.copy()

    def escalations(self, spec):
        return [AtomSpec(spec.a, spec.m + 1)]

    def scan(self, g, frame):
        """(|<g, atom_i>|, r_i) for every base atom against the frame."""
        g = _as_vector(g)
        inner = np.abs(np.conj(self._base) @ g)
        if len(frame):
            proj = self._base @ np.conj(frame.matrix).T
            r_sq = self._base_norms_sq - np.sum(np.abs(proj) ** 2, axis=1)
        else:
            r_sq = self._base_norms_sq.copy()
        return inner, np.sqrt(np.clip(r_sq, 0.0, None))


class ProductSzegoDictionary2D:
    """Complete tensor-kernel dictionary on the 2-torus.

    Base atoms are tensor products of unit kernels over all pairs of grid
    points; escalation raises one factor's order at a time.
    """

    def __init__(self, order, grid):
        self.order = int(order)
        self.grid = grid
        self.params = grid_points(grid)
        k = np.arange(self.order + 1)
        weights = np.sqrt(1.0 - np.abs(self.params) ** 2)
        self._factors = weights[:, None] * np.conj(self.params)[:, None] ** k[None, :]
        self._factor_norms_sq = np.sum(np.abs(self._factors) ** 2, axis=1)
        self._index = {complex(p): i for i, p in enumerate(self.params)}

    @property
    def dim(self):
        return (self.order + 1) ** 2

    def __len__(self):
        return self.params.size ** 2

    def base_spec(self, i):
        n = self.params.size
        ia, ib = divmod(int(i), n)
        return TensorAtomSpec.of(complex(self.params[ia]), complex(self.params[ib]))

    def base_index(self, spec):
        """Flat pair index of a first-order tensor spec, None otherwise."""
        if spec.left.m != 1 or spec.right.m != 1:
            return None
        ia = self._index.get(complex(spec.left.a))
        ib = self._index.get(complex(spec.right.a))
        if ia is None or ib is None:
            return None
        return ia * self.params.size + ib

    def atom_vector(self, spec):
        return tensor_atom_coeffs(spec, self.order).data.ravel()

    def escalations(self, spec):
        return [
            TensorAtomSpec(AtomSpec(spec.left.a, spec.left.m + 1), spec.right),
            TensorAtomSpec(spec.left, AtomSpec(spec.right.a, spec.right.m + 1)),
        ]

    def scan(self, g, frame):
        side = self.order + 1
        G = _as_vector(g).reshape(side, side)
        A = self._factors
        inner = np.abs(np.conj(A) @ G @ np.conj(A).T)
        r_sq = np.outer(self._factor_norms_sq, self._factor_norms_sq)
        for j in range(len(frame)):
            B = frame.matrix[j].reshape(side, side)
            r_sq = r_sq - np.abs(A @ np.conj(B) @ A.T) ** 2
        return inner.ravel(), np.sqrt(np.clip(r_sq, 0.0, None).ravel())


def _escalated_candidates(dictionary, spec, frame):
    """Walk the multiplicity ladder until specs leave the frame span.

    Returns the frontier of not-yet-selected escalations of ``spec``; for
    tensor dictionaries both single-factor raises are explored, keeping the
    search breadth-first and deduplicated.
    """
    selected = set(s for s in frame.specs if s is not None)
    out, seen, frontier = [], {spec}, [spec]
    depth = 0
    while frontier and depth < MAX_ESCALATION:
        depth += 1
        nxt = []
        for s in frontier:
            for cand in dictionary.escalations(s):
                if cand in seen:
                    continue
                seen.add(cand)
                if cand in selected:
                    nxt.append(cand)
                else:
                    out.append(cand)
        frontier = nxt
    if not out:
        raise DegenerateInputError("multiplicity escalation exceeded its depth limit")
    return out


def _select(g, frame, dictionary, rho):
    """Shared core of poga_select and poga_decompose.

    Returns (outcome, sup_gain, sup_r_grid).
    """
    g = _as_vector(g)
    require_nonzero(float(np.linalg.norm(g)) ** 2, "greedy remainder")
    inner, r = dictionary.scan(g, frame)
    selected = set(s for s in frame.specs if s is not None)

    # already-selected base atoms are in-span by construction, whatever the
    # cancellation-limited scan residual says
    structural = set()
    for s in selected:
        idx = dictionary.base_index(s)
        if idx is not None:
            structural.add(idx)

    candidates = []  # (gain, r, order_index, spec)
    degenerate = []
    for i in range(inner.size):
        spec = None
        if r[i] < EPS_SPAN or i in structural:
            degenerate.append(i)
            continue
        candidates.append((float(inner[i] / r[i]), float(r[i]), i, spec))

    order_index = inner.size
    for i in degenerate:
        spec = dictionary.base_spec(i)
        for esc in _escalated_candidates(dictionary, spec, frame):
            vec = dictionary.atom_vector(esc)
            _, r_esc = frame.project_residual(vec)
            attempts = 0
            while r_esc < EPS_SPAN and attempts < MAX_ESCALATION:
                esc = _escalated_candidates(dictionary, esc, frame)[0]
                vec = dictionary.atom_vector(esc)
                _, r_esc = frame.project_residual(vec)
                attempts += 1
            if r_esc < EPS_SPAN:
                continue
            gain = abs(complex(np.vdot(vec, g))) / r_esc
            candidates.append((gain, float(r_esc), order_index, esc))
            order_index += 1

    if not candidates:
        raise DegenerateInputError("no usable candidate atom on the grid")

    sup_gain = max(c[0] for c in candidates)
    qualifying = [c for c in candidates if c[0] >= rho * sup_gain]
    qualifying.sort(key=lambda c: (c[1], c[2]))
    gain, r_sel, idx, spec = qualifying[0]
    if spec is None:
        spec = dictionary.base_spec(idx)
    sup_r = float(np.max(r)) if r.size else 0.0
    return SelectionOutcome(atom=spec, r=r_sel, gain=gain), sup_gain, sup_r


def poga_select(g, frame, dictionary, rho=1.0):
    """Pre-orthogonal (weak) maximal selection over the dictionary grid.

    With rho = 1 this returns the grid maximizer of the pre-orthogonal
    gain; with rho < 1 any candidate within rho of the supremal gain
    qualifies and the one with the smallest residual norm r is preferred
    (ties fall back to grid order).  Candidates inside the frame span are
    replaced by their escalated multiplicity versions.
    """
    if not 0.0 < rho <= 1.0:
        raise DomainError("rho must lie in (0, 1]")
    outcome, _, _ = _select(g, frame, dictionary, rho)
    return outcome


def oga_select(g, dictionary):
    """Plain greedy baseline: maximize the raw inner product |<g, atom>|."""
    g = _as_vector(g)
    require_nonzero(float(np.linalg.norm(g)) ** 2, "greedy remainder")
    empty = OrthoFrame(dictionary.dim)
    inner, _ = dictionary.scan(g, empty)
    return dictionary.base_spec(int(np.argmax(inner)))


@dataclass
class PogaStep:
    atom: object
    coeff: complex
    r: float
    r_sup: float
    residual_energy: float


@dataclass
class PogaRecord:
    initial_energy: float
    rho: float
    steps: list[PogaStep] = field(default_factory=list)
    frame: OrthoFrame | None = field(default=None, repr=False)

    def residual_energies(self):
        return [s.residual_energy for s in self.steps]

    def r_max_values(self):
        """Running max of the per-step supremal residual norms."""
        out, running = [], 0.0
        for s in self.steps:
            running = max(running, s.r_sup)
            out.append(running)
        return out


def poga_decompose(
    f,
    n_terms,
    dictionary,
    rho=1.0,
    synthesis=None,
    threshold=1e-12,
):
    """Pre-orthogonal greedy decomposition.

    Maintains the orthonormal frame and the orthogonal remainder
    g_{n+1} = g_n - <g_n, B_n> B_n, so the ledger
    ||f||^2 = sum |coeff_k|^2 + ||g||^2 is exact.  When ``synthesis`` (a
    list of atom specs known to represent f) is given, the per-step
    supremal residual norm is taken over those atoms, which is the constant
    entering the convergence-rate bound; otherwise the grid supremum is
    recorded.

    Returns the record; the final frame is attached as ``record.frame``.
    """
    if not 0.0 < rho <= 1.0:
        raise DomainError("rho must lie in (0, 1]")
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    g = _as_vector(f).copy()
    initial = float(np.linalg.norm(g)) ** 2
    require_nonzero(initial)
    frame = OrthoFrame(g.size)
    synth_vectors = None
    if synthesis is not None:
        synth_vectors = [dictionary.atom_vector(s) for s in synthesis]
    record = PogaRecord(initial_energy=initial, rho=rho)
    for _ in range(n_terms):
        energy = float(np.linalg.norm(g)) ** 2
        if energy <= threshold * initial:
            break
        outcome, _, sup_r_grid = _select(g, frame, dictionary, rho)
        if synth_vectors is not None:
            r_sup = max(frame.project_residual(v)[1] for v in synth_vectors)
        else:
            r_sup = sup_r_grid
        vec = dictionary.atom_vector(outcome.atom)
        basis_vec, _ = frame.extend(vec, spec=outcome.atom)
        coeff = complex(np.vdot(basis_vec, g))
        g = g - coeff * basis_vec
        record.steps.append(
            PogaStep(
                atom=outcome.atom,
                coeff=coeff,
                r=outcome.r,
                r_sup=float(r_sup),
                residual_energy=float(np.linalg.norm(g)) ** 2,
            )
        )
    record.frame = frame
    return record


def reconstruct_poga(record, dictionary):
    """Replay the frame from the recorded atoms and sum coeff_k B_k."""
    frame = OrthoFrame(dictionary.dim)
    out = np.zeros(dictionary.dim, dtype=complex)
    for step in record.steps:
        vec, _ = frame.extend(dictionary.atom_vector(step.atom), spec=step.atom)
        out += step.coeff * vec
    return out


@dataclass
class RateRow:
    m: int
    remainder_norm: float
    bound: float
    slack: float


@dataclass
class RateReport:
    rows: list[RateRow]
    recurrence_ok: bool
    conclusion_ok: bool

    @property
    def ok(self):
        return (
            self.recurrence_ok
            and self.conclusion_ok
            and all(row.slack >= 0.0 for row in self.rows)
        )


def rate_report(record, M, rho=None, tol=1e-9):
    """Check the decay of a run against the rate bound for bounded synthesis.

    For f representable with coefficient 1-norm at most M, the remainder
    after m - 1 steps obeys ||g_m|| <= R_m M / (rho sqrt(m)) with R_m the
    running max of the recorded supremal residual norms.  The same chain
    forces the squared remainders d_n to satisfy
    d_{n+1} <= d_n (1 - d_n / A_m), A_m = (R_m M / rho)^2, whose closed
    consequence is d_m <= A_m / m; both are verified on the recorded
    sequence.  Slack below -tol marks a violation (selector bug or a grid
    too coarse for the synthesis).
    """
    if rho is None:
        rho = record.rho
    d = [record.initial_energy] + record.residual_energies()
    r_max = record.r_max_values()
    rows = []
    recurrence_ok = True
    conclusion_ok = True
    for m in range(1, len(d) + 1):
        R_m = r_max[m - 1] if m <= len(r_max) else r_max[-1]
        bound = R_m * M / (rho * np.sqrt(m))
        g_norm = float(np.sqrt(d[m - 1]))
        rows.append(RateRow(m=m, remainder_norm=g_norm, bound=bound, slack=bound - g_norm))
        A_m = (R_m * M / rho) ** 2
        if d[m - 1] > A_m / m + tol:
            conclusion_ok = False
        for n in range(m - 1):
            if d[n + 1] > d[n] * (1.0 - d[n] / A_m) + tol:
                recurrence_ok = False
    return RateReport(rows=rows, recurrence_ok=recurrence_ok, conclusion_ok=conclusion_ok)
