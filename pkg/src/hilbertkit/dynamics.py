"""Proximal elements, word enumeration and finite approximations of proximal limit sets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import schur
from scipy.optimize import linprog
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff

from .bodies import ConvexBody, HullBody, simplex
from .config import TOL
from .errors import BudgetExceeded, EmptyLimitSet, NotHyperbolicType, NotPreserving
from .projective import AffineChart, ProjPoint, ProjTransform, canonical, canonical_rows

MAX_WORD_LENGTH = 16
DEFAULT_NODE_CAP = 200_000


# -- proximality -------------------------------------------------------------

@dataclass(frozen=True)
class ProximalityReport:
    is_proximal: bool
    top_modulus: float
    second_modulus: float
    gap: float
    attracting: Optional[ProjPoint] = None
    reason: str = ""


def _refine_eigenvector(M: np.ndarray, lam: float, v: np.ndarray, tol: float = 1e-12,
                        max_iter: int = 50) -> np.ndarray:
    """Shifted inverse power iteration around the simple eigenvalue ``lam``."""
    n = len(v)
    shift = lam * (1 + 1e-10) if lam != 0 else 1e-10
    S = M - shift * np.eye(n)
    v = canonical(v)
    for _ in range(max_iter):
        try:
            w = np.linalg.solve(S, v)
        except np.linalg.LinAlgError:
            break
        w = canonical(w)
        if np.linalg.norm(w - v) <= tol:
            v = w
            break
        v = w
    return v


def proximality(g: ProjTransform, gap_tol: float = TOL.proximal_gap) -> ProximalityReport:
    """Decide whether g has a real, simple, strictly dominant eigenvalue.

    Eigenvalues come from the real Schur form. The second modulus is taken over
    the remaining eigenvalues counted with multiplicity, so a repeated or complex
    top eigenvalue gives gap 1.
    """
    M = g.matrix
    T, _ = schur(M, output="real")
    ev = _schur_eigenvalues(T)
    mods = np.abs(ev)
    order = np.argsort(-mods, kind="stable")
    ev, mods = ev[order], mods[order]
    top, second = float(mods[0]), float(mods[1]) if len(mods) > 1 else 0.0
    gap = second / top if top > 0 else 1.0
    if abs(ev[0].imag) > TOL.equality * top:
        return ProximalityReport(False, top, second, gap, None, "complex top eigenvalue")
    if gap > 1 - gap_tol:
        return ProximalityReport(False, top, second, gap, None, "top eigenvalue not simple")
    lam = float(ev[0].real)
    _, _, Vt = np.linalg.svd(M - lam * np.eye(len(M)))
    v = _refine_eigenvector(M, lam, Vt[-1])
    return ProximalityReport(True, top, second, gap, ProjPoint(v), "")


def _schur_eigenvalues(T: np.ndarray) -> np.ndarray:
    n = len(T)
    out = []
    i = 0
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 0:
            blk = T[i:i + 2, i:i + 2]
            tr, det = np.trace(blk), np.linalg.det(blk)
            disc = complex(tr * tr / 4 - det) ** 0.5
            out += [tr / 2 + disc, tr / 2 - disc]
            i += 2
        else:
            out.append(complex(T[i, i]))
            i += 1
    return np.array(out)


def fixed_point_residual(g: ProjTransform, p: ProjPoint) -> float:
    return float(np.linalg.norm(canonical(g.matrix @ p.coords) - p.coords))


# -- words -------------------------------------------------------------------

def _letters(n: int) -> list:
    if n > 26:
        raise ValueError("at most 26 generators")
    return [chr(ord("a") + i) for i in range(n)]


def enumerate_words(generators: Sequence[ProjTransform], L: int,
                    involutions: Sequence[bool] | None = None,
                    node_cap: int = DEFAULT_NODE_CAP) -> list:
    """Distinct group elements given by reduced words of length <= L, in BFS order.

    Words never contain a letter next to its inverse; a generator flagged as an
    involution is its own inverse, so it is never repeated. Elements whose
    normalized matrices agree to 1e-9 are kept once (shortest word wins).
    """
    if L > MAX_WORD_LENGTH:
        raise BudgetExceeded(f"word length {L} exceeds the cap {MAX_WORD_LENGTH}")
    if L < 0:
        raise ValueError("L must be nonnegative")
    n = len(generators)
    inv = list(involutions) if involutions is not None else [False] * n
    names = _letters(n)
    alphabet = []  # (letter, inverse letter, transform)
    for name, g, is_inv in zip(names, generators, inv):
        alphabet.append((name, name if is_inv else name.upper(), ProjTransform(g.matrix, name)))
        if not is_inv:
            alphabet.append((name.upper(), name, ProjTransform(np.linalg.inv(g.matrix), name.upper())))
    size = generators[0].size if n else 0
    identity = ProjTransform.identity(size) if n else None
    if identity is None:
        return []
    seen: dict = {}

    def admit(t: ProjTransform) -> bool:
        bucket = seen.setdefault(t.key(), [])
        if any(t.same_as(s) for s in bucket):
            return False
        bucket.append(t)
        return True

    admit(identity)
    out = [identity]
    layer = [identity]
    for _ in range(L):
        nxt = []
        for w in layer:
            last = w.label[-1] if w.label else None
            for letter, inverse, g in alphabet:
                if last is not None and last == inverse:
                    continue
                t = w @ g
                if admit(t):
                    nxt.append(t)
                    if len(out) + len(nxt) > node_cap:
                        raise BudgetExceeded(f"more than {node_cap} distinct words")
        out.extend(nxt)
        layer = nxt
        if not layer:
            break
    return out


def word_length(t: ProjTransform) -> int:
    return len(t.label)


# -- invariance --------------------------------------------------------------

def preservation_defect(body: ConvexBody, g: ProjTransform, n: int = 256) -> float:
    """max |margin| of g-images of boundary samples, plus a penalty if the base leaves the body."""
    S = body.boundary_samples(n)
    X = body.chart.from_chart(S) @ g.matrix.T
    lx = X @ body.chart.covector
    if not (np.all(lx > 0) or np.all(lx < 0)):
        return math.inf
    img = body.chart.to_chart(X)
    defect = float(np.max(np.abs(body.margin(img))))
    base = body.chart.to_chart(g.matrix @ body.chart.from_chart(body.base))
    if body.margin(base) <= 0:
        return math.inf
    return defect


def check_preserves(body: ConvexBody, generators: Sequence[ProjTransform],
                    tol: float = TOL.preserve, n: int = 256) -> float:
    worst = max((preservation_defect(body, g, n) for g in generators), default=0.0)
    if not worst <= tol:
        raise NotPreserving(f"generators move the boundary by up to {worst:.3e} (tolerance {tol:.1e})")
    return worst


# -- limit sets --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LimitSetApprox:
    """Boundary points tagged with the first level at which they appear.

    ``homogeneous`` holds canonical representatives with positive chart
    covector value, ``points`` the matching chart coordinates.
    """

    points: np.ndarray
    homogeneous: np.ndarray
    lengths: np.ndarray
    max_length: int
    group_id: str = ""
    min_proximal_length: Optional[int] = None

    def __len__(self):
        return len(self.points)

    @property
    def is_empty(self) -> bool:
        return len(self.points) == 0

    def truncate(self, L: int) -> "LimitSetApprox":
        keep = self.lengths <= L
        return LimitSetApprox(self.points[keep], self.homogeneous[keep], self.lengths[keep],
                              min(L, self.max_length), self.group_id, self.min_proximal_length)

    def proj_points(self) -> list:
        return [ProjPoint(h) for h in self.homogeneous]

    def csv_rows(self) -> list:
        return [[*map(float, p), int(k)] for p, k in zip(self.points, self.lengths)]


def _dedup_points(H: np.ndarray, tags: np.ndarray, tol: float = TOL.equality):
    """Merge canonical rows that agree to ``tol``, keeping the smallest tag.

    Exact duplicates on the rounding grid are collapsed first; a k-d tree pass
    then merges the few neighbours split across grid cells.
    """
    if len(H) == 0:
        return H, tags
    order = np.lexsort((np.arange(len(H)), tags))
    H, tags = H[order], tags[order]
    _, first = np.unique(np.round(H / tol).astype(np.int64), axis=0, return_index=True)
    first = np.sort(first)
    H, tags = H[first], tags[first]
    keep = np.ones(len(H), bool)
    for i, j in sorted(cKDTree(H).query_pairs(2 * tol)):
        if keep[i] and keep[j] and np.max(np.abs(H[i] - H[j])) <= tol:
            keep[j] = False
    return H[keep], tags[keep]


def limit_set_approx(body: ConvexBody, generators: Sequence[ProjTransform], L: int,
                     involutions: Sequence[bool] | None = None, preserve_tol: float = TOL.preserve,
                     boundary_tol: float = TOL.membership, group_id: str = "",
                     node_cap: int = DEFAULT_NODE_CAP) -> LimitSetApprox:
    """Finite approximation of the proximal limit set at level L.

    Let l0 be the shortest length of a proximal word (searched up to the word
    length cap) and P_L the attracting points of proximal words of length
    <= max(L, l0). The level-L set is {w.p : |w| <= L, p in P_L}: it contains every
    attracting point of a proximal word of length <= L (all are attracting points
    of conjugates), is never empty when the group has a proximal element, and
    satisfies g.Lambda_L within Lambda_{L+1} for every generator g.
    Each point is tagged with the smallest level containing it.
    """
    if preserve_tol is not None:
        check_preserves(body, generators, preserve_tol)
    empty = LimitSetApprox(np.zeros((0, body.dim)), np.zeros((0, body.dim + 1)),
                           np.zeros(0, int), L, group_id, None)
    if not generators:
        return empty
    words = enumerate_words(generators, max(L, 1), involutions, node_cap)
    prox = [(t, proximality(t)) for t in words]
    l0 = min((word_length(t) for t, r in prox if r.is_proximal), default=None)
    top = L
    while l0 is None and top < MAX_WORD_LENGTH:
        top = min(MAX_WORD_LENGTH, max(2 * top, top + 1))
        words = enumerate_words(generators, top, involutions, node_cap)
        if len(words) == len(prox):
            break  # finite group exhausted
        prox = [(t, proximality(t)) for t in words]
        l0 = min((word_length(t) for t, r in prox if r.is_proximal), default=None)
    if l0 is None:
        return empty
    if l0 > max(L, 1):
        words = enumerate_words(generators, l0, involutions, node_cap)
        prox = [(t, proximality(t)) for t in words]
    # attracting points with their level: free below l0, else the word length
    P, ptag = [], []
    for t, r in prox:
        k = word_length(t)
        if r.is_proximal and k <= max(L, l0):
            P.append(r.attracting.coords)
            ptag.append(0 if k <= l0 else k)
    P = np.array(P)
    ptag = np.array(ptag)
    ball = [t for t in words if word_length(t) <= L]
    W = np.array([t.matrix for t in ball])
    wlen = np.array([word_length(t) for t in ball])
    H = np.einsum("wij,pj->wpi", W, P).reshape(-1, P.shape[1])
    tags = np.maximum(wlen[:, None], ptag[None, :]).ravel()
    H = canonical_rows(H)
    H, tags = _dedup_points(H, tags)
    # orient lifts into the chart and keep boundary points
    cov = body.chart.covector
    lx = H @ cov
    H = H * np.sign(lx)[:, None]
    ok = np.abs(lx) > 1e-12 * np.linalg.norm(H, axis=1)
    H, tags = H[ok], tags[ok]
    S = body.chart.to_chart(H)
    scale = np.maximum(1.0, np.linalg.norm(S, axis=1))
    on_bd = np.abs(body.margin(S)) <= boundary_tol * scale
    order = np.lexsort((S[on_bd][:, 1] if body.dim > 1 else np.zeros(on_bd.sum()),
                        S[on_bd][:, 0], tags[on_bd]))
    return LimitSetApprox(S[on_bd][order], H[on_bd][order], tags[on_bd][order].astype(int), L,
                          group_id, l0)


def coverage_gap(limit: LimitSetApprox, boundary_samples) -> float:
    """max over samples of the chart distance to the nearest limit point."""
    if limit.is_empty:
        raise EmptyLimitSet("limit set approximation is empty")
    d, _ = cKDTree(limit.points).query(np.atleast_2d(boundary_samples))
    return float(np.max(d))


def hausdorff(A, B) -> float:
    A, B = np.atleast_2d(A), np.atleast_2d(B)
    return float(max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0]))


# -- example groups ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupExample:
    name: str
    generators: list
    involutions: list
    body: ConvexBody
    params: dict = field(default_factory=dict)
    preserve_tol: float = TOL.preserve

    def limit_set(self, L: int, **kw) -> LimitSetApprox:
        kw.setdefault("preserve_tol", self.preserve_tol)
        return limit_set_approx(self.body, self.generators, L, self.involutions,
                                group_id=self.name, **kw)

    def to_dict(self) -> dict:
        return {"schema": "hilbert-kit/1", "name": self.name,
                "generators": [g.matrix.tolist() for g in self.generators],
                "involutions": list(self.involutions), "params": self.params,
                "relations_hint": self.params.get("relations_hint", "")}


def _coxeter_cos(m) -> float:
    return 1.0 if math.isinf(m) else math.cos(math.pi / m)


def triangle_cartan(m12, m13, m23, t: float = 1.0) -> np.ndarray:
    c12, c13, c23 = (2 * _coxeter_cos(m) for m in (m12, m13, m23))
    return np.array([[2.0, -t * c12, -c13],
                     [-c12 / t, 2.0, -c23],
                     [-c13, -c23, 2.0]])


def triangle_reflections(A: np.ndarray) -> list:
    """sigma_i = I - v_i alpha_i^T with alpha_i the i-th coordinate form and v_i = A[:, i]."""
    n = len(A)
    return [ProjTransform(np.eye(n) - np.outer(A[:, i], np.eye(n)[i]), chr(ord("a") + i))
            for i in range(n)]


def _positive_covector(U: np.ndarray) -> np.ndarray:
    """Covector l with |l|_inf <= 1 maximizing min_i l.u_i (rows of U normalized)."""
    n = U.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.column_stack([-U, np.ones(len(U))]), b_ub=np.zeros(len(U)),
                  bounds=[(-1, 1)] * n + [(None, 1)], method="highs")
    if res.status != 0 or res.x[-1] <= 1e-9:
        raise NotHyperbolicType("orbit does not lie in a properly convex cone")
    ell = res.x[:n]
    return ell / np.linalg.norm(ell)


def build_triangle_reflection_group(m12=3, m13=3, m23=4, t: float = 1.0, L0: int = 10,
                                    preserve_tol: float | None = None) -> GroupExample:
    """Triangle reflection group in its Tits-Vinberg representation deformed by t.

    The body is the interior of the hull of the level-L0 limit set approximation,
    so every approximated limit point lies on its boundary. The chart covector is
    chosen by linear programming to be as positive as possible on the orbit of the
    chamber point (1, 1, 1) and on the attracting points.
    """
    ms = (m12, m13, m23)
    if any(m < 2 for m in ms):
        raise ValueError("Coxeter exponents must be >= 2")
    if sum(0.0 if math.isinf(m) else 1.0 / m for m in ms) >= 1 - 1e-12:
        raise NotHyperbolicType("need 1/m12 + 1/m13 + 1/m23 < 1")
    if t <= 0:
        raise ValueError("deformation parameter must be positive")
    A = triangle_cartan(m12, m13, m23, t)
    gens = triangle_reflections(A)
    inv = [True, True, True]
    words = enumerate_words(gens, L0, inv)
    x0 = np.ones(3)
    orbit = canonical_rows(np.array([w.matrix @ x0 for w in words]))
    orbit = orbit * np.sign(orbit @ x0)[:, None]  # the cone nappe containing x0
    ell = _positive_covector(orbit)
    attr = []
    for w in words:
        r = proximality(w)
        if r.is_proximal:
            attr.append(r.attracting.coords)
    attr = np.array(attr)
    attr = attr * np.sign(attr @ ell)[:, None]
    ell = _positive_covector(np.vstack([orbit, attr]))
    chart = AffineChart(ell)
    name = f"triangle({m12},{m13},{m23};t={t:g})"
    # the hull of the level-L0 set is only an inner approximation, so invariance holds
    # up to the distance between successive levels; measure it with a provisional body
    provisional = HullBody(chart=chart, points=chart.to_chart(attr))
    lam = limit_set_approx(provisional, gens, L0, inv, preserve_tol=None, boundary_tol=math.inf,
                           group_id=name)
    body = HullBody(chart=chart, points=lam.points)
    defect = max(preservation_defect(body, g) for g in gens)
    tol = preserve_tol if preserve_tol is not None else max(TOL.preserve, 2 * defect)
    params = {"m": [m12, m13, m23], "t": t, "L0": L0, "measured_defect": defect,
              "relations_hint": f"a^2=b^2=c^2=(ab)^{m12}=(ac)^{m13}=(bc)^{m23}=1"}
    return GroupExample(name, gens, inv, body, params, tol)


def build_simplex_diagonal_group() -> GroupExample:
    """Rank-two lattice of positive diagonal matrices acting on the open 2-simplex."""
    gens = [ProjTransform(np.diag([4.0, 2.0, 1.0]), "a"), ProjTransform(np.diag([1.0, 4.0, 2.0]), "b")]
    return GroupExample("simplex-diagonal", gens, [False, False], simplex(2),
                        {"relations_hint": "ab=ba"}, TOL.preserve)


def orbit_chart_extent(example: GroupExample, L: int = 10) -> float:
    """Max chart norm over the orbit of the base point under words of length <= L."""
    body = example.body
    words = enumerate_words(example.generators, L, example.involutions)
    X0 = body.chart.from_chart(body.base)
    X = np.array([w.matrix @ X0 for w in words])
    return float(np.max(np.linalg.norm(body.chart.to_chart(X), axis=1)))
