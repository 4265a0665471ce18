"""Upper-bound evaluators for numerical radii of off-diagonal and full
2x2 operator matrices.

Each evaluator returns a :class:`BoundOutcome` holding the right-hand-side
value, the exponent e of its contract (radius**e <= value), the named
intermediate norms, and the parameters used. The evaluators never compare
against a radius themselves; validity checking lives in the harness.

The two-exponent (Holder) bound carries a documented constant discrepancy:
its printed prefactor 4**(r-2) is falsified by the scalar case X = Y = [1]
(value 0.5 against a radius power of 1), while the prefactor 4**(r-1)
supported by the derivation chain and by its own Y = X, p = q = 2 special
case holds up. `constant_mode` selects between them and defaults to the
proved constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ensembles import RngStream, derive
from .errors import (
    DimensionMismatchError,
    InvalidFunctionError,
    NotContractionError,
    NotNormalError,
    OutOfRangeError,
)
from .funcpair import FunctionPair, HolderPair, pow_of_pair, validate_pair
from .linalg import (
    Block2x2,
    OffDiagPair,
    adjoint,
    as_matrix,
    fn_of_abs,
    fn_of_psd,
    gram_eigen,
    recompose,
    spectral_norm,
)
from .radius import omega

BOUND_IDS = (
    "main1.v1",
    "main1.v2",
    "product_xy",
    "sum_norm",
    "sum_norm.normal",
    "main11.v1",
    "main11.v2",
    "main11.young.v1",
    "main11.young.v2",
    "main3.v1",
    "main3.v2",
    "main4.v1",
    "main4.v2",
    "th1",
)

# Normality check: ||M*M - MM*|| <= NORMALITY_TOL * ||M||^2.
NORMALITY_TOL = 1e-9
# Contractions may exceed norm 1 by at most this absolute slack.
CONTRACTION_SLACK = 1e-10


@dataclass
class BoundOutcome:
    """Evaluated right-hand side with its contract exponent and metadata."""

    bound_id: str
    value: float
    exponent: float
    terms: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0.0:
            raise OutOfRangeError(f"bound value must be finite and >= 0, got {self.value}")
        for name, term in self.terms.items():
            if not math.isfinite(term) or term < 0.0:
                raise OutOfRangeError(f"term {name} must be finite and >= 0, got {term}")


@dataclass
class ZetaEstimate:
    """Upper estimate of the infimum of the split-vector gap functional.

    The true infimum is >= 0 always (guaranteed_lower); the estimate comes
    from multi-start descent, so it may sit above the infimum.
    """

    value: float
    witness: tuple[np.ndarray, np.ndarray]
    guaranteed_lower: float = 0.0


def _require_r(r: float, name: str = "r") -> float:
    r = float(r)
    if not math.isfinite(r) or r < 1.0:
        raise OutOfRangeError(f"{name} must be >= 1, got {r}")
    return r


def _require_variant(variant: int) -> int:
    if variant not in (1, 2):
        raise OutOfRangeError(f"variant must be 1 or 2, got {variant}")
    return variant


def _as_pair(p) -> OffDiagPair:
    return p if isinstance(p, OffDiagPair) else OffDiagPair(*p)


def _check_pair_on_spectra(pair: FunctionPair, spectra: Sequence[np.ndarray]) -> None:
    samples = np.unique(np.concatenate([np.clip(s, 0.0, None) for s in spectra]
                                       + [np.array([0.0, 1.0])]))
    report = validate_pair(pair, samples)
    if not report.passed:
        raise InvalidFunctionError(
            f"pair {pair.tag!r} failed validation: max deviation "
            f"{report.max_deviation:.3e} at t={report.worst_sample:g}, "
            f"min f={report.min_f:.3e}, min g={report.min_g:.3e}"
        )


def _offdiag_groups(pair: FunctionPair, r: float, variant: int,
                    x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The two PSD sums feeding every off-diagonal bound.

    Variant 1 mixes f and g inside each group; variant 2 keeps f with the
    first group and g with the second.
    """
    sx, vx = gram_eigen(x)           # |X|
    sys_, vys = gram_eigen(adjoint(y))  # |Y*|
    sy, vy = gram_eigen(y)           # |Y|
    sxs, vxs = gram_eigen(adjoint(x))   # |X*|
    _check_pair_on_spectra(pair, [sx, sys_, sy, sxs])
    fe, ge = pow_of_pair(pair, 2.0 * r)

    def apply(fn, s, v):
        out = np.asarray(fn(s), dtype=np.float64)
        if not np.isfinite(out).all() or (out < 0).any():
            raise InvalidFunctionError("pair functions must stay finite and >= 0")
        return recompose(out, v)

    if variant == 1:
        first = apply(fe, sx, vx) + apply(ge, sys_, vys)
        second = apply(fe, sy, vy) + apply(ge, sxs, vxs)
    else:
        first = apply(fe, sx, vx) + apply(fe, sys_, vys)
        second = apply(ge, sy, vy) + apply(ge, sxs, vxs)
    return first, second


def refined_young(a: float, b: float, m: int) -> tuple[float, float]:
    """Refined scalar Young inequality at equal exponents.

    Returns (lhs, rhs) with
    lhs = (sqrt(ab))**m + (1/2)**m (a**(m/2) - b**(m/2))**2 and
    rhs = 2**(-m) (a + b)**m; lhs <= rhs holds for a, b >= 0 and integer
    m >= 1, with equality at m = 2.
    """
    a, b = float(a), float(b)
    m = int(m)
    if a < 0.0 or b < 0.0:
        raise OutOfRangeError("a and b must be >= 0")
    if m < 1:
        raise OutOfRangeError(f"m must be a positive integer, got {m}")
    lhs = math.sqrt(a * b) ** m + 0.5 ** m * (a ** (m / 2.0) - b ** (m / 2.0)) ** 2
    rhs = 2.0 ** (-m) * (a + b) ** m
    return lhs, rhs


def bound_main1(p: OffDiagPair, pair: FunctionPair, r: float,
                variant: int = 1) -> BoundOutcome:
    """Two-norm product bound for the off-diagonal matrix [[0, X], [Y, 0]].

    value = 2**(r-2) ||group1||^(1/2) ||group2||^(1/2) with the groups of
    f**(2r), g**(2r) applied to |X|, |Y*|, |Y|, |X*|; contract
    omega(T)**r <= value.
    """
    p = _as_pair(p)
    r = _require_r(r)
    variant = _require_variant(variant)
    first, second = _offdiag_groups(pair, r, variant, p.x, p.y)
    n1 = spectral_norm(first)
    n2 = spectral_norm(second)
    value = 2.0 ** (r - 2.0) * math.sqrt(n1) * math.sqrt(n2)
    return BoundOutcome(
        bound_id=f"main1.v{variant}",
        value=value,
        exponent=r,
        terms={"norm_first": n1, "norm_second": n2},
        params={"r": r, "variant": variant, "pair": pair.tag},
    )


def bound_product_xy(x, y, alpha: float, r: float, variant: int = 1) -> BoundOutcome:
    """Bound on omega(XY)**(r/2) via the off-diagonal power-pair bound.

    The right-hand side equals bound_main1 on the pair (X, Y) with
    f(t) = t**alpha; only the contract exponent changes to r/2.
    """
    from .funcpair import power_pair

    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape[0] != x.shape[1] or x.shape != y.shape:
        raise DimensionMismatchError(
            f"product bound needs two square matrices of one side, "
            f"got {x.shape} and {y.shape}"
        )
    base = bound_main1(OffDiagPair(x, y), power_pair(alpha), r, variant)
    return BoundOutcome(
        bound_id="product_xy",
        value=base.value,
        exponent=r / 2.0,
        terms=base.terms,
        params={"r": r, "alpha": float(alpha), "variant": variant},
    )


def is_normal(m, tol: float = NORMALITY_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    nrm = spectral_norm(m)
    comm = adjoint(m) @ m - m @ adjoint(m)
    return spectral_norm(comm) <= tol * max(nrm * nrm, 1e-300)


def bound_sum_norm(x, y, r: float, sign: str = "+",
                   normal_mode: bool = False) -> BoundOutcome:
    """Norm bound ||X +/- Y*||**r <= 2**(2r-2) ||...||^(1/2) ||...||^(1/2).

    With normal_mode (X, Y square and normal) the contract tightens to
    ||X +/- Y||**r <= 2**(2r-2) || |X|**r + |Y|**r ||. The value does not
    depend on the sign; the sign is recorded for the contract side only.
    """
    x = as_matrix(x)
    y = as_matrix(y)
    r = _require_r(r)
    if sign not in ("+", "-"):
        raise OutOfRangeError(f"sign must be '+' or '-', got {sign!r}")
    if x.shape != y.shape[::-1]:
        raise DimensionMismatchError(
            f"need X m-by-n and Y n-by-m, got {x.shape} and {y.shape}"
        )

    def pow_abs(m):
        return fn_of_abs(m, lambda t: np.asarray(t) ** r)

    if normal_mode:
        if x.shape[0] != x.shape[1]:
            raise NotNormalError("normal mode requires square matrices")
        if not (is_normal(x) and is_normal(y)):
            raise NotNormalError("normal mode requires normal operators")
        n1 = spectral_norm(pow_abs(x) + pow_abs(y))
        value = 2.0 ** (2.0 * r - 2.0) * n1
        terms = {"norm_sum": n1}
        bound_id = "sum_norm.normal"
    else:
        n1 = spectral_norm(pow_abs(x) + pow_abs(adjoint(y)))
        n2 = spectral_norm(pow_abs(y) + pow_abs(adjoint(x)))
        value = 2.0 ** (2.0 * r - 2.0) * math.sqrt(n1) * math.sqrt(n2)
        terms = {"norm_first": n1, "norm_second": n2}
        bound_id = "sum_norm"
    return BoundOutcome(
        bound_id=bound_id,
        value=value,
        exponent=r,
        terms=terms,
        params={"r": r, "sign": sign, "normal_mode": normal_mode},
    )


def bound_main11(p: OffDiagPair, pair: FunctionPair, r: float, hp: HolderPair,
                 variant: int = 1, constant_mode: str = "as_proved") -> BoundOutcome:
    """Holder-exponent bound with contract omega(T)**(2r) <= value.

    value = C (alpha_sq + beta_sq) with alpha_sq = ||group1**p|| / p**2 and
    beta_sq = ||group2**q|| / q**2. The printed constant C = 4**(r-2)
    ('as_stated') fails on scalars; the derivation supports C = 4**(r-1)
    ('as_proved', default).
    """
    p_ = _as_pair(p)
    r = _require_r(r)
    variant = _require_variant(variant)
    if constant_mode not in ("as_stated", "as_proved"):
        raise OutOfRangeError(f"constant_mode must be as_stated or as_proved, "
                              f"got {constant_mode!r}")
    first, second = _offdiag_groups(pair, r, variant, p_.x, p_.y)
    pw, qw = hp.p, hp.q
    alpha_sq = spectral_norm(fn_of_psd(first, lambda t: np.asarray(t) ** pw)) / pw ** 2
    beta_sq = spectral_norm(fn_of_psd(second, lambda t: np.asarray(t) ** qw)) / qw ** 2
    const = 4.0 ** (r - 2.0) if constant_mode == "as_stated" else 4.0 ** (r - 1.0)
    value = const * (alpha_sq + beta_sq)
    return BoundOutcome(
        bound_id=f"main11.v{variant}",
        value=value,
        exponent=2.0 * r,
        terms={"alpha_sq": alpha_sq, "beta_sq": beta_sq, "constant": const},
        params={"r": r, "variant": variant, "p": pw, "q": qw,
                "constant_mode": constant_mode, "pair": pair.tag},
    )


def bound_main11_young(p: OffDiagPair, pair: FunctionPair, r: float,
                       hp: HolderPair, variant: int = 1) -> BoundOutcome:
    """Young-split variant: value = 2**(r-2) (||g1||^(p/2)/p + ||g2||^(q/2)/q),
    contract omega(T)**r <= value."""
    p_ = _as_pair(p)
    r = _require_r(r)
    variant = _require_variant(variant)
    first, second = _offdiag_groups(pair, r, variant, p_.x, p_.y)
    n1 = spectral_norm(first)
    n2 = spectral_norm(second)
    pw, qw = hp.p, hp.q
    value = 2.0 ** (r - 2.0) * (n1 ** (pw / 2.0) / pw + n2 ** (qw / 2.0) / qw)
    return BoundOutcome(
        bound_id=f"main11.young.v{variant}",
        value=value,
        exponent=r,
        terms={"norm_first": n1, "norm_second": n2},
        params={"r": r, "variant": variant, "p": pw, "q": qw, "pair": pair.tag},
    )


def _zeta_parts(a_mat: np.ndarray, b_mat: np.ndarray,
                x1: np.ndarray, x2: np.ndarray) -> tuple[float, float]:
    a = max(float(np.real(np.vdot(x2, a_mat @ x2))), 0.0)
    b = max(float(np.real(np.vdot(x1, b_mat @ x1))), 0.0)
    return a, b


def zeta_value(a_mat, b_mat, x1, x2) -> float:
    """(sqrt(<A x2, x2>) - sqrt(<B x1, x1>))**2 for PSD A, B."""
    a, b = _zeta_parts(np.asarray(a_mat), np.asarray(b_mat),
                       np.asarray(x1), np.asarray(x2))
    return (math.sqrt(a) - math.sqrt(b)) ** 2


def _estimate_zeta(a_mat: np.ndarray, b_mat: np.ndarray, restarts: int,
                   stream: RngStream, max_iter: int = 150) -> ZetaEstimate:
    """Multi-start projected descent of the gap functional on the joint sphere.

    The backtracking line search refines its accepted step by parabolic
    interpolation; descent can still park at a stationary split (for
    instance when one component collapses to zero), which is why the
    estimate only upper-bounds the infimum.
    """
    m = b_mat.shape[0]
    n = a_mat.shape[0]

    def value_at(w):
        return zeta_value(a_mat, b_mat, w[:m], w[m:])

    best_val = math.inf
    best_w = None
    for k in range(restarts):
        g = derive(stream, k).generator()
        w = g.standard_normal(m + n) + 1j * g.standard_normal(m + n)
        w /= np.linalg.norm(w)
        val = value_at(w)
        step = 0.5
        for _ in range(max_iter):
            x1, x2 = w[:m], w[m:]
            a, b = _zeta_parts(a_mat, b_mat, x1, x2)
            s = math.sqrt(a) - math.sqrt(b)
            if s * s <= 1e-28:
                break
            g1 = (-2.0 * s / math.sqrt(b)) * (b_mat @ x1) if b > 1e-300 else \
                np.zeros(m, dtype=np.complex128)
            g2 = (2.0 * s / math.sqrt(a)) * (a_mat @ x2) if a > 1e-300 else \
                np.zeros(n, dtype=np.complex128)
            grad = np.concatenate([g1, g2])
            gt = grad - np.real(np.vdot(w, grad)) * w
            gn = float(np.linalg.norm(gt))
            if gn <= 1e-15:
                break
            trail = []
            accepted = None
            sigma = step
            while sigma >= 1e-18:
                cand = w - sigma * gt
                cand /= np.linalg.norm(cand)
                cv = value_at(cand)
                trail.append((sigma, cv))
                if cv <= val - 1e-4 * sigma * gn * gn:
                    accepted = (sigma, cand, cv)
                    break
                sigma *= 0.5
            if accepted is None:
                break
            sigma, cand, cv = accepted
            if len(trail) > 1:
                v_reject = trail[-2][1]
                denom = v_reject - 2.0 * cv + val
                if denom > 0.0:
                    vertex = sigma * 0.5 * (v_reject - 4.0 * cv + 3.0 * val) / denom
                    if 0.0 < vertex < 2.0 * sigma:
                        cand3 = w - vertex * gt
                        cand3 /= np.linalg.norm(cand3)
                        cv3 = value_at(cand3)
                        if cv3 < cv:
                            sigma, cand, cv = vertex, cand3, cv3
            w, val = cand, cv
            step = min(max(sigma * 2.0, 1e-12), 1e3)
        if val < best_val:
            best_val, best_w = val, w
    x1, x2 = best_w[:m], best_w[m:]
    return ZetaEstimate(
        value=zeta_value(a_mat, b_mat, x1, x2),
        witness=(x1, x2),
        guaranteed_lower=0.0,
    )


def bound_main3(p: OffDiagPair, pair: FunctionPair, r: float, variant: int = 1,
                zeta_restarts: int = 8, stream: RngStream | None = None,
                ) -> tuple[BoundOutcome, BoundOutcome, ZetaEstimate]:
    """Norm-sum bound with a subtracted gap term.

    guaranteed uses the trivial lower bound inf zeta >= 0, so
    omega(T)**r <= guaranteed.value is safe. refined subtracts the
    descent estimate of the infimum; since that estimate only upper-bounds
    the infimum, refined is heuristic and may undercut the true bound.
    """
    p_ = _as_pair(p)
    r = _require_r(r)
    variant = _require_variant(variant)
    if stream is None:
        stream = RngStream(master_seed=0)
    first, second = _offdiag_groups(pair, r, variant, p_.x, p_.y)
    n1 = spectral_norm(first)
    n2 = spectral_norm(second)
    base = 2.0 ** (r - 2.0) * (n1 + n2)
    zeta = _estimate_zeta(first, second, zeta_restarts, stream)
    bound_id = f"main3.v{variant}"
    shared_terms = {"norm_first": n1, "norm_second": n2}
    guaranteed = BoundOutcome(
        bound_id=bound_id,
        value=base,
        exponent=r,
        terms=dict(shared_terms, zeta_lower=0.0),
        params={"r": r, "variant": variant, "pair": pair.tag, "mode": "guaranteed"},
    )
    refined = BoundOutcome(
        bound_id=bound_id,
        value=max(base - 2.0 ** (r - 2.0) * zeta.value, 0.0),
        exponent=r,
        terms=dict(shared_terms, zeta_estimate=zeta.value),
        params={"r": r, "variant": variant, "pair": pair.tag,
                "mode": "refined_heuristic"},
    )
    return guaranteed, refined, zeta


def _as_contraction_item(item) -> tuple[np.ndarray, ...]:
    a, b, c, d, x, y = (as_matrix(t) for t in item)
    m, n = x.shape
    ok = (a.shape == (m, m) and c.shape == (m, m)
          and b.shape == (n, n) and d.shape == (n, n) and y.shape == (n, m))
    if not ok:
        raise DimensionMismatchError(
            "item needs A, C m-by-m; B, D n-by-n; X m-by-n; Y n-by-m"
        )
    for name, t in zip("ABCD", (a, b, c, d)):
        if spectral_norm(t) > 1.0 + CONTRACTION_SLACK:
            raise NotContractionError(f"{name} has spectral norm > 1")
    return a, b, c, d, x, y


def main4_operands(items) -> list[np.ndarray]:
    """The compressed off-diagonal products [[0, A*XD], [B*YC, 0]] whose
    generalized radius the contraction bound controls."""
    from .linalg import embed_offdiag

    out = []
    for item in items:
        a, b, c, d, x, y = _as_contraction_item(item)
        out.append(embed_offdiag(adjoint(a) @ x @ d, adjoint(b) @ y @ c))
    return out


def bound_main4(items, pair: FunctionPair, p: float, variant: int = 1) -> BoundOutcome:
    """Contraction-compressed bound on omega_p**p of the products.

    value = 2**(p-2) * sum_i ||D* f^{2p}(|X|) D + B* g^{2p}(|Y*|) B||^(1/2)
    * ||C* f^{2p}(|Y|) C + A* g^{2p}(|X*|) A||^(1/2) (variant 2 groups f
    with f and g with g).
    """
    p = _require_r(p, "p")
    variant = _require_variant(variant)
    norm_items = [_as_contraction_item(item) for item in items]
    if not norm_items:
        raise OutOfRangeError("at least one item is required")
    fe, ge = pow_of_pair(pair, 2.0 * p)

    def apply(fn, mat):
        s, v = gram_eigen(mat)
        out = np.asarray(fn(s), dtype=np.float64)
        if not np.isfinite(out).all() or (out < 0).any():
            raise InvalidFunctionError("pair functions must stay finite and >= 0")
        return recompose(out, v)

    total = 0.0
    per_item = []
    for a, b, c, d, x, y in norm_items:
        spectra = [gram_eigen(x)[0], gram_eigen(adjoint(y))[0],
                   gram_eigen(y)[0], gram_eigen(adjoint(x))[0]]
        _check_pair_on_spectra(pair, spectra)
        if variant == 1:
            g1 = adjoint(d) @ apply(fe, x) @ d + adjoint(b) @ apply(ge, adjoint(y)) @ b
            g2 = adjoint(c) @ apply(fe, y) @ c + adjoint(a) @ apply(ge, adjoint(x)) @ a
        else:
            g1 = adjoint(d) @ apply(fe, x) @ d + adjoint(b) @ apply(fe, adjoint(y)) @ b
            g2 = adjoint(c) @ apply(ge, y) @ c + adjoint(a) @ apply(ge, adjoint(x)) @ a
        term = math.sqrt(spectral_norm(g1)) * math.sqrt(spectral_norm(g2))
        per_item.append(term)
        total += term
    value = 2.0 ** (p - 2.0) * total
    return BoundOutcome(
        bound_id=f"main4.v{variant}",
        value=value,
        exponent=p,
        terms={f"item_{i}": t for i, t in enumerate(per_item)},
        params={"p": p, "variant": variant, "n_operators": len(per_item),
                "pair": pair.tag},
    )


def bound_th1(blocks, p: float, omega_tol: float = 1e-8) -> BoundOutcome:
    """Full-block bound on omega_p**p of [[A_i, B_i], [C_i, D_i]].

    value = 2**(-p) sum_i (w(A_i) + w(D_i)
    + sqrt((w(A_i) - w(D_i))**2 + (||B_i|| + ||C_i||)**2))**p, with the
    certified radii taken at their upper endpoints (the conservative side
    for an upper bound).
    """
    p = _require_r(p, "p")
    blocks = [blk if isinstance(blk, Block2x2) else Block2x2(*blk) for blk in blocks]
    if not blocks:
        raise OutOfRangeError("at least one block is required")
    total = 0.0
    per_item = []
    for blk in blocks:
        wa = omega(blk.a, omega_tol).hi
        wd = omega(blk.d, omega_tol).hi
        nb = spectral_norm(blk.b)
        nc = spectral_norm(blk.c)
        term = (wa + wd + math.sqrt((wa - wd) ** 2 + (nb + nc) ** 2)) ** p
        per_item.append(term)
        total += term
    value = 2.0 ** (-p) * total
    return BoundOutcome(
        bound_id="th1",
        value=value,
        exponent=p,
        terms={f"item_{i}": t for i, t in enumerate(per_item)},
        params={"p": p, "n_operators": len(per_item), "omega_tol": omega_tol},
    )
