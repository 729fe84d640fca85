"""Infinitesimal-symmetry analysis: the obstruction system for ln f, its
integrability residuals, line-integral reconstruction of ln f, and assembly
and verification of the symmetry field V."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import DEFAULT_ORDER, FieldProgram, MetricField, OneForm
from .frame import (AdaptedFrame, JetVector, StructureFunctions, jvec_add,
                    jvec_scale, lie_bracket)
from .invariants import directional_derivative, invariant_K, invariant_M
from .frame import build_contact_frame
from .jets import Jet, JetError

RESIDUAL_MIN_ORDER = 5  # one derivative level deeper than the EQ system


class DegeneratePointError(JetError):
    """The denominator D vanishes (relatively); the system is degenerate."""


@dataclass
class SymmetrySystem:
    D: Jet
    EQ1: Optional[Jet]
    EQ2: Optional[Jet]
    degenerate: bool
    frame: AdaptedFrame
    C: StructureFunctions
    M: Jet
    K: Jet


def build_system(omega: OneForm, metric: MetricField, point,
                 order: int = DEFAULT_ORDER, eps_D: float = 1e-9,
                 **frame_kwargs) -> SymmetrySystem:
    """D = E1K E2M - E2K E1M; EQ1, EQ2 as the quotients of the cross
    numerators by D.  The degeneracy test is relative to the product of the
    in-plane gradient norms ||(E1K, E2K)|| * ||(E1M, E2M)|| (|D| <= eps_D *
    scale flags degenerate), so that both near-parallel gradients and
    vanishing gradients are reported as degenerate."""
    frame, c = build_contact_frame(omega, metric, point, order, **frame_kwargs)
    m = invariant_M(c)
    k = invariant_K(c, frame)
    e1k = directional_derivative(k, frame.E1)
    e2k = directional_derivative(k, frame.E2)
    e3k = directional_derivative(k, frame.E3)
    e1m = directional_derivative(m, frame.E1)
    e2m = directional_derivative(m, frame.E2)
    e3m = directional_derivative(m, frame.E3)
    d = e1k * e2m - e2k * e1m
    scale = (np.hypot(e1k.value, e2k.value) * np.hypot(e1m.value, e2m.value))
    degenerate = abs(d.value) <= eps_D * scale
    if degenerate:
        return SymmetrySystem(D=d, EQ1=None, EQ2=None, degenerate=True,
                              frame=frame, C=c, M=m, K=k)
    eq1 = (e3k * e1m - e1k * e3m) / d
    eq2 = (e3k * e2m - e2k * e3m) / d
    return SymmetrySystem(D=d, EQ1=eq1, EQ2=eq2, degenerate=False,
                          frame=frame, C=c, M=m, K=k)


def integrability_residuals(omega: OneForm, metric: MetricField, point,
                            order: int = RESIDUAL_MIN_ORDER,
                            eps_D: float = 1e-9, **frame_kwargs):
    """The three compatibility residuals of the EQ system; zero (numerically)
    whenever a symmetry exists.  Needs one derivative level beyond the EQ
    system, hence the deeper default jet order."""
    sys_ = build_system(omega, metric, point, order, eps_D, **frame_kwargs)
    if sys_.degenerate:
        raise DegeneratePointError(f"system degenerate at {tuple(point)}")
    fr, c = sys_.frame, sys_.C
    eq1, eq2 = sys_.EQ1, sys_.EQ2
    # Signs follow from the bracket relations [E_b, E_c] = -C^a_{bc} E_a
    # applied to ln f; injected true symmetries drive all three to zero.
    r1 = (directional_derivative(eq2, fr.E1) - directional_derivative(eq1, fr.E2)
          + c.C1_12 * eq1 + c.C2_12 * eq2)
    r2 = directional_derivative(eq1, fr.E3) + c.C1_31 * eq1 + c.C2_31 * eq2
    r3 = (-directional_derivative(eq2, fr.E3)
          + c.C1_23 * eq1 + c.C2_23 * eq2)
    return r1.value, r2.value, r3.value


def frame_to_coordinate_gradient(sys_: SymmetrySystem) -> np.ndarray:
    """Coordinate gradient of ln f from E1 lnf = EQ1, E2 lnf = EQ2,
    E3 lnf = 0, by solving against the frame matrix B (rows E_a)."""
    if sys_.degenerate:
        raise DegeneratePointError("no EQ system at a degenerate point")
    fr = sys_.frame
    b = np.array([[c.value for c in e] for e in (fr.E1, fr.E2, fr.E3)])
    rhs = np.array([sys_.EQ1.value, sys_.EQ2.value, 0.0])
    return np.linalg.solve(b, rhs)


def reconstruct_lnf(omega: OneForm, metric: MetricField, base, target,
                    order: int = DEFAULT_ORDER, quad_tol: float = 1e-9,
                    eps_D: float = 1e-9, max_depth: int = 14) -> float:
    """ln f(target) with ln f(base) = 0, as the line integral of the
    coordinate gradient along the straight segment base -> target
    (adaptive 32-node Gauss-Legendre, bisected until panels agree)."""
    base = np.array([float(c) for c in base])
    delta = np.array([float(c) for c in target]) - base
    if not delta.any():
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(32)

    def integrand(t: float) -> float:
        sys_ = build_system(omega, metric, tuple(base + t * delta), order,
                            eps_D=eps_D)
        if sys_.degenerate:
            raise DegeneratePointError(
                f"degenerate point on segment at t = {t:.6f}")
        return float(delta @ frame_to_coordinate_gradient(sys_))

    def panel(a: float, b: float) -> float:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return half * sum(w * integrand(mid + half * t)
                          for t, w in zip(nodes, weights))

    def adaptive(a: float, b: float, whole: float, depth: int) -> float:
        mid = 0.5 * (a + b)
        left, right = panel(a, mid), panel(mid, b)
        if abs(left + right - whole) < quad_tol or depth >= max_depth:
            return left + right
        return (adaptive(a, mid, left, depth + 1)
                + adaptive(mid, b, right, depth + 1))

    return adaptive(0.0, 1.0, panel(0.0, 1.0), 0)


@dataclass
class SymmetryField:
    point: tuple
    f_value: float
    lnf_gradient: Optional[np.ndarray]
    V: tuple  # component values
    lambda_mult: Optional[float]
    VK: Optional[float]
    VM: Optional[float]
    E3f: Optional[float]
    bracket_defect_1: Optional[float]
    bracket_defect_2: Optional[float]


def _jet_vector_values(v: JetVector):
    return tuple(c.value for c in v)


def assemble_and_verify_V(omega: OneForm, metric: MetricField, points,
                          f: Optional[FieldProgram] = None, base=None,
                          order: int = DEFAULT_ORDER, **frame_kwargs):
    """Assemble V = -E2(f) E1 + E1(f) E2 + f E3 at each point and verify it.

    With an injected scalar program `f`, everything runs in jets and the
    report includes |VK|, |VM|, |E3 f| and the bracket defects
    ||[E1,V] - lambda E2||, ||[E2,V] + lambda E1||.  Without `f`, ln f is
    reconstructed from `base` via the EQ system and only pointwise data
    (f, gradient, V components, VK, VM) is produced.
    """
    out = []
    for p in points:
        frame, c = build_contact_frame(omega, metric, p, order, **frame_kwargs)
        m = invariant_M(c)
        k = invariant_K(c, frame)
        if f is not None:
            fj = f(p, order)
            e1f = directional_derivative(fj, frame.E1)
            e2f = directional_derivative(fj, frame.E2)
            e3f = directional_derivative(fj, frame.E3)
            v = jvec_add(jvec_add(jvec_scale(-e2f, frame.E1),
                                  jvec_scale(e1f, frame.E2)),
                         jvec_scale(fj, frame.E3))
            vk = directional_derivative(k, v).value
            vm = directional_derivative(m, v).value
            br1 = lie_bracket(frame.E1, v)
            br2 = lie_bracket(frame.E2, v)
            lam_mult = sum(frame.eta2[i].value * br1[i].value for i in range(3))
            d1 = np.linalg.norm([br1[i].value - lam_mult * frame.E2[i].value
                                 for i in range(3)])
            d2 = np.linalg.norm([br2[i].value + lam_mult * frame.E1[i].value
                                 for i in range(3)])
            out.append(SymmetryField(
                point=tuple(p), f_value=fj.value, lnf_gradient=None,
                V=_jet_vector_values(v), lambda_mult=lam_mult, VK=vk, VM=vm,
                E3f=e3f.value, bracket_defect_1=float(d1),
                bracket_defect_2=float(d2)))
        else:
            if base is None:
                raise ValueError("either an injected f or a base point is required")
            lnf = reconstruct_lnf(omega, metric, base, p, order)
            fv = float(np.exp(lnf))
            sys_ = build_system(omega, metric, p, order, **frame_kwargs)
            grad = frame_to_coordinate_gradient(sys_)
            e1f = fv * sys_.EQ1.value
            e2f = fv * sys_.EQ2.value
            v = tuple(-e2f * frame.E1[i].value + e1f * frame.E2[i].value
                      + fv * frame.E3[i].value for i in range(3))
            grad_k = np.array([k.partial_value((1, 0, 0)), k.partial_value((0, 1, 0)),
                               k.partial_value((0, 0, 1))])
            grad_m = np.array([m.partial_value((1, 0, 0)), m.partial_value((0, 1, 0)),
                               m.partial_value((0, 0, 1))])
            out.append(SymmetryField(
                point=tuple(p), f_value=fv, lnf_gradient=grad,
                V=v, lambda_mult=None, VK=float(np.dot(v, grad_k)),
                VM=float(np.dot(v, grad_m)), E3f=None,
                bracket_defect_1=None, bracket_defect_2=None))
    return out
