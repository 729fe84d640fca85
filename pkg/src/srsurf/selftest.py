"""Built-in fixture checks for the CLI selftest subcommand.

Each check exercises a pinned fixture with known closed-form or oracle
values and reports its maximum deviation against a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .fields import FieldProgram, MetricField, OneForm, exterior_derivative
from .frame import (build_contact_frame, jvec_dot, lie_bracket, metric_dot,
                    nonholonomity, nonholonomity_program)
from .invariants import invariant_K, invariant_M, invariants_at
from .jets import BudgetExhausted, jet_seed
from .singular import (build_singular_frame, characteristic_field,
                       lambda_identities, locate_sigma, sigma_invariants)
from .symmetry import (assemble_and_verify_V, build_system,
                       integrability_residuals, reconstruct_lnf)

HEISENBERG = "dz + y*dx - x*dy"
CARTAN = "dz + y*dx"
OMEGA_1 = "dy + x^2*dz"


@dataclass
class CheckResult:
    name: str
    max_dev: float
    tol: float
    passed: bool
    note: str = ""

    def to_dict(self):
        return {"name": self.name, "max_dev": self.max_dev, "tol": self.tol,
                "passed": self.passed, "note": self.note}


def _result(name, devs, tol, note=""):
    m = float(max(devs)) if devs else 0.0
    return CheckResult(name=name, max_dev=m, tol=tol, passed=m < tol, note=note)


def _rng():
    return np.random.default_rng(20240817)


def _box_points(rng, n, scale=2.0):
    return [tuple(rng.uniform(-scale, scale, 3)) for _ in range(n)]


def check_jet_oracle(order: int = 4) -> CheckResult:
    """Jet partials of sample expressions vs central finite differences."""
    rng = _rng()
    exprs = ["x^2*y + sin(z)", "sqrt(1 + x^2 + y^2)", "exp(x*y)/(1 + z^2)",
             "cos(x)*ln(2 + y)"]
    progs = [FieldProgram.parse(e) for e in exprs]
    devs = []
    h = 1e-5
    for prog in progs:
        for _ in range(3):
            p = tuple(rng.uniform(-1, 1, 3))
            j = prog(p, order)
            for axis in range(3):
                pp = list(p)
                pm = list(p)
                pp[axis] += h
                pm[axis] -= h
                fd = (prog(tuple(pp), 1).value - prog(tuple(pm), 1).value) / (2 * h)
                mi = [0, 0, 0]
                mi[axis] = 1
                devs.append(abs(j.partial_value(mi) - fd) / (1 + abs(fd)))
    return _result("jet-vs-finite-difference", devs, 1e-5)


def check_invariant_M_closed_forms(order: int = 4) -> CheckResult:
    """M against the closed forms for the two contact fixtures."""
    rng = _rng()
    g = MetricField.identity()
    devs = []
    heis = OneForm.parse(HEISENBERG)
    cart = OneForm.parse(CARTAN)
    for p in _box_points(rng, 20):
        x, y, _ = p
        vals, _, _ = invariants_at(heis, g, p, order=order)
        m_ref = 2.25 * (x * x + y * y) ** 2 / (1 + x * x + y * y) ** 4
        devs.append(abs(vals.M.value - m_ref) / (1 + abs(m_ref)))
        vals, _, _ = invariants_at(cart, g, p, order=order)
        m_ref = 0.25 * (1 - 2 * y * y) ** 2 / (1 + y * y) ** 4
        devs.append(abs(vals.M.value - m_ref) / (1 + abs(m_ref)))
    return _result("invariant-M-closed-forms", devs, 1e-8)


def check_frame_identities(order: int = 4) -> CheckResult:
    """Orthonormality, duality, C3 row and C1_31 = C2_23 on both fixtures."""
    rng = _rng()
    g = MetricField.identity()
    devs = []
    for text in (HEISENBERG, CARTAN):
        omega = OneForm.parse(text)
        for p in _box_points(rng, 10):
            frame, c = build_contact_frame(omega, g, p, order=order)
            gm = g.evaluate(p, order)
            devs.append(abs(metric_dot(gm, frame.E1, frame.E1).value - 1))
            devs.append(abs(metric_dot(gm, frame.E2, frame.E2).value - 1))
            devs.append(abs(metric_dot(gm, frame.E1, frame.E2).value))
            for a, eta in enumerate(frame.coframe):
                for b, e in enumerate(frame.frame):
                    devs.append(abs(jvec_dot(eta, e).value - (1.0 if a == b else 0.0)))
            devs.append(abs(c.C3_12.value - 1))
            devs.append(abs(c.C3_23.value))
            devs.append(abs(c.C3_31.value))
            devs.append(abs(c.C1_31.value - c.C2_23.value))
            m = invariant_M(c)
            a1 = (c.C1_23.value - c.C2_31.value) / 2
            a2 = c.C1_31.value
            devs.append(abs(m.value - (a1 * a1 + a2 * a2)))
    return _result("frame-identities", devs, 1e-8)


def check_gauge_invariance(order: int = 4) -> CheckResult:
    """M and K under conformal rescaling, sign flip and SO(2) re-gauging."""
    rng = _rng()
    g = MetricField.identity()
    phi = FieldProgram.parse("x + 2*y")
    devs = []
    for text in (HEISENBERG, CARTAN):
        omega = OneForm.parse(text)
        scaled = omega.scale(phi.exp())
        flipped = -omega
        for p in _box_points(rng, 8, scale=1.5):
            ref, _, _ = invariants_at(omega, g, p, order=order)
            for other_kwargs, other_form in ((dict(), scaled), (dict(), flipped),
                                             (dict(rotation=0.7), omega)):
                vals, _, _ = invariants_at(other_form, g, p, order=order,
                                           **other_kwargs)
                devs.append(abs(vals.M.value - ref.M.value) / (1 + abs(ref.M.value)))
                devs.append(abs(vals.K.value - ref.K.value) / (1 + abs(ref.K.value)))
    return _result("gauge-invariance-M-K", devs, 1e-8)


def check_nonholonomity_properties(order: int = 4) -> CheckResult:
    """lambda homogeneity under e^phi and d(omega)(E1,E2) = -lambda."""
    rng = _rng()
    g = MetricField.identity()
    phi = FieldProgram.parse("x + 2*y")
    devs = []
    for text in (HEISENBERG, CARTAN, OMEGA_1):
        omega = OneForm.parse(text)
        scaled = omega.scale(phi.exp())
        for p in _box_points(rng, 8, scale=1.2):
            lam = nonholonomity(omega, g, p, order)
            lam_s = nonholonomity(scaled, g, p, order)
            factor = math.exp(phi(p, 1).value)
            devs.append(abs(lam_s.value - factor * lam.value)
                        / (1 + abs(factor * lam.value)))
            from .frame import delta_basis
            e1, e2 = delta_basis(omega, g, p, order)
            dw = exterior_derivative(omega, p, order)
            devs.append(abs(dw.apply(e1, e2).value + lam.value)
                        / (1 + abs(lam.value)))
    return _result("nonholonomity-properties", devs, 1e-9)


def check_cartan_degenerate(order: int = 5) -> CheckResult:
    """The EQ-system denominator D vanishes identically on the y-only fixture."""
    rng = _rng()
    g = MetricField.identity()
    omega = OneForm.parse(CARTAN)
    devs = []
    for p in _box_points(rng, 15):
        sys_ = build_system(omega, g, p, order=order)
        devs.append(abs(sys_.D.value))
        if not sys_.degenerate:
            devs.append(1.0)
    return _result("cartan-degenerate-branch", devs, 1e-12)


def check_injected_symmetries(order: int = 5) -> CheckResult:
    """Injected true symmetries verify: VK, VM, E3 f and bracket defects."""
    rng = _rng()
    g = MetricField.identity()
    devs = []
    heis = OneForm.parse(HEISENBERG)
    f_heis = FieldProgram.parse("sqrt(1 + x^2 + y^2)")
    pts = _box_points(rng, 12, scale=1.5)
    for r in assemble_and_verify_V(heis, g, pts, f=f_heis, order=order):
        devs += [abs(r.VK), abs(r.VM), abs(r.E3f),
                 r.bracket_defect_1, r.bracket_defect_2]
    cart = OneForm.parse(CARTAN)
    f_cart = FieldProgram.parse("-sqrt(1 + y^2)*y")
    for r in assemble_and_verify_V(cart, g, pts, f=f_cart, order=order):
        devs += [abs(r.VK), abs(r.VM), abs(r.E3f),
                 r.bracket_defect_1, r.bracket_defect_2]
    return _result("injected-symmetry-verification", devs, 1e-7)


def check_symmetry_reconstruction(order: int = 5) -> CheckResult:
    """Regular fixture with a known symmetry (z-translation): EQ equals
    -E(lambda)/lambda, residuals vanish, and the reconstructed ln f equals
    ln(lambda(base)/lambda(target))."""
    g = MetricField.from_upper_triangle(["1 + x^2", "0", "0", "1", "0", "1"])
    omega = OneForm.parse(CARTAN)
    devs = []
    pts = [(0.4, 0.3, 0.1), (1.0, -0.5, 0.2), (-0.7, 0.8, 0.0), (0.2, 0.9, -0.3)]
    from .invariants import directional_derivative
    for p in pts:
        sys_ = build_system(omega, g, p, order=order)
        if sys_.degenerate:
            devs.append(1.0)
            continue
        lam = sys_.frame.lam
        for eq, e in ((sys_.EQ1, sys_.frame.E1), (sys_.EQ2, sys_.frame.E2)):
            ref = -directional_derivative(lam, e).value / lam.value
            devs.append(abs(eq.value - ref))
        devs += [abs(r) for r in integrability_residuals(omega, g, p, order=order)]
    base, target = (0.1, 0.2, 0.0), (0.9, -0.4, 0.3)
    lnf = reconstruct_lnf(omega, g, base, target, order=order)
    ref = math.log(nonholonomity(omega, g, base, order).value
                   / nonholonomity(omega, g, target, order).value)
    devs.append(abs(lnf - ref))
    return _result("symmetry-reconstruction-fixture", devs, 1e-7)


def check_singular_fixture(order: int = 4) -> CheckResult:
    """Sigma location, characteristic field, lambda identities and
    Q-invariants for the singular fixture, plus rescale invariance."""
    g = MetricField.identity()
    omega = OneForm.parse(OMEGA_1)
    devs = []
    sp = locate_sigma(omega, g, ((-1, 0, 0), (1, 0, 0)))
    if sp is None or not sp.transversal:
        return CheckResult("singular-fixture", 1.0, 1e-6, False,
                           "Sigma root not found")
    devs.append(float(np.linalg.norm(sp.point)))
    for p in [(0.5, 0, 0), (0, 0, 0), (0, 0.4, 0.2)]:
        v = characteristic_field(omega, p, order)
        devs.append(float(np.linalg.norm(np.array([c.value for c in v])
                                         - np.array([0.0, 1.0, 0.0]))))
    for p in [(0.3, 0, 0), (0, 0.5, -0.3)]:
        frame, c = build_singular_frame(omega, g, p, order=order)
        r1, r2 = lambda_identities(frame, c)
        devs += [abs(r1), abs(r2), abs(c.C3_12.value + frame.lam.value),
                 abs(c.C3_23.value), abs(c.C3_31.value)]
    q = sigma_invariants(omega, g, (0, 0, 0))
    devs += [abs(q.Q112), abs(q.Q212)]
    lam_prog = nonholonomity_program(omega, g)
    scaled = omega.scale((lam_prog * lam_prog).exp())
    q2 = sigma_invariants(scaled, g, (0, 0, 0))
    devs += [abs(q2.Q112 - q.Q112), abs(q2.Q212 - q.Q212)]
    return _result("singular-fixture", devs, 1e-6)


def check_budget_failure_mode() -> CheckResult:
    """Designed failure: residuals at jet order 2 must exhaust the budget."""
    g = MetricField.from_upper_triangle(["1 + x^2", "0", "0", "1", "0", "1"])
    omega = OneForm.parse(CARTAN)
    try:
        integrability_residuals(omega, g, (0.4, 0.3, 0.1), order=2)
    except BudgetExhausted:
        return CheckResult("budget-exhaustion-designed-failure", 0.0, 1.0, True)
    except Exception as exc:  # pragma: no cover
        return CheckResult("budget-exhaustion-designed-failure", 1.0, 1.0,
                           False, f"unexpected error {exc!r}")
    return CheckResult("budget-exhaustion-designed-failure", 1.0, 1.0, False,
                       "no error raised")


ALL_CHECKS = (
    check_jet_oracle,
    check_invariant_M_closed_forms,
    check_frame_identities,
    check_gauge_invariance,
    check_nonholonomity_properties,
    check_cartan_degenerate,
    check_injected_symmetries,
    check_symmetry_reconstruction,
    check_singular_fixture,
    check_budget_failure_mode,
)


def run_selftest(jet_order=None) -> List[CheckResult]:
    import inspect

    results = []
    for fn in ALL_CHECKS:
        kwargs = {}
        if jet_order is not None and "order" in inspect.signature(fn).parameters:
            kwargs["order"] = jet_order
        try:
            results.append(fn(**kwargs))
        except Exception as exc:
            results.append(CheckResult(name=fn.__name__.replace("check_", "").replace("_", "-"),
                                       max_dev=math.inf, tol=0.0, passed=False,
                                       note=f"error: {exc}"))
    return results
