"""Law checks at the effect/state level: the effect-algebra axioms, the
hat-map isomorphism, the sharp/atomic commutation equivalences and the two
Bayes-rule failures for effects."""

from __future__ import annotations

import numpy as np

from .. import matcore, operations as op_mod, serialize
from ..effects import (
    Effect,
    State,
    complement,
    perp,
    prob,
    random_effect,
    random_state,
    seq_product,
)
from ..matcore import max_abs
from ..observables import random_observable
from ._common import resample, sharp_partition, trace_real, wit
from .core import CheckResult, LawCheck, LawContext, Tally, register

# Rejection floor for "generic" (fail-direction) samples: instances that nearly
# satisfy an iff hypothesis are resampled so the asserted gap is never flaky.
GENERIC_COMMUTATOR_FLOOR = 0.1


def _split_identity(dim: int, rng: np.random.Generator, n: int = 4) -> list[Effect]:
    """n effects summing exactly to I (generic, mutually non-commuting)."""
    return list(random_observable(dim, rng, n_outcomes=n).effects)


def check_axiom_1(ctx: LawContext) -> CheckResult:
    tally = Tally(tol=1e-12)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            x, y, _, _ = _split_identity(dim, ctx.rng)
            tally.expect_true(perp(x, y) and perp(y, x), "x perp y iff y perp x",
                              wit(x=x, y=y))
            tally.expect(max_abs((x.op + y.op) - (y.op + x.op)), "x+y = y+x",
                         wit(x=x, y=y))
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_axiom_2(ctx: LawContext) -> CheckResult:
    tally = Tally(tol=1e-12)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            x, y, z, _ = _split_identity(dim, ctx.rng)
            yz = Effect(y.op + z.op)
            xy = Effect(x.op + y.op)
            tally.expect_true(perp(y, z) and perp(x, yz), "hypothesis holds by construction",
                              wit(x=x, y=y, z=z))
            tally.expect_true(perp(x, y) and perp(z, xy), "x perp y and z perp (x+y)",
                              wit(x=x, y=y, z=z))
            tally.expect(max_abs((x.op + (y.op + z.op)) - ((x.op + y.op) + z.op)),
                         "associativity", wit(x=x, y=y, z=z))
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_axiom_3(ctx: LawContext) -> CheckResult:
    tally = Tally(tol=1e-12)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            x = random_effect(dim, ctx.rng)
            xc = complement(x)
            tally.expect_true(perp(x, xc), "x perp x'", wit(x=x))
            tally.expect(max_abs(x.op + xc.op - matcore.identity(dim)), "x + x' = I", wit(x=x))
            # uniqueness: any effect summing with x to I is I - x entrywise
            tally.expect(max_abs(xc.op - (matcore.identity(dim) - x.op)),
                         "complement is unique", wit(x=x))
            tally.expect(max_abs(complement(xc).op - x.op), "x'' = x", wit(x=x))
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_axiom_4(ctx: LawContext) -> CheckResult:
    tally = Tally(tol=1e-10)
    trials = 0
    for dim in ctx.dims:
        ident = Effect(matcore.identity(dim))
        zero = Effect(np.zeros((dim, dim), dtype=complex))
        tally.expect_true(perp(zero, ident), "0 perp I")
        for _ in range(ctx.trials):
            trials += 1
            x = random_effect(dim, ctx.rng)
            if max_abs(x.op) <= 1e-10:
                continue
            tally.expect_true(not perp(x, ident), "x perp I only for x = 0", wit(x=x))
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_hat_isomorphism(ctx: LawContext) -> CheckResult:
    """Additivity, convex-linearity, surjectivity, injectivity-on-classes and
    order preservation of the induced-effect map."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            a = random_effect(dim, rng)
            tally.expect(max_abs(op_mod.hat(op_mod.luders(a)).op - a.op),
                         "surjectivity via Lueders", wit(a=a), tol=1e-10)
            lam = float(rng.uniform(0.1, 0.9))
            i = op_mod.scale(op_mod.random_operation(dim, rng), lam)
            j = op_mod.scale(op_mod.random_operation(dim, rng), 1.0 - lam)
            tally.expect(
                max_abs(op_mod.hat(op_mod.add(i, j)).op - (op_mod.hat(i).op + op_mod.hat(j).op)),
                "hat is additive", wit(lam=lam))
            base = op_mod.random_operation(dim, rng)
            tally.expect(
                max_abs(op_mod.hat(op_mod.scale(base, lam)).op - lam * op_mod.hat(base).op),
                "hat is homogeneous", wit(lam=lam))
            chan = op_mod.random_channel(dim, rng)
            tally.expect(max_abs(op_mod.hat(chan).op - matcore.identity(dim)),
                         "channels are the unit class")
            alpha = random_state(dim, rng)
            tally.expect_true(op_mod.equiv(op_mod.luders(a), op_mod.trivial(a, alpha)),
                              "operations measuring one effect are equivalent", wit(a=a))
            b = random_effect(dim, rng)
            if max_abs(a.op - b.op) > 1e-6:
                tally.expect_true(not op_mod.equiv(op_mod.luders(a), op_mod.luders(b)),
                                  "distinct hats are inequivalent", wit(a=a, b=b))
            # order preservation along i <= i + k
            half = op_mod.scale(base, 0.5)
            more = op_mod.add(half, op_mod.scale(op_mod.random_operation(dim, rng), 0.5))
            tally.expect_true(op_mod.operation_leq(half, more, rng),
                              "construction satisfies the operation order")
            tally.expect_true(matcore.loewner_leq(op_mod.hat(half).op, op_mod.hat(more).op),
                              "hat preserves order")
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_kraus_trace_identity(ctx: LawContext) -> CheckResult:
    """tr(rho sum A†A) = tr[I(rho)] <= tr(rho), and the sum is representation
    independent under unitary remixing of the Kraus family."""
    tally = Tally(tol=1e-10)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            op = op_mod.random_operation(dim, rng)
            rho = random_state(dim, rng)
            out_trace = trace_real(op_mod.apply(op, rho))
            tally.expect(abs(prob(rho, op_mod.hat(op)) - out_trace),
                         "hat reproduces the output trace", wit(rho=rho))
            tally.expect(max(0.0, out_trace - 1.0), "trace nonincreasing", wit(rho=rho))
            m = op.n_kraus + int(rng.integers(0, 3))
            w = matcore.random_unitary(max(m, 2), rng)
            remixed = op_mod.remix_kraus(op, w)
            tally.expect(max_abs(op_mod.hat(remixed).op - op_mod.hat(op).op),
                         "hat is Kraus-representation independent", tol=ctx.eq_tol)
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_partition_commutation_iff(ctx: LawContext) -> CheckResult:
    """b = sum a_i b a_i over a sharp partition iff b commutes with every cell."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            # pass direction: b is a function of a coarse random partition
            cells = sharp_partition(dim, rng, coarse=True)
            coeffs = rng.uniform(0.0, 1.0, size=len(cells))
            b = Effect(sum(c * p.op for c, p in zip(coeffs, cells)))
            mixed = sum(seq_product(p, b).op for p in cells)
            tally.expect(max_abs(b.op - mixed), "commuting b is reproduced",
                         wit(b=b))
            tally.expect_true(
                max(max_abs(b.op @ p.op - p.op @ b.op) for p in cells) <= 1e-8,
                "constructed b commutes")

            # fail direction: a generic effect against a rank-one partition
            cells = sharp_partition(dim, rng, coarse=False)

            def commutator(e: Effect) -> float:
                return max(max_abs(e.op @ p.op - p.op @ e.op) for p in cells)

            generic = resample(lambda: random_effect(dim, rng),
                               lambda e: commutator(e) >= GENERIC_COMMUTATOR_FLOOR)
            mixed = sum(seq_product(p, generic).op for p in cells)
            violation = max_abs(generic.op - mixed)
            tally.expect_true(violation > ctx.gap, "generic b is displaced",
                              wit(b=generic, violation=violation))
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def _swap_on_span(phi: np.ndarray, psi: np.ndarray) -> np.ndarray | None:
    """Hermitian unitary exchanging phi and psi (requires real overlap)."""
    dim = phi.size
    overlap = np.vdot(phi, psi)
    w = psi - overlap * phi
    norm = np.linalg.norm(w)
    if norm < 1e-9:
        return None  # psi ~ phi: nothing to swap
    e2 = w / norm
    v = np.column_stack([phi, e2])
    block = np.array([[overlap.real, norm], [norm, -overlap.real]])
    return v @ block @ v.conj().T + (np.eye(dim) - v @ v.conj().T)


def check_atomic_symmetry_iff(ctx: LawContext) -> CheckResult:
    """P_rho(a o b) = P_rho(b o a) for atomic a, b iff the diagonal matrix
    elements of rho agree or the projections are orthogonal."""
    tally = Tally(tol=1e-10)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            # pass instance 1: symmetrized state with equal diagonals; vectors
            # too close to parallel make the swap ill-conditioned, so resample
            def draw_pair():
                return (matcore.random_unit_vector(dim, rng),
                        matcore.random_unit_vector(dim, rng))

            phi, psi = resample(draw_pair,
                                lambda pair: abs(np.vdot(pair[0], pair[1])) <= 0.95)
            overlap = np.vdot(phi, psi)
            if abs(overlap) > 1e-12:
                psi = psi * (overlap.conjugate() / abs(overlap))
            swap = _swap_on_span(phi, psi)
            if swap is not None:
                rho0 = matcore.random_state(dim, rng)
                rho = State((rho0 + swap @ rho0 @ swap) / 2)
                a = Effect(np.outer(phi, phi.conj()))
                b = Effect(np.outer(psi, psi.conj()))
                gap = abs(prob(rho, seq_product(a, b)) - prob(rho, seq_product(b, a)))
                tally.expect(gap, "equal diagonals give symmetric probabilities",
                             wit(a=a, b=b, rho=rho))
            # pass instance 2: orthogonal projections
            u = matcore.random_unitary(dim, rng)
            a = Effect(np.outer(u[:, 0], u[:, 0].conj()))
            b = Effect(np.outer(u[:, 1], u[:, 1].conj()))
            rho = random_state(dim, rng)
            gap = abs(prob(rho, seq_product(a, b)) - prob(rho, seq_product(b, a)))
            tally.expect(gap, "orthogonal projections give symmetric probabilities",
                         wit(a=a, b=b, rho=rho))

            # fail direction: overlapping pair over a state with distinct diagonals
            def draw():
                phi = matcore.random_unit_vector(dim, rng)
                psi = matcore.random_unit_vector(dim, rng)
                rho = random_state(dim, rng)
                return phi, psi, rho

            def accept(sample):
                phi, psi, rho = sample
                diag_gap = abs(np.vdot(phi, rho.op @ phi).real - np.vdot(psi, rho.op @ psi).real)
                return abs(np.vdot(phi, psi)) >= 0.4 and diag_gap >= 0.15

            phi, psi, rho = resample(draw, accept)
            a = Effect(np.outer(phi, phi.conj()))
            b = Effect(np.outer(psi, psi.conj()))
            violation = abs(prob(rho, seq_product(a, b)) - prob(rho, seq_product(b, a)))
            tally.expect_true(violation > ctx.gap, "generic atomic pair is asymmetric",
                              wit(a=a, b=b, rho=rho, violation=violation))
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def _bayes_first_rule_violation(witness: dict) -> float:
    parts = serialize.observable_from_json(witness["partition"])
    b = serialize.effect_from_json(witness["b"])
    rho = serialize.state_from_json(witness["rho"])
    total = sum(prob(rho, seq_product(a_i, b)) for a_i in parts.effects)
    return abs(prob(rho, b) - total)


def check_bayes_first_rule_effects(ctx: LawContext) -> CheckResult:
    """Bayes' first rule P(b) = sum_i P(a_i) P(b|a_i) fails for effects."""
    from ..observables import Observable

    best = 0.0
    best_witness = None
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            cells = sharp_partition(dim, rng)
            parts = Observable(tuple(f"x{k}" for k in range(len(cells))), tuple(cells))
            b = random_effect(dim, rng)
            rho = random_state(dim, rng)
            total = sum(prob(rho, seq_product(a_i, b)) for a_i in cells)
            violation = abs(prob(rho, b) - total)
            if violation > best:
                best = violation
                best_witness = wit(partition=parts, b=b, rho=rho, violation=violation)
                best_witness["partition"] = serialize.observable_to_json(parts)
    return CheckResult(ok=True, max_deviation=best, trials=trials,
                       witness=best_witness, found=best > ctx.gap)


def _bayes_second_rule_violation(witness: dict) -> float:
    a = serialize.effect_from_json(witness["a"])
    b = serialize.effect_from_json(witness["b"])
    rho = serialize.state_from_json(witness["rho"])
    return abs(prob(rho, seq_product(a, b)) - prob(rho, seq_product(b, a)))


def check_bayes_second_rule_effects(ctx: LawContext) -> CheckResult:
    """Bayes' second rule P(b)P(a|b) = P(a)P(b|a) fails for effects."""
    best = 0.0
    best_witness = None
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            a = random_effect(dim, rng)
            b = random_effect(dim, rng)
            rho = random_state(dim, rng)
            violation = abs(prob(rho, seq_product(a, b)) - prob(rho, seq_product(b, a)))
            if violation > best:
                best = violation
                best_witness = wit(a=a, b=b, rho=rho, violation=violation)
    return CheckResult(ok=True, max_deviation=best, trials=trials,
                       witness=best_witness, found=best > ctx.gap)


register(LawCheck(
    id="axioms-1", kind="identity", dims=(2, 3), trials=50,
    description="Orthosum commutes: x perp y implies y perp x and x+y = y+x",
    fn=check_axiom_1))
register(LawCheck(
    id="axioms-2", kind="identity", dims=(2, 3), trials=50,
    description="Orthosum associates across nested perp sums",
    fn=check_axiom_2))
register(LawCheck(
    id="axioms-3", kind="identity", dims=(2, 3), trials=50,
    description="Every effect has the unique complement I - x",
    fn=check_axiom_3))
register(LawCheck(
    id="axioms-4", kind="identity", dims=(2, 3), trials=50,
    description="Only the zero effect is summable with the identity",
    fn=check_axiom_4))
register(LawCheck(
    id="thm-1.1", kind="identity", dims=(2, 3), trials=100,
    description="The induced-effect map is a convex effect-algebra isomorphism "
                "on equivalence classes of operations",
    fn=check_hat_isomorphism))
register(LawCheck(
    id="thm-1.2i", kind="iff", dims=(2,), trials=100,
    description="A sharp partition reproduces b iff b commutes with every cell",
    fn=check_partition_commutation_iff))
register(LawCheck(
    id="thm-1.2ii", kind="iff", dims=(2,), trials=100,
    description="Atomic sequential probabilities are symmetric iff diagonals "
                "agree or the projections are orthogonal",
    fn=check_atomic_symmetry_iff))
register(LawCheck(
    id="eq-1.1", kind="identity", dims=(2, 3), trials=50,
    description="Kraus trace identity and representation independence of the "
                "induced effect",
    fn=check_kraus_trace_identity))
register(LawCheck(
    id="eq-2.1", kind="counterexample", dims=(2,), trials=100,
    description="Bayes' first rule fails for effect conditioning",
    fn=check_bayes_first_rule_effects, replay=_bayes_first_rule_violation))
register(LawCheck(
    id="eq-2.2", kind="counterexample", dims=(2,), trials=100,
    description="Bayes' second rule fails for effect conditioning",
    fn=check_bayes_second_rule_effects, replay=_bayes_second_rule_violation))
