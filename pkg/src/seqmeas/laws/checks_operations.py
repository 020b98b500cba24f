"""Law checks at the operation level: the explicit Kraus constructions for
trivial/semi-trivial operations, complements, the operation-level Bayes
failures, and the non-monomorphism fixture for the post-channel effect map."""

from __future__ import annotations

import numpy as np

from .. import matcore, operations as op_mod, serialize
from ..effects import Effect, State, complement, prob, random_effect, random_state, seq_product
from ..matcore import max_abs
from ..observables import random_observable
from ._common import resample, sharp_partition, trace_real, wit
from .core import CheckResult, LawCheck, LawContext, Tally, register


def _sub_identity_effects(dim: int, rng: np.random.Generator, n: int) -> list[Effect]:
    """n generic effects with sum strictly below the identity."""
    return list(random_observable(dim, rng, n_outcomes=n + 1).effects[:n])


def _matrix_units(dim: int):
    for k in range(dim):
        for l in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[k, l] = 1.0
            yield unit


def check_semi_trivial_construction(ctx: LawContext) -> CheckResult:
    """The explicit Kraus family for rho -> sum tr(rho a_i) alpha_i reproduces
    the direct formula on the whole matrix-unit basis, with hat = sum a_i."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            n = int(rng.integers(1, 4))
            pairs = [
                (a, random_state(dim, rng)) for a in _sub_identity_effects(dim, rng, n)
            ]
            op = op_mod.semi_trivial(pairs)
            for unit in _matrix_units(dim):
                direct = sum(np.trace(unit @ a.op) * alpha.op for a, alpha in pairs)
                tally.expect(max_abs(op_mod.apply(op, unit) - direct),
                             "construction matches the direct formula")
            hat_direct = sum(a.op for a, _ in pairs)
            tally.expect(max_abs(op_mod.hat(op).op - hat_direct),
                         "induced effect is the sum of the effects")
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_trivial_construction(ctx: LawContext) -> CheckResult:
    """Single-pair case: rho -> tr(rho a) alpha measures a, like the Lueders
    operation of a does."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            a = random_effect(dim, rng)
            alpha = random_state(dim, rng)
            op = op_mod.trivial(a, alpha)
            for unit in _matrix_units(dim):
                direct = np.trace(unit @ a.op) * alpha.op
                tally.expect(max_abs(op_mod.apply(op, unit) - direct),
                             "trivial action matches")
            tally.expect(max_abs(op_mod.hat(op).op - a.op), "trivial operation measures a")
            tally.expect(max_abs(op_mod.hat(op_mod.luders(a)).op - a.op),
                         "Lueders operation measures a", tol=1e-10)
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_atomic_is_semi_trivial(ctx: LawContext) -> CheckResult:
    """An operation is atomic iff it is semi-trivial with rank-one states equal
    to their own effects."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            u = matcore.random_unitary(dim, rng)
            size = int(rng.integers(1, dim + 1))
            vectors = [u[:, k] for k in range(size)]
            atomic = op_mod.atomic_operation(vectors)
            pairs = [
                (Effect(np.outer(v, v.conj())), State(np.outer(v, v.conj())))
                for v in vectors
            ]
            st = op_mod.semi_trivial(pairs)
            tally.expect(op_mod.action_distance(atomic, st),
                         "atomic equals projector-paired semi-trivial")
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_luders_complement(ctx: LawContext) -> CheckResult:
    """Every operation is completed to a channel by the Lueders operation of
    the complement of its induced effect."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            op = op_mod.random_operation(dim, ctx.rng)
            comp = op_mod.complement_luders(op)
            total = op_mod.add(op, comp)
            tally.expect(max_abs(op_mod.hat(total).op - matcore.identity(dim)),
                         "sum is a channel")
            tally.expect_true(op_mod.is_complement(comp, op), "complement is recognized")
            chan = op_mod.random_channel(dim, ctx.rng)
            zero = op_mod.complement_luders(chan)
            tally.expect(max_abs(op_mod.hat(zero).op), "channels have the zero complement")
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_luders_and_trivial_complements(ctx: LawContext) -> CheckResult:
    """Lueders of a' complements Lueders of a; trivial of (a', alpha)
    complements trivial of (a, alpha), summing to the constant channel."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            a = random_effect(dim, rng)
            lu = op_mod.add(op_mod.luders(a), op_mod.luders(complement(a)))
            tally.expect(max_abs(op_mod.hat(lu).op - matcore.identity(dim)),
                         "Lueders pair sums to a channel")
            tally.expect_true(op_mod.is_complement(op_mod.luders(complement(a)), op_mod.luders(a)),
                              "Lueders complement recognized")
            alpha = random_state(dim, rng)
            i = op_mod.trivial(a, alpha)
            j = op_mod.trivial(complement(a), alpha)
            tally.expect_true(op_mod.is_complement(j, i), "trivial complement recognized")
            rho = random_state(dim, rng)
            total = op_mod.apply(op_mod.add(i, j), rho)
            tally.expect(max_abs(total - alpha.op), "sum is the constant channel")
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_complement_iff(ctx: LawContext) -> CheckResult:
    """j complements i exactly when hat(j) is the complement of hat(i)."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            i = op_mod.random_operation(dim, rng)
            target = complement(op_mod.hat(i))
            alpha = random_state(dim, rng)
            for j in (op_mod.complement_luders(i), op_mod.trivial(target, alpha)):
                tally.expect_true(op_mod.is_complement(j, i), "matching hat completes i")
                tally.expect(max_abs(op_mod.hat(op_mod.add(i, j)).op - matcore.identity(dim)),
                             "the completed sum is a channel")
            j_far = resample(
                lambda: op_mod.random_operation(dim, rng),
                lambda cand: max_abs(op_mod.hat(cand).op - target.op) > 0.05)
            tally.expect_true(not op_mod.is_complement(j_far, i),
                              "mismatched hat is rejected")
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def check_sharp_meet_is_zero(ctx: LawContext) -> CheckResult:
    """For sharp i with its Lueders complement j, effects below both induced
    effects vanish (the meet-is-zero witness at the effect level)."""
    tally = Tally(tol=ctx.eq_tol)
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            cells = sharp_partition(dim, rng, coarse=True)
            size = int(rng.integers(1, len(cells) + 1))
            projections = [p.op for p in cells[:size]]
            sharp = op_mod.sharp_operation(projections)
            j = op_mod.complement_luders(sharp)
            hat_i = op_mod.hat(sharp)
            hat_j = op_mod.hat(j)
            tally.expect(max_abs(seq_product(hat_i, hat_j).op),
                         "projection meets its complement at zero")
            lam = float(rng.uniform(0.1, 1.0))
            candidates = [
                Effect(lam * hat_i.op),
                Effect(lam * hat_j.op),
                Effect(lam * seq_product(hat_i, hat_j).op),
            ]
            for c in candidates:
                below_both = (matcore.loewner_leq(c.op, hat_i.op, tol=ctx.psd_tol)
                              and matcore.loewner_leq(c.op, hat_j.op, tol=ctx.psd_tol))
                if below_both:
                    tally.expect(max_abs(c.op), "effects below both hats vanish",
                                 wit(candidate=c))
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=trials, witness=tally.witness)


def _constant_channel_violation(witness: dict) -> float:
    a = serialize.effect_from_json(witness["a"])
    alpha = serialize.state_from_json(witness["alpha"])
    rho = serialize.state_from_json(witness["rho"])
    return abs(prob(rho, a) - prob(alpha, a))


def check_constant_channel_bayes(ctx: LawContext) -> CheckResult:
    """Conditioning through the constant channel of two trivial operations
    replaces rho by alpha; generic inputs witness the failure."""
    tally = Tally(tol=ctx.eq_tol)
    best = 0.0
    best_witness = None
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            a = random_effect(dim, rng)
            alpha = random_state(dim, rng)
            chan = op_mod.add(op_mod.trivial(a, alpha), op_mod.trivial(complement(a), alpha))
            rho = random_state(dim, rng)
            tally.expect(max_abs(op_mod.apply(chan, rho) - alpha.op),
                         "the pair sums to the constant channel")
            violation = abs(prob(rho, a) - prob(alpha, a))
            if violation > best:
                best = violation
                best_witness = wit(a=a, alpha=alpha, rho=rho, violation=violation)
    return CheckResult(ok=tally.ok, max_deviation=best, trials=trials,
                       witness=best_witness if tally.ok else tally.witness,
                       found=best > ctx.gap)


def _projection_mixing_violation(witness: dict) -> float:
    a = serialize.matrix_from_json(witness["a"])
    b = serialize.effect_from_json(witness["b"])
    dim = a.shape[0]
    mixed = a @ b.op @ a + (np.eye(dim) - a) @ b.op @ (np.eye(dim) - a)
    return max_abs(b.op - mixed)


def check_projection_mixing_bayes(ctx: LawContext) -> CheckResult:
    """Conditioning through the sharp two-projection channel displaces any
    effect that fails to commute with the projection."""
    tally = Tally(tol=1e-10)
    best = 0.0
    best_witness = None
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            u = matcore.random_unitary(dim, rng)
            rank = int(rng.integers(1, dim))
            a = sum(np.outer(u[:, k], u[:, k].conj()) for k in range(rank))
            b = random_effect(dim, rng)
            rho = random_state(dim, rng)
            a_perp = np.eye(dim) - a
            mixed = a @ b.op @ a + a_perp @ b.op @ a_perp
            chan = op_mod.add(op_mod.kraus_single(a), op_mod.kraus_single(a_perp))
            j = op_mod.luders(b)
            lhs = trace_real(op_mod.apply(j, op_mod.apply(chan, rho)))
            tally.expect(abs(lhs - trace_real(rho.op @ mixed)),
                         "channel conditioning equals the mixed effect")
            violation = max_abs(b.op - mixed)
            if violation > best:
                best = violation
                best_witness = wit(a=a, b=b, rho=rho, violation=violation)
    return CheckResult(ok=tally.ok, max_deviation=best, trials=trials,
                       witness=best_witness if tally.ok else tally.witness,
                       found=best > ctx.gap)


def _operation_bayes_violation(witness: dict) -> float:
    kind = witness["construction"]
    if kind == "constant-channel":
        return _constant_channel_violation(witness)
    rho = serialize.state_from_json(witness["rho"])
    b = serialize.effect_from_json(witness["b"])
    a = serialize.matrix_from_json(witness["a"])
    dim = a.shape[0]
    mixed = a @ b.op @ a + (np.eye(dim) - a) @ b.op @ (np.eye(dim) - a)
    return abs(prob(rho, b) - trace_real(rho.op @ mixed))


def check_operation_bayes_first_rule(ctx: LawContext) -> CheckResult:
    """Bayes' first rule for operations, tr[J(rho)] = tr[J(C(rho))], fails for
    both the constant-channel and the projection-mixing constructions."""
    best = 0.0
    best_witness = None
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            # Example-1-style: constant channel
            a = random_effect(dim, rng)
            alpha = random_state(dim, rng)
            rho = random_state(dim, rng)
            violation = abs(prob(rho, a) - prob(alpha, a))
            if violation > best:
                best = violation
                best_witness = wit(a=a, alpha=alpha, rho=rho, violation=violation,
                                   construction="constant-channel")
            # Example-2-style: projection mixing
            u = matcore.random_unitary(dim, rng)
            p = np.outer(u[:, 0], u[:, 0].conj())
            b = random_effect(dim, rng)
            p_perp = np.eye(dim) - p
            mixed = p @ b.op @ p + p_perp @ b.op @ p_perp
            violation = abs(prob(rho, b) - trace_real(rho.op @ mixed))
            if violation > best:
                best = violation
                best_witness = wit(a=p, b=b, rho=rho, violation=violation,
                                   construction="projection-mixing")
    return CheckResult(ok=True, max_deviation=best, trials=trials,
                       witness=best_witness, found=best > ctx.gap)


def _sequencing_order_violation(witness: dict) -> float:
    kind = witness["construction"]
    rho = serialize.state_from_json(witness["rho"])
    if kind == "trivial":
        a = serialize.effect_from_json(witness["a"])
        alpha = serialize.state_from_json(witness["alpha"])
        beta = serialize.state_from_json(witness["beta"])
        return prob(rho, a) * abs(prob(alpha, a) - prob(beta, a))
    a = serialize.effect_from_json(witness["a"])
    b = serialize.effect_from_json(witness["b"])
    return abs(prob(rho, seq_product(a, b)) - prob(rho, seq_product(b, a)))


def check_sequencing_order_matters(ctx: LawContext) -> CheckResult:
    """tr[J(I(rho))] and tr[I(J(rho))] disagree for trivial pairs sharing an
    effect and for non-commuting Lueders pairs; the closed forms hold exactly."""
    tally = Tally(tol=1e-10)
    best = 0.0
    best_witness = None
    trials = 0
    for dim in ctx.dims:
        for _ in range(ctx.trials):
            trials += 1
            rng = ctx.rng
            a = random_effect(dim, rng)
            alpha = random_state(dim, rng)
            beta = random_state(dim, rng)
            rho = random_state(dim, rng)
            i_op = op_mod.trivial(a, alpha)
            j_op = op_mod.trivial(a, beta)
            forward = trace_real(op_mod.apply(j_op, op_mod.apply(i_op, rho)))
            backward = trace_real(op_mod.apply(i_op, op_mod.apply(j_op, rho)))
            tally.expect(abs(forward - prob(rho, a) * prob(alpha, a)),
                         "forward composition closed form")
            tally.expect(abs(backward - prob(rho, a) * prob(beta, a)),
                         "backward composition closed form")
            violation = abs(forward - backward)
            if violation > best:
                best = violation
                best_witness = wit(a=a, alpha=alpha, beta=beta, rho=rho,
                                   violation=violation, construction="trivial")
            b = random_effect(dim, rng)
            li, lj = op_mod.luders(a), op_mod.luders(b)
            forward = trace_real(op_mod.apply(lj, op_mod.apply(li, rho)))
            backward = trace_real(op_mod.apply(li, op_mod.apply(lj, rho)))
            tally.expect(abs(forward - prob(rho, seq_product(a, b))),
                         "Lueders forward closed form")
            tally.expect(abs(backward - prob(rho, seq_product(b, a))),
                         "Lueders backward closed form")
            violation = abs(forward - backward)
            if violation > best:
                best = violation
                best_witness = wit(a=a, b=b, rho=rho, violation=violation,
                                   construction="luders")
    return CheckResult(ok=tally.ok, max_deviation=best, trials=trials,
                       witness=best_witness if tally.ok else tally.witness,
                       found=best > ctx.gap)


def check_post_channel_not_mono(ctx: LawContext) -> CheckResult:
    """The dephasing fixture: two copies of half the doubled projection are not
    summable, yet their images under the post-channel effect map sum to I."""
    from ..effects import perp

    tally = Tally(tol=1e-12)
    deph = op_mod.sharp_operation([np.diag([1.0, 0.0]).astype(complex),
                                   np.diag([0.0, 1.0]).astype(complex)])
    d = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    a = Effect(d / 2)
    b = Effect(d / 2)
    tally.expect_true(not perp(a, b), "a + b = d exceeds the identity")
    image_sum = op_mod.op_then_effect(deph, a).op + op_mod.op_then_effect(deph, b).op
    tally.expect(max_abs(image_sum - np.eye(2)), "images sum exactly to the identity")
    return CheckResult(ok=tally.ok, max_deviation=tally.max_deviation,
                       trials=1, witness=tally.witness)


register(LawCheck(
    id="eq-2.3/2.4", kind="counterexample", dims=(2,), trials=100,
    description="Bayes' first rule for operations fails through nontrivial channels",
    fn=check_operation_bayes_first_rule, replay=_operation_bayes_violation))
register(LawCheck(
    id="lemma-2.1", kind="identity", dims=(2, 3), trials=50,
    description="Atomic operations are the projector-paired semi-trivial ones",
    fn=check_atomic_is_semi_trivial))
register(LawCheck(
    id="thm-2.2", kind="identity", dims=(2, 3, 4, 5), trials=50,
    description="Explicit Kraus family for semi-trivial operations",
    fn=check_semi_trivial_construction))
register(LawCheck(
    id="cor-2.3", kind="identity", dims=(2, 3), trials=50,
    description="Explicit Kraus family for trivial operations; both trivial "
                "and Lueders operations measure the same effect",
    fn=check_trivial_construction))
register(LawCheck(
    id="ex-1", kind="counterexample", dims=(2,), trials=100, gap=0.1,
    description="Constant-channel conditioning forgets the input state",
    fn=check_constant_channel_bayes, replay=_constant_channel_violation))
register(LawCheck(
    id="ex-2", kind="counterexample", dims=(2,), trials=100,
    description="Projection mixing displaces non-commuting effects",
    fn=check_projection_mixing_bayes, replay=_projection_mixing_violation))
register(LawCheck(
    id="ex-3", kind="counterexample", dims=(2,), trials=100,
    description="Sequential composition of operations is order sensitive",
    fn=check_sequencing_order_matters, replay=_sequencing_order_violation))
register(LawCheck(
    id="ex-4", kind="identity", dims=(2, 3), trials=50,
    description="Every operation has a Lueders complement to a channel",
    fn=check_luders_complement))
register(LawCheck(
    id="ex-5", kind="identity", dims=(2, 3), trials=50,
    description="Lueders and trivial complements built from the complement effect",
    fn=check_luders_and_trivial_complements))
register(LawCheck(
    id="thm-2.4i", kind="identity", dims=(2, 3), trials=50,
    description="Complement of an operation is exactly a complement of its hat",
    fn=check_complement_iff))
register(LawCheck(
    id="thm-2.4ii", kind="identity", dims=(2, 3), trials=50,
    description="Sharp operations meet their complements at zero (effect-level witness)",
    fn=check_sharp_meet_is_zero))
register(LawCheck(
    id="ex-10", kind="identity", dims=(2,), trials=1,
    description="Post-channel effect map is a morphism but not a monomorphism",
    fn=check_post_channel_not_mono))
