"""Verification suites: randomized, seeded cross-checks of every computable statement.

Each suite receives a RunContext and records CaseRecords into a SuiteReport. Asserted cases
decide the exit status; informational cases (exploratory levels, value distributions) are
reported but never fail a run.
"""

from __future__ import annotations

import json
import logging
import math
import random
import threading
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .config import RunConfig, build_module
from .drinfeld import (
    DrinfeldModule,
    conjugate_module,
    torsion_action,
    torsion_dlog,
    unit_part_r,
)
from .errors import DrinfeldError, UnknownSuite
from .laurent import EXACT, LaurentNum
from .reciprocity import (
    PairingValue,
    conjugated_pairing_check,
    delta,
    delta_trace_identity,
    iwasawa_functional,
    kummer_lhs_prime_case,
    exchange_sides,
    level_shift_check,
    majoration_report,
    pairing_rhs,
    self_pairing,
)
from .tower import (
    TowerElem,
    TowerLevel,
    composed_lift,
    different_generator,
    embed,
    lift_to_series,
    perturbed_lift,
    tower_norm,
    tower_trace,
)
from .twisted import TwistedSeries, tw_mul

logger = logging.getLogger(__name__)

BETA_KINDS = ("generator", "unit", "prime", "product")


def _prec(p: Any) -> Optional[int]:
    """Precision at comparison; None for exact comparisons."""
    if p is None or p >= EXACT:
        return None
    return math.floor(p)


@dataclass
class CaseRecord:
    suite: str
    case: str
    inputs: Dict[str, Any]
    expected: str
    got: str
    passed: bool
    prec: Optional[int] = None
    informational: bool = False
    seed: Optional[int] = None

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "suite": self.suite,
            "case": self.case,
            "inputs": self.inputs,
            "expected": self.expected,
            "got": self.got,
            "pass": self.passed,
            "prec": self.prec,
        }
        if self.informational:
            out["informational"] = True
        if not self.passed and self.seed is not None:
            out["seed"] = self.seed
        return out


class SuiteReport:
    """Cases of one suite run; appends are serialized."""

    def __init__(self, suite: str, config_digest: str, seed: int) -> None:
        self.suite = suite
        self.config_digest = config_digest
        self.seed = seed
        self.cases: List[CaseRecord] = []
        self.wall_time = 0.0
        self._lock = threading.Lock()

    def add(self, record: CaseRecord) -> None:
        with self._lock:
            self.cases.append(record)

    @property
    def asserted(self) -> List[CaseRecord]:
        return [c for c in self.cases if not c.informational]

    @property
    def failed(self) -> int:
        return sum(1 for c in self.asserted if not c.passed)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def summary(self) -> Dict[str, Any]:
        asserted = self.asserted
        return {
            "suite": self.suite,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "cases": len(self.cases),
            "passed": sum(1 for c in asserted if c.passed),
            "failed": self.failed,
            "informational": len(self.cases) - len(asserted),
            "wall_time": round(self.wall_time, 3),
            "pass": self.passed,
        }

    def records(self) -> List[Dict[str, Any]]:
        """Case records followed by the summary object."""
        with self._lock:
            rows = [c.to_json() for c in self.cases]
        rows.append(self.summary())
        return rows

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in self.records())


@dataclass
class RunContext:
    suite: str
    config: RunConfig
    module: DrinfeldModule
    rng: random.Random
    report: SuiteReport

    @property
    def samples(self) -> int:
        return self.config.samples

    def levels(self, top: Optional[int] = None) -> range:
        last = self.config.levels if top is None else min(top, self.config.levels)
        return range(1, last + 1)

    def record(
        self,
        case: str,
        inputs: Dict[str, Any],
        expected: Any,
        got: Any,
        passed: bool,
        prec: Any = None,
        informational: bool = False,
    ) -> bool:
        self.report.add(
            CaseRecord(
                suite=self.suite,
                case=case,
                inputs=inputs,
                expected=str(expected),
                got=str(got),
                passed=bool(passed),
                prec=_prec(prec),
                informational=informational,
                seed=self.config.seed,
            )
        )
        if not passed and not informational:
            logger.debug("%s/%s failed on %s: expected %s, got %s", self.suite, case, inputs, expected, got)
        return bool(passed)

    def attempt(
        self,
        case: str,
        inputs: Dict[str, Any],
        fn: Callable[[], Tuple[Any, Any, bool, Any]],
        informational: bool = False,
    ) -> bool:
        """Run fn() -> (expected, got, passed, prec); library errors become failed cases."""
        try:
            expected, got, passed, prec = fn()
        except DrinfeldError as exc:
            return self.record(case, inputs, "no error", f"{exc.code}: {exc}", False, None, informational)
        return self.record(case, inputs, expected, got, passed, prec, informational)


# -- sampling -----------------------------------------------------------------------------


def qualifying_alpha(
    ctx: RunContext, level: TowerLevel, bound: Fraction, strict: bool = False, spread: int = 1
) -> TowerElem:
    """v_n^j·(random unit) with j/e ≥ bound (> bound when strict), j up to `spread` above the minimum."""
    scaled = Fraction(bound) * level.e
    j = math.floor(scaled) + 1 if strict else math.ceil(scaled)
    j += ctx.rng.randrange(spread + 1)
    return level.random_element(ctx.rng, j)


def sample_beta(ctx: RunContext, level: TowerLevel, kind: str) -> TowerElem:
    """β from one of the strata: torsion generator, unit, prime, product of the two."""
    if kind == "generator":
        return level.generator()
    unit = level.random_integral(ctx.rng, unit=True)
    if kind == "unit":
        return unit
    prime = level.generator() * level.random_integral(ctx.rng, unit=True)
    if kind == "prime":
        return prime
    return unit * prime


def _betas(ctx: RunContext, level: TowerLevel, count: int) -> Iterable[Tuple[str, TowerElem]]:
    for i in range(count):
        kind = BETA_KINDS[i % len(BETA_KINDS)]
        yield kind, sample_beta(ctx, level, kind)


def _same(a: PairingValue, b: PairingValue) -> Tuple[str, str, bool, None]:
    return str(b), str(a), a.same_point(b), None


def _is_identity(f: TwistedSeries) -> Tuple[bool, int]:
    return f.equals(TwistedSeries.identity(f.field))


def _is_carlitz(module: DrinfeldModule) -> bool:
    field = module.field
    carlitz = TwistedSeries(field, [module.pi, LaurentNum.one(field)])
    return module.rho_pi.equals(carlitz)[0] and module.unit_u.equals(LaurentNum.one(field))[0]


def _residual_label(same: bool, prec: Any) -> str:
    return f"zero to π^{prec}" if same else "nonzero"


# -- suites -------------------------------------------------------------------------------


def suite_logexp(ctx: RunContext) -> None:
    module = ctx.module
    field, q = module.field, module.q
    top = min(8, module.tau_trunc)
    lam, exp = module.logarithm(), module.exponential()

    for i in range(1, top + 1):
        floor_c = -i
        floor_d = -Fraction(q**i - 1, q - 1)
        vc = lam.coeff(i).valuation()
        vd = exp.coeff(i).valuation()
        ctx.record("log_coeff_bound", {"i": i}, f">= {floor_c}", vc, vc >= floor_c, lam.coeff(i).abs_prec)
        ctx.record("exp_coeff_bound", {"i": i}, f">= {floor_d}", vd, vd >= floor_d, exp.coeff(i).abs_prec)

    scalars = [
        ("pi", module.pi),
        ("1+pi+pi^3", LaurentNum.from_base_digits(field, [1, 1, 0, 1])),
        ("pi^2", LaurentNum.pi_power(field, 2)),
    ]
    for label, a in scalars:

        def linearity(a: LaurentNum = a) -> Tuple[str, str, bool, int]:
            lhs = tw_mul(lam, module.rho_of(a)).truncate_tau(top)
            rhs = lam.scale(a).truncate_tau(top)
            same, prec = lhs.equals(rhs)
            return "0", _residual_label(same, prec), same, prec

        ctx.attempt("log_linearizes", {"a": label, "tau_degree": top}, linearity)

    def exp_log() -> Tuple[str, str, bool, int]:
        same, prec = tw_mul(exp, lam).truncate_tau(top).equals(TwistedSeries.identity(field))
        return "0", _residual_label(same, prec), same, prec

    def log_exp() -> Tuple[str, str, bool, int]:
        same, prec = tw_mul(lam, exp).truncate_tau(top).equals(TwistedSeries.identity(field))
        return "0", _residual_label(same, prec), same, prec

    def exp_intertwines() -> Tuple[str, str, bool, int]:
        lhs = tw_mul(module.rho_pi, exp).truncate_tau(top)
        rhs = exp.right_scale(module.pi).truncate_tau(top)
        same, prec = lhs.equals(rhs)
        return "0", _residual_label(same, prec), same, prec

    ctx.attempt("exp_after_log", {"tau_degree": top}, exp_log)
    ctx.attempt("log_after_exp", {"tau_degree": top}, log_exp)
    ctx.attempt("exp_intertwines", {"tau_degree": top}, exp_intertwines)


def suite_tower(ctx: RunContext) -> None:
    module = ctx.module
    q, m0 = module.q, module.m0
    field = module.field
    for n in ctx.levels():
        N = n * m0
        try:
            level = module.level(n)
        except DrinfeldError as exc:
            ctx.record("eisenstein", {"n": n}, "Eisenstein g_n", f"{exc.code}: {exc}", False)
            continue
        degree = q ** (N - 1) * (q - 1)
        ctx.record("eisenstein", {"n": n}, degree, level.e, level.e == degree)
        v0 = level.g[0].valuation()
        ctx.record("prime_constant_term", {"n": n}, 1, v0, v0 == 1, level.g[0].abs_prec)
        vv = level.generator().valuation()
        ctx.record("generator_valuation", {"n": n}, level.v_val, vv, vv == level.v_val)

        def norm_generator(level: TowerLevel = level) -> Tuple[str, str, bool, int]:
            got = tower_norm(level.generator(), "H")
            want = level.g[0] if level.e % 2 == 0 else -level.g[0]
            same, prec = got.equals(want)
            return repr(want), repr(got), same, prec

        ctx.attempt("norm_of_generator", {"n": n}, norm_generator)

        def trace_of_one(level: TowerLevel = level) -> Tuple[str, str, bool, int]:
            got = tower_trace(level.one(), "H")
            want = LaurentNum.constant(field, field.from_int(level.e))
            same, prec = got.equals(want)
            return repr(want), repr(got), same, prec

        ctx.attempt("trace_of_one", {"n": n}, trace_of_one)

        for i in range(min(ctx.samples, 10)):
            a = [ctx.rng.randrange(q) for _ in range(N)]

            def dlog_roundtrip(a: List[int] = a, level: TowerLevel = level) -> Tuple[Any, Any, bool, None]:
                w = torsion_action(module, a, level.generator())
                got = torsion_dlog(module, w)
                return a, got, got == a, None

            ctx.attempt("dlog_after_action", {"n": n, "sample": i}, dlog_roundtrip)

        for i in range(min(ctx.samples, 5)):
            x = level.random_integral(ctx.rng, unit=True)
            y = level.random_element(ctx.rng, ctx.rng.randrange(1, level.e + 1))

            def multiplicative(x: TowerElem = x, y: TowerElem = y) -> Tuple[str, str, bool, int]:
                lhs = tower_norm(x * y, "H")
                rhs = tower_norm(x, "H") * tower_norm(y, "H")
                same, prec = lhs.equals(rhs)
                return "N(x)N(y)", _residual_label(same, prec), same, prec

            ctx.attempt("norm_multiplicative", {"n": n, "sample": i}, multiplicative)

        if n + 1 <= ctx.config.levels:

            def image_root(level: TowerLevel = level, n: int = n) -> Tuple[str, str, bool, None]:
                level.image_in(n + 1)
                return "root of g_n", "root of g_n", True, None

            ctx.attempt("eta_image_is_root", {"n": n, "m": n + 1}, image_root)


def suite_different(ctx: RunContext) -> None:
    module = ctx.module
    sep = Fraction(1, module.q - 1)
    for n in ctx.levels():
        N = n * module.m0

        def valuation(n: int = n) -> Tuple[Fraction, Fraction, bool, None]:
            level = module.level(n)
            _, val = different_generator(level)
            return level.diff_val, val, val == level.diff_val, None

        ctx.attempt("different_valuation", {"n": n}, valuation)

        level = module.level(n)
        for i in range(ctx.samples):
            k = ctx.rng.randrange(-level.e, 2 * level.e)
            x = level.random_element(ctx.rng, k)

            def absolute(x: TowerElem = x, N: int = N) -> Tuple[str, Any, bool, int]:
                bound = math.floor(x.valuation() + N - sep)
                t = tower_trace(x, "K")
                return f">= {bound}", t.valuation(), t.valuation() >= bound, t.abs_prec

            ctx.attempt("trace_bound_absolute", {"n": n, "sample": i, "mu": str(Fraction(k, level.e))}, absolute)

            for m in range(1, n):

                def relative(x: TowerElem = x, m: int = m, n: int = n) -> Tuple[str, Any, bool, Any]:
                    vm = module.level(m).v_val
                    bound = x.valuation() + (n - m) * module.m0 - vm
                    t = tower_trace(x, m)
                    return f"> {bound}", t.valuation(), t.valuation() > bound, t.precision()

                ctx.attempt("trace_bound_relative", {"n": n, "m": m, "sample": i}, relative)

            if n > 1 and i < 3:

                def transitive(x: TowerElem = x, n: int = n) -> Tuple[str, str, bool, int]:
                    direct = tower_trace(x, "K")
                    stepped = tower_trace(tower_trace(x, n - 1), "K")
                    same, prec = direct.equals(stepped)
                    return "T_K", _residual_label(same, prec), same, prec

                ctx.attempt("trace_transitive", {"n": n, "sample": i}, transitive)


def suite_majoration(ctx: RunContext) -> None:
    module = ctx.module
    for n in ctx.levels(2):
        level = module.level(n)
        bound = module.vanishing_bound(n)
        for i, (kind, beta) in enumerate(_betas(ctx, level, ctx.samples)):
            alpha = qualifying_alpha(ctx, level, bound, strict=True)

            def vanishing(alpha: TowerElem = alpha, beta: TowerElem = beta) -> Tuple[str, str, bool, None]:
                value = pairing_rhs(alpha, beta)
                return "0", str(value), value.is_zero(), None

            ctx.attempt(
                "vanishing",
                {"n": n, "sample": i, "beta": kind, "mu_alpha": str(alpha.valuation())},
                vanishing,
            )

        steps = min(2, ctx.config.levels - n)
        top = 2 * n * module.m0 * level.e
        for i in range(min(ctx.samples, 10)):
            alpha = level.random_element(ctx.rng, ctx.rng.randrange(1, top + 1))

            def report(alpha: TowerElem = alpha) -> Tuple[str, str, bool, None]:
                rep = majoration_report(alpha, steps=steps)
                ok = rep.within_bounds and all(o[2] for o in rep.orbit)
                return "c(α) within range, orbit above m·m0 − c(α)", f"c(α) = {rep.constant}", ok, None

            ctx.attempt("majoration_constant", {"n": n, "sample": i, "mu_alpha": str(alpha.valuation())}, report)


def suite_delta(ctx: RunContext) -> None:
    module = ctx.module
    for n in ctx.levels():
        level = module.level(n)
        for i, (kind, beta) in enumerate(_betas(ctx, level, ctx.samples)):

            def relift(beta: TowerElem = beta) -> Tuple[str, str, bool, Any]:
                f = lift_to_series(beta)
                d1 = delta(beta)
                d2 = delta(beta, lift=perturbed_lift(f, beta.level, ctx.rng))
                diff = d1.representative - d2.representative
                return f">= {beta.level.diff_val}", str(diff.valuation()), d1.congruent(d2), diff.precision()

            ctx.attempt("relift_in_different", {"n": n, "sample": i, "beta": kind}, relift)

            other = sample_beta(ctx, level, BETA_KINDS[(i + 1) % len(BETA_KINDS)])

            def additive(beta: TowerElem = beta, other: TowerElem = other) -> Tuple[str, str, bool, Any]:
                lhs = delta(beta * other)
                rhs = delta(beta).representative + delta(other).representative
                diff = lhs.representative - rhs
                return f">= {beta.level.diff_val}", str(diff.valuation()), lhs.congruent(rhs), diff.precision()

            ctx.attempt("additive", {"n": n, "sample": i, "beta": kind}, additive)

    for n, m in ((1, 2), (2, 3)):
        if m > ctx.config.levels:
            continue
        level = module.level(n)
        for i, (kind, beta) in enumerate(_betas(ctx, level, min(ctx.samples, 8))):
            inputs = {"n": n, "m": m, "sample": i, "beta": kind}

            def lifted_value(beta: TowerElem = beta, m: int = m) -> Tuple[str, str, bool, Any]:
                same, prec = composed_lift(beta, m).evaluate(module.level(m)).equals(embed(beta, m))
                return "f∘ρ_η(v_m) = β", "equal" if same else "different", same, prec

            ctx.attempt("composed_lift_value", inputs, lifted_value)

            def upward(beta: TowerElem = beta, n: int = n, m: int = m) -> Tuple[str, str, bool, Any]:
                lower = embed(delta(beta).representative, m) * module.eta_power(m - n)
                upper = delta(embed(beta, m), lift=composed_lift(beta, m))
                diff = upper.representative - lower
                return f">= {upper.level.diff_val}", str(diff.valuation()), upper.congruent(lower), diff.precision()

            ctx.attempt("upward", inputs, upward)

            def canonical(beta: TowerElem = beta, n: int = n, m: int = m) -> Tuple[str, str, bool, Any]:
                lower = embed(delta(beta).representative, m) * module.eta_power(m - n)
                upper = delta(embed(beta, m))
                diff = upper.representative - lower
                return f">= {upper.level.diff_val}", str(diff.valuation()), upper.congruent(lower), diff.precision()

            ctx.attempt("upward_canonical_lift", inputs, canonical, informational=True)

        if not module.theorem_condition:
            continue
        upper_level = module.level(m)
        for i, (kind, beta_upper) in enumerate(_betas(ctx, upper_level, min(ctx.samples, 8))):

            def trace_identity(beta_upper: TowerElem = beta_upper, n: int = n) -> Tuple[str, str, bool, None]:
                ok, val = delta_trace_identity(beta_upper, n)
                return "T_{m,n}δ_m ≡ η^{m−n}δ_n", f"residual μ = {val}", ok, None

            ctx.attempt("trace_identity", {"n": n, "m": m, "sample": i, "beta": kind}, trace_identity)


def suite_pairing_bilinear(ctx: RunContext) -> None:
    module = ctx.module
    q = module.q
    for n in ctx.levels(2):
        level = module.level(n)
        N = n * module.m0
        bound = module.log_bound()
        for i in range(ctx.samples):
            a1 = qualifying_alpha(ctx, level, bound)
            a2 = qualifying_alpha(ctx, level, bound)
            kind = BETA_KINDS[i % len(BETA_KINDS)]
            b1 = sample_beta(ctx, level, kind)
            b2 = sample_beta(ctx, level, BETA_KINDS[(i + 1) % len(BETA_KINDS)])
            inputs = {"n": n, "sample": i, "beta": kind}

            ctx.attempt(
                "linear_in_alpha",
                inputs,
                lambda a1=a1, a2=a2, b1=b1: _same(
                    pairing_rhs(a1 + a2, b1), pairing_rhs(a1, b1) + pairing_rhs(a2, b1)
                ),
            )
            ctx.attempt(
                "multiplicative_in_beta",
                inputs,
                lambda a1=a1, b1=b1, b2=b2: _same(
                    pairing_rhs(a1, b1 * b2), pairing_rhs(a1, b1) + pairing_rhs(a1, b2)
                ),
            )
            digits = [ctx.rng.randrange(q) for _ in range(N)]
            scalar = LaurentNum.from_base_digits(module.field, digits)
            ctx.attempt(
                "o_linear",
                dict(inputs, a=digits),
                lambda a1=a1, b1=b1, scalar=scalar, digits=digits: _same(
                    pairing_rhs(module.act(scalar, a1), b1), pairing_rhs(a1, b1).scale(digits)
                ),
            )

        theorem = max(module.theorem_bound(n), bound)
        for i, (kind, beta) in enumerate(_betas(ctx, level, ctx.samples)):
            alpha = qualifying_alpha(ctx, level, theorem)
            ctx.attempt(
                "log_free_agrees",
                {"n": n, "sample": i, "beta": kind, "mu_alpha": str(alpha.valuation())},
                lambda alpha=alpha, beta=beta: _same(
                    pairing_rhs(alpha, beta, use_log=True), pairing_rhs(alpha, beta, use_log=False)
                ),
            )

        carlitz_type, _ = _is_identity(unit_part_r(module, n))
        if not carlitz_type:
            ctx.record("c_one_minus_b", {"n": n}, "r_n = 1", "r_n ≠ 1, skipped", True, informational=True)
            continue
        for i in range(min(ctx.samples, 10)):
            c = qualifying_alpha(ctx, level, theorem)
            b = level.random_element(ctx.rng, ctx.rng.randrange(1, level.e + 1))
            ctx.attempt(
                "c_one_minus_b",
                {"n": n, "sample": i, "mu_c": str(c.valuation()), "mu_b": str(b.valuation())},
                lambda c=c, b=b: _same(*exchange_sides(c, b)),
            )


def suite_main_theorem_r(ctx: RunContext) -> None:
    module = ctx.module
    carlitz = _is_carlitz(module)
    for n in ctx.levels(2):
        level = module.level(n)

        def r_identity(n: int = n) -> Tuple[str, str, bool, int]:
            same, prec = _is_identity(unit_part_r(module, n))
            return "1", "1" if same else repr(unit_part_r(module, n)), same, prec

        ctx.attempt("r_n_is_one", {"n": n}, r_identity, informational=not carlitz)

        bound = max(module.theorem_bound(n), module.log_bound())
        for i in range(ctx.samples):
            alpha = qualifying_alpha(ctx, level, bound)

            def vanishes(alpha: TowerElem = alpha) -> Tuple[str, str, bool, None]:
                value = self_pairing(alpha)
                return "0", str(value), value.is_zero(), None

            ctx.attempt("self_pairing_zero", {"n": n, "sample": i, "mu_alpha": str(alpha.valuation())}, vanishes)


def suite_main_theorem_lhs(ctx: RunContext) -> None:
    module = ctx.module
    if not module.theorem_condition:
        ctx.record("kummer", {}, "ρ_η ≡ τ^{m0} mod 𝔭_H", "condition fails, skipped", True, informational=True)
        return
    if not _is_identity(unit_part_r(module, 1))[0]:
        ctx.record("kummer", {}, "r_1 = 1", "r_1 ≠ 1, skipped", True, informational=True)
        return
    n = 1
    m = module.kummer_level(n)
    level = module.level(n)
    bound = max(module.theorem_bound(n), module.log_bound())
    values: Counter = Counter()
    for i in range(ctx.samples):
        alpha = qualifying_alpha(ctx, level, bound)
        inputs = {"n": n, "m": m, "sample": i, "mu_alpha": str(alpha.valuation())}
        try:
            result = kummer_lhs_prime_case(alpha, m)
            rhs = pairing_rhs(alpha, result.pi_n)
        except DrinfeldError as exc:
            ctx.record("kummer_equals_pairing", inputs, "no error", f"{exc.code}: {exc}", False)
            continue
        values[str(result.value)] += 1
        ctx.record("kummer_equals_pairing", inputs, rhs, result.value, result.value is not None and result.value.same_point(rhs))
        ctx.record("norm_congruence", inputs, f">= {2 * m * module.m0}", result.congruence_valuation, result.congruence_ok)
    ctx.record(
        "value_distribution",
        {"n": n, "m": m},
        "more than one value",
        json.dumps(dict(sorted(values.items())), ensure_ascii=False),
        len(values) > 1,
        informational=True,
    )

    if ctx.config.levels < 2:
        return
    n = 2
    level = module.level(n)
    bound = max(module.theorem_bound(n), module.log_bound())
    for m in ctx.config.exploratory_m:
        if m <= n:
            continue
        alpha = qualifying_alpha(ctx, level, bound)
        inputs = {"n": n, "m": m, "mu_alpha": str(alpha.valuation())}

        def exploratory(alpha: TowerElem = alpha, m: int = m) -> Tuple[Any, Any, bool, None]:
            result = kummer_lhs_prime_case(alpha, m, exploratory=True)
            rhs = pairing_rhs(alpha, result.pi_n)
            agree = result.value is not None and result.value.same_point(rhs)
            return rhs, result.value, agree, None

        ctx.attempt("exploratory", inputs, exploratory, informational=True)


def suite_level_shift(ctx: RunContext) -> None:
    module = ctx.module
    bound = module.log_bound()
    for n, m in ((1, 2), (1, 3), (2, 3)):
        if m > ctx.config.levels:
            continue
        level = module.level(n)
        upper = module.level(m)
        for i, (kind, beta_upper) in enumerate(_betas(ctx, upper, ctx.samples)):
            alpha = qualifying_alpha(ctx, level, bound)
            inputs = {"n": n, "m": m, "sample": i, "beta": kind, "mu_alpha": str(alpha.valuation())}
            try:
                result = level_shift_check(alpha, beta_upper)
            except DrinfeldError as exc:
                ctx.record("levels_agree", inputs, "no error", f"{exc.code}: {exc}", False)
                continue
            ctx.record("levels_agree", inputs, result.lower, result.upper, result.agree)
            if result.trace_identity is not None:
                ctx.record(
                    "delta_trace_identity",
                    inputs,
                    "T_{m,n}δ_m ≡ η^{m−n}δ_n",
                    f"residual μ = {result.trace_residual_valuation}",
                    result.trace_identity,
                )


def suite_iwasawa(ctx: RunContext) -> None:
    module = ctx.module
    fresh = min(ctx.samples, 10)
    for n in ctx.levels(2):
        level = module.level(n)
        N = n * module.m0
        base = module.field.base
        results = {}
        for kind in ("generator", "unit", "prime"):
            beta = sample_beta(ctx, level, kind)
            inputs = {"n": n, "beta": kind}
            try:
                res = iwasawa_functional(beta, ctx.rng, fresh=fresh)
            except DrinfeldError as exc:
                ctx.record("solve", inputs, "solution", f"{exc.code}: {exc}", False)
                continue
            results[kind] = (beta, res)
            ctx.record("solve", inputs, "solution", f"invariants {list(res.smith.exponents)}", True)
            ctx.record("fresh_residual", inputs, 0, res.residual_failures, res.residual_failures == 0)
            ctx.record("matches_delta", inputs, True, res.matches_delta, res.matches_delta)

        if "unit" in results and "prime" in results:
            (b1, r1), (b2, r2) = results["unit"], results["prime"]
            inputs = {"n": n, "beta": "unit*prime"}
            try:
                r12 = iwasawa_functional(b1 * b2, random.Random(f"{ctx.config.seed}:iwasawa:{n}"), fresh=0)
            except DrinfeldError as exc:
                ctx.record("homomorphism", inputs, "z(ββ') = z(β) + z(β')", f"{exc.code}: {exc}", False)
                continue
            ok = True
            for z1, z2, z12 in zip(r1.z, r2.z, r12.z):
                total = LaurentNum(base, 0, z1, N) + LaurentNum(base, 0, z2, N)
                if tuple(total.digits(N)) != tuple(z12):
                    ok = False
                    break
            ctx.record("homomorphism", inputs, "z(ββ') = z(β) + z(β')", "equal" if ok else "different", ok, N)


def suite_conjugation(ctx: RunContext) -> None:
    module = ctx.module
    field = module.field
    base = field.base
    n = 1
    level = module.level(n)
    scalar = base.generator if base.order > 2 else 1
    twists = [
        ("scalar", TwistedSeries.constant(field, LaurentNum.constant(field, field.embed[scalar]))),
        ("1+pi*tau", TwistedSeries(field, [LaurentNum.one(field), module.pi])),
    ]
    try:
        twists.append(("r_1", unit_part_r(module, 1)))
    except DrinfeldError as exc:
        ctx.record("twist", {"t": "r_1"}, "r_1", f"{exc.code}: {exc}", False)
    bound = max(module.theorem_bound(n), module.log_bound())
    for label, t in twists:
        try:
            twisted = conjugate_module(module, t)
        except DrinfeldError as exc:
            ctx.record("twist", {"t": label}, "valid module", f"{exc.code}: {exc}", False)
            continue
        for i, (kind, beta) in enumerate(_betas(ctx, level, min(ctx.samples, 8))):
            alpha = qualifying_alpha(ctx, level, bound)

            def conjugated(
                t: TwistedSeries = t, alpha: TowerElem = alpha, beta: TowerElem = beta, twisted: DrinfeldModule = twisted
            ) -> Tuple[Any, Any, bool, None]:
                res = conjugated_pairing_check(t, alpha, beta, twisted_module=twisted)
                return res.original, res.twisted, res.agree, None

            ctx.attempt("conjugation_invariant", {"t": label, "n": n, "sample": i, "beta": kind}, conjugated)


SuiteFn = Callable[[RunContext], None]

SUITES: Dict[str, Tuple[SuiteFn, str]] = {
    "logexp": (suite_logexp, "logarithm/exponential coefficient bounds and linearization residuals"),
    "tower": (suite_tower, "Eisenstein levels, torsion coordinates, norms and embeddings"),
    "different": (suite_different, "valuation of g_n'(v_n) and the trace valuation bounds"),
    "majoration": (suite_majoration, "vanishing above nm0 + 1/(q−1) and the constant c(α)"),
    "delta": (suite_delta, "δ_n well-definedness, additivity and compatibility between levels"),
    "pairing-bilinear": (suite_pairing_bilinear, "bilinearity, 𝒪-linearity, log-free form, [c,1−b] identity"),
    "main-theorem-r": (suite_main_theorem_r, "[α, r_n(α)] = 0 for qualifying α"),
    "main-theorem-lhs": (suite_main_theorem_lhs, "Kummer value through the norm route against the formula"),
    "level-shift": (suite_level_shift, "pairings at levels n < m agree through the norm"),
    "iwasawa": (suite_iwasawa, "ψ(β) through the trace form on the certified sublattice"),
    "conjugation": (suite_conjugation, "pairing invariance under ρ' = t^{-1}ρt"),
}


def list_suites() -> List[Dict[str, str]]:
    return [{"name": name, "description": desc} for name, (_, desc) in SUITES.items()]


def run_suite(
    name: str, config: RunConfig, module: Optional[DrinfeldModule] = None
) -> SuiteReport:
    """Run one suite; deterministic given the config seed."""
    entry = SUITES.get(name)
    if entry is None:
        raise UnknownSuite(f"unknown suite {name!r}", {"available": sorted(SUITES)})
    fn, _ = entry
    if module is None:
        module = build_module(config)
    report = SuiteReport(name, config.digest, config.seed)
    ctx = RunContext(name, config, module, random.Random(f"{config.seed}:{name}"), report)
    started = time.perf_counter()
    try:
        fn(ctx)
    except DrinfeldError as exc:
        ctx.record("suite", {}, "completed", f"{exc.code}: {exc}", False)
    report.wall_time = time.perf_counter() - started
    summary = report.summary()
    logger.info(
        "%s: %d passed, %d failed, %d informational (%.2fs)",
        name,
        summary["passed"],
        summary["failed"],
        summary["informational"],
        report.wall_time,
    )
    return report


def run_suites(
    config: RunConfig,
    names: Optional[Sequence[str]] = None,
    module: Optional[DrinfeldModule] = None,
) -> List[SuiteReport]:
    names = list(names or config.suites or SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UnknownSuite(f"unknown suite(s) {', '.join(unknown)}", {"available": sorted(SUITES)})
    if module is None:
        module = build_module(config)
    return [run_suite(name, config, module) for name in names]


def write_report(reports: Sequence[SuiteReport], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(report.to_jsonl())
