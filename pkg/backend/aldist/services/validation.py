"""
Invariant suite behind ``validate``.

Each check returns (passed, detail). The quick profile trims Monte Carlo
sizes; the full profile uses the acceptance sizes from
data/reference/validation_settings.json.
"""
import itertools
import math
import time
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy import integrate

from ..core.errors import DomainError, ValidationFailure
from ..core.log import get_logger
from ..core.normal import phi_cdf, phi_cdf_array, phi_quantile
from ..core.reference import ReferenceData
from ..core.rng import replication_rng
from ..core.sequences import LimitForm, PowerLawSequence, ThetaSequence, limit_of
from ..models.asymptotics import LimitTag
from ..models.estimation import CdfEstimatorSpec, EstimatorKind
from ..models.location import LocationModel, ScaleKind
from ..models.regression import RegressionProblem
from ..models.study import StudyConfig, TuningChoice, TuningKind
from . import asymptotics, cdf_estimation, estimators, exact_dist, montecarlo

logger = get_logger(__name__)

# (mu rule, theta sequence, expected tag, expected location or shift)
REGIME_TABLE = [
    ("n^-1/2", "0", LimitTag.CONSERVATIVE_MIXTURE, 0.0),
    ("n^-1/2", "n^-1/2", LimitTag.CONSERVATIVE_MIXTURE, 1.0),
    ("n^-1/2", "1", LimitTag.STANDARD_NORMAL, None),
    ("n^-1/3", "0", LimitTag.POINT_MASS, 0.0),
    ("n^-1/3", "n^-1/2", LimitTag.POINT_MASS, -1.0),
    ("n^-1/3", "0.5*n^-1/3", LimitTag.ESCAPE_POS, None),
    ("n^-1/3", "-0.5*n^-1/3", LimitTag.ESCAPE_NEG, None),
    ("n^-1/3", "5", LimitTag.SHIFTED_NORMAL, 0.0),
    ("n^-1/4", "1", LimitTag.SHIFTED_NORMAL, 1.0),
    ("n^-1/3", "n^-0.4", LimitTag.ESCAPE_POS, None),
    ("n^-1/5", "1", LimitTag.ESCAPE_POS, None),
]

# Canonical escape rows put their atom at x = +/-5, so the escape probes sit at +/-4.
ESCAPE_PROBES = (-4.0, 4.0)


def brute_force_minimizer(problem: RegressionProblem, mu: float) -> np.ndarray:
    """
    Exact minimizer of the adaptive LASSO objective by enumerating sign patterns.

    For every pattern s in {-1, 0, 1}^k the objective restricted to that orthant
    face is a quadratic; its stationary point is kept when it has the assumed
    signs. Only practical for small k.
    """
    x, y = problem.design, problem.response
    gram, xty = x.T @ x, x.T @ y
    lam = estimators.adaptive_penalties(estimators.least_squares(problem), problem.n, mu)
    best, best_val = np.zeros(problem.k), float(y @ y)
    for signs in itertools.product((-1, 0, 1), repeat=problem.k):
        s = np.array(signs, dtype=float)
        active = s != 0
        if not active.any():
            continue
        theta = np.zeros(problem.k)
        theta[active] = np.linalg.solve(gram[np.ix_(active, active)], xty[active] - lam[active] * s[active])
        if np.any(np.sign(theta[active]) != s[active]):
            continue
        val = float(y @ y - 2 * xty @ theta + theta @ gram @ theta + 2 * lam @ np.abs(theta))
        if val < best_val:
            best, best_val = theta, val
    return best


def correlated_problem(n: int, rho: float, theta, seed: int) -> RegressionProblem:
    design = montecarlo.build_design(n, len(theta), rho)
    rng = replication_rng(seed, 0)
    return RegressionProblem(design=design, response=design @ np.asarray(theta) + rng.standard_normal(n))


class InvariantSuite:
    """Numerical checks of every stated property, runnable as one table."""

    def __init__(self, profile: str = "quick", seed: int = 20081201, reference: Optional[ReferenceData] = None):
        self.reference = reference or ReferenceData()
        self.settings = self.reference.validation_settings
        self.profile_name = profile
        self.profile = self.reference.profile(profile)
        self.full = profile == "full"
        self.seed = seed
        self.n_grid = [int(v) for v in self.settings["n_grid"]]
        self.checks: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
            ("normal_functions", self.check_normal_functions),
            ("limit_of_examples", self.check_limit_of),
            ("closed_form_optimality", self.check_closed_form_optimality),
            ("hard_threshold_identity", self.check_hard_threshold_identity),
            ("orthogonal_equivalence", self.check_orthogonal_equivalence),
            ("solver_brute_force", self.check_solver_brute_force),
            ("worked_example_atom", self.check_worked_example_atom),
            ("roots_and_sandwich", self.check_roots),
            ("cdf_validity", self.check_cdf_validity),
            ("total_mass", self.check_total_mass),
            ("density_derivative", self.check_density_derivative),
            ("cdf_g_dual_form", self.check_cdf_g_dual_form),
            ("empirical_cdf_dkw", self.check_empirical_cdf),
            ("regime_table", self.check_regime_table),
            ("conservative_convergence", self.check_conservative_convergence),
            ("g_limit_convergence", self.check_g_limit_convergence),
            ("oracle_reconciliation", self.check_oracle_reconciliation),
            ("selprob_limit_agreement", self.check_selprob_limit),
            ("root_asymptotics", self.check_root_asymptotics),
            ("oscillation_identity", self.check_oscillation),
            ("trivial_tails", self.check_trivial_tails),
            ("worst_case_impossibility", self.check_worst_case),
            ("scaling_constants", self.check_scaling_constants),
            ("kde_smoothing", self.check_kde),
            ("study_zero_frequencies", self.check_study),
        ]

    def rng(self, index: int) -> np.random.Generator:
        return replication_rng(self.seed, index)

    # core / estimators

    def check_normal_functions(self):
        x = np.linspace(-8.0, 8.0, 16001)
        p = phi_cdf_array(x)
        reflection = float(np.max(np.abs(p + phi_cdf_array(-x) - 1.0)))
        monotone = bool(np.all(np.diff(p) >= 0))
        xs = np.linspace(-6.0, 6.0, 1201)
        # the double spacing of Phi(x) near 1 bounds the upper-tail round trip
        tol = np.maximum(1e-10, 4 * np.finfo(float).eps / np.exp(-0.5 * xs * xs) * math.sqrt(2 * math.pi))
        roundtrip = all(abs(phi_quantile(phi_cdf(v)) - v) <= t for v, t in zip(xs, tol))
        ok = reflection <= 1e-15 and monotone and roundtrip and abs(phi_cdf(1.0) - 0.841345) < 1e-6
        return ok, f"reflection={reflection:.2e} monotone={monotone} roundtrip={roundtrip}"

    def check_limit_of(self):
        cases = [
            (limit_of(PowerLawSequence(coef=1, exponent=1 / 3), form=LimitForm.SQRT_N_SCALED), math.inf),
            (limit_of(ThetaSequence.power(2, 0.5), PowerLawSequence(coef=1, exponent=1 / 3), LimitForm.RATIO), 0.0),
            (limit_of(PowerLawSequence(coef=3, exponent=0.5), form=LimitForm.SQRT_N_SCALED), 3.0),
        ]
        ok = all(got.value == want for got, want in cases)
        # finite-n values move toward the declared limit
        seq = PowerLawSequence(coef=3, exponent=0.45)
        vals = [math.sqrt(n) * float(seq.eval(n)) for n in (1e3, 1e6, 1e9)]
        ok = ok and vals[0] < vals[1] < vals[2]
        return ok, f"{[c[0].to_json() for c in cases]}"

    def check_closed_form_optimality(self):
        rng = self.rng(1)
        count = int(self.profile["random_inputs"])
        y_bar = rng.normal(0, 1, count)
        mu = rng.uniform(0.01, 1.0, count)
        worst = math.inf
        for yb, m in zip(y_bar, mu):
            est = estimators.alasso_location(yb, m)
            cand = rng.uniform(-3, 3, 1000)
            margin = np.min(estimators.alasso_objective_location(cand, yb, m)) - \
                estimators.alasso_objective_location(est, yb, m)
            worst = min(worst, float(margin))
        return worst >= -1e-12, f"min margin {worst:.3e} over {count} inputs"

    def check_hard_threshold_identity(self):
        rng = self.rng(2)
        worst = 0.0
        for yb, m in zip(rng.normal(0, 1, 5000), rng.uniform(0.01, 1.0, 5000)):
            h = estimators.hard_threshold(yb, m)
            rhs = h - math.copysign(1.0, h) * m * m / abs(yb) if h != 0 else 0.0
            worst = max(worst, abs(estimators.alasso_location(yb, m) - rhs))
        example = estimators.alasso_location(0.2, 0.05)
        return worst <= 1e-14 and abs(example - 0.1875) < 1e-15, f"max deviation {worst:.2e}"

    def check_orthogonal_equivalence(self):
        n, k = 100, 4
        design = montecarlo.build_design(n, k, 0.0)
        rng = self.rng(3)
        worst = 0.0
        for _ in range(10):
            y = design @ rng.normal(0, 0.5, k) + rng.standard_normal(n)
            problem = RegressionProblem(design=design, response=y)
            fit = estimators.alasso_general(problem, 0.15)
            closed = [estimators.alasso_location(v, 0.15) for v in fit.ls_estimate]
            worst = max(worst, float(np.max(np.abs(fit.estimate - closed))))
        return worst <= 1e-8, f"max deviation {worst:.2e}"

    def check_solver_brute_force(self):
        worst = 0.0
        monotone = True
        for i in range(10):
            problem = correlated_problem(100, 0.5, [1.0, 0.1], self.seed + i)
            fit = estimators.alasso_general(problem, 0.1)
            worst = max(worst, float(np.max(np.abs(fit.estimate - brute_force_minimizer(problem, 0.1)))))
            monotone = monotone and bool(np.all(np.diff(fit.objective_trace) <= 1e-9 * max(1.0, fit.objective_trace[0])))
        return worst <= 1e-6 and monotone, f"max deviation {worst:.2e}, monotone={monotone}"

    # exact_dist

    def check_worked_example_atom(self):
        fig = self.settings["worked_example"]
        model = LocationModel(**fig)
        dist = exact_dist.finite_sample_dist(model)
        expected = phi_cdf(math.sqrt(10) * -0.05) - phi_cdf(math.sqrt(10) * -0.15)
        freq = exact_dist.empirical_selection_frequency(model, int(self.profile["draws"]), self.seed)
        tol = max(0.002, 4 * math.sqrt(expected * (1 - expected) / self.profile["draws"]))
        ok = abs(dist.atom_location + 0.316227766) < 1e-8 and abs(dist.atom_mass - expected) < 1e-12 \
            and abs(freq - dist.atom_mass) <= tol
        return ok, f"atom {dist.atom_location:.4f} mass {dist.atom_mass:.6f} empirical {freq:.6f}"

    def check_roots(self):
        rng = self.rng(4)
        bad = 0
        worst_resid = 0.0
        count = int(self.profile["random_inputs"])
        for _ in range(count):
            model = LocationModel(n=int(rng.integers(1, 10000)), theta=float(rng.normal(0, 1)),
                                  mu=float(rng.uniform(0.001, 1.0)))
            x = float(rng.normal(0, 3))
            pair = exact_dist.roots(model, x)
            a, b = model.sqrt_n_theta, model.sqrt_n_mu
            coef1, coef0 = a - x, -(model.n_mu_sq + a * x)
            scale = max(1.0, abs(coef1), abs(coef0))
            for z in (pair.z1, pair.z2):
                worst_resid = max(worst_resid, abs(z * z + coef1 * z + coef0) / (scale * max(1.0, abs(z))))
            pivot = -a + b
            slack = 1e-9 * max(1.0, abs(pivot))
            upper = a + x >= 0
            wrong_side = pair.z2 < pivot - slack if upper else pair.z2 > pivot + slack
            if pair.z1 > pivot + slack or wrong_side:
                bad += 1
        return bad == 0 and worst_resid <= 1e-10, f"sandwich violations {bad}, residual {worst_resid:.2e}"

    def check_cdf_validity(self):
        rng = self.rng(5)
        ok = True
        worst_jump = worst_mirror = 0.0
        for _ in range(20):
            model = LocationModel(n=int(rng.integers(1, 500)), theta=float(rng.normal(0, 0.5)),
                                  mu=float(rng.uniform(0.01, 0.5)))
            grid = np.linspace(-40, 40, 4001)
            f = exact_dist.cdf_F(model, grid)
            ok = ok and bool(np.all(np.diff(f) >= 0)) and f[0] <= 1e-12 and 1 - f[-1] <= 1e-12
            atom = -model.sqrt_n_theta
            jump = exact_dist.cdf_F(model, atom) - exact_dist.cdf_F_left(model, atom)
            worst_jump = max(worst_jump, abs(jump - exact_dist.selection_prob(model)))
            nudge = exact_dist.cdf_F(model, atom) - exact_dist.cdf_F(model, atom - 1e-9 * max(1, abs(atom)))
            ok = ok and abs(nudge - jump) < 1e-6
            mirror = LocationModel(n=model.n, theta=-model.theta, mu=model.mu)
            xs = rng.normal(0, 2, 50)
            xs = xs[np.abs(xs - atom) > 1e-6]
            diff = exact_dist.cdf_F(mirror, -xs) + exact_dist.cdf_F_left(model, xs) - 1.0
            worst_mirror = max(worst_mirror, float(np.max(np.abs(diff))))
        ok = ok and worst_jump <= 1e-10 and worst_mirror <= 1e-12
        return ok, f"jump error {worst_jump:.2e}, mirror error {worst_mirror:.2e}"

    def check_total_mass(self):
        rng = self.rng(6)
        worst = 0.0
        for _ in range(20):
            model = LocationModel(n=int(rng.integers(1, 1000)), theta=float(rng.normal(0, 0.5)),
                                  mu=float(rng.uniform(0.01, 0.5)))
            total = exact_dist.selection_prob(model) + exact_dist.continuous_mass(model)
            worst = max(worst, abs(total - 1.0))
        return worst <= 1e-6, f"max |mass - 1| {worst:.2e}"

    def check_density_derivative(self):
        model = LocationModel(n=10, theta=0.1, mu=0.05)
        h = 1e-6
        worst = 0.0
        for x in (-1.0, 0.2, 1.5):
            fd = (exact_dist.cdf_F(model, x + h) - exact_dist.cdf_F(model, x - h)) / (2 * h)
            worst = max(worst, abs(fd - exact_dist.density_f(model, x)))
        sym = LocationModel(n=25, theta=0.0, mu=0.2)
        even = max(abs(exact_dist.density_f(sym, v) - exact_dist.density_f(sym, -v)) for v in (0.5, 1.0, 2.0))
        return worst <= 1e-6 and even <= 1e-15, f"fd error {worst:.2e}, evenness {even:.1e}"

    def check_cdf_g_dual_form(self):
        rng = self.rng(7)
        worst_id = worst_w = 0.0
        for _ in range(200):
            model = LocationModel(n=int(rng.integers(1, 1000)), theta=float(rng.normal(0, 0.3)),
                                  mu=float(rng.uniform(0.01, 0.5)))
            x = float(rng.normal(0, 2))
            g = exact_dist.cdf_G(model, x)
            worst_id = max(worst_id, abs(g - exact_dist.cdf_F(model, model.sqrt_n_mu * x)))
            worst_w = max(worst_w, abs(g - exact_dist.cdf_G_w(model, x)))
        return worst_id <= 1e-14 and worst_w <= 1e-12, f"identity {worst_id:.1e}, w-form {worst_w:.1e}"

    def check_empirical_cdf(self):
        alpha = float(self.settings["dkw"]["alpha"])
        draws = int(self.profile["draws"])
        settings = [(10, 0.1, 0.05), (100, 0.05, 0.1), (50, -0.2, 0.3)]
        gaps = []
        for i, (n, th, mu) in enumerate(settings):
            res = exact_dist.empirical_cdf_gap(LocationModel(n=n, theta=th, mu=mu), draws, self.seed + i,
                                               np.linspace(-4, 4, 401), alpha)
            gaps.append(res["sup_gap"])
        band = exact_dist.dkw_halfwidth(draws, alpha)
        return max(gaps) <= band, f"gaps {[round(g, 5) for g in gaps]} band {band:.5f}"

    # asymptotics

    def check_regime_table(self):
        table = self.settings["regime_table"]
        n = int(table["n"])
        probes = np.asarray(table["probes"], dtype=float)
        tol = float(table["tolerance"])
        failures = []
        for mu_text, theta_text, tag, param in REGIME_TABLE:
            mu_seq, theta_seq = PowerLawSequence.parse(mu_text), ThetaSequence.parse(theta_text)
            limit = asymptotics.limit_F(None, mu_seq, theta_seq)
            label = f"mu={mu_text}, theta={theta_text}"
            if limit.tag is not tag:
                failures.append(f"{label}: got {limit.tag.value}")
                continue
            if param is not None:
                got = {LimitTag.POINT_MASS: limit.location.value, LimitTag.SHIFTED_NORMAL: limit.shift,
                       LimitTag.CONSERVATIVE_MIXTURE: limit.nu}[tag]
                if abs(got - param) > 1e-12:
                    failures.append(f"{label}: parameter {got} != {param}")
            model = LocationModel(n=n, theta=float(theta_seq.eval(n)), mu=float(mu_seq.eval(n)))
            pts = probes
            if tag in (LimitTag.ESCAPE_POS, LimitTag.ESCAPE_NEG) and theta_text.endswith("n^-1/3"):
                pts = np.concatenate([probes, ESCAPE_PROBES])
            gap = float(np.max(np.abs(exact_dist.cdf_F(model, pts) - limit.cdf(pts))))
            if gap > tol:
                failures.append(f"{label}: witness gap {gap:.4f}")
        return not failures, "; ".join(failures) or f"{len(REGIME_TABLE)} rows match"

    def check_conservative_convergence(self):
        x = np.linspace(-5, 5, 101)
        details = []
        ok = True
        mu_seq = PowerLawSequence(coef=1.0, exponent=0.5)
        for nu in (0.0, 1.0, -2.0):
            rows = asymptotics.convergence_table(mu_seq, ThetaSequence.power(nu, 0.5), self.n_grid, x)
            d = [r["sup_distance"] for r in rows]
            ok = ok and all(b <= a + 1e-12 for a, b in zip(d, d[1:])) and d[-1] < 5e-3
            details.append(f"nu={nu}: {d[-1]:.1e}")
        return ok, ", ".join(details)

    def check_g_limit_convergence(self):
        mu_seq = PowerLawSequence(coef=1.0, exponent=1 / 3)
        ok = True
        details = []
        for theta_seq in (ThetaSequence.power(0.5, 1 / 3), ThetaSequence.power(2.0, 1 / 3), ThetaSequence.constant(1.0)):
            atom = asymptotics.limit_G(mu_seq, theta_seq).location.value
            dist = []
            for n in self.n_grid:
                model = LocationModel(n=n, theta=float(theta_seq.eval(n)), mu=float(mu_seq.eval(n)))
                dist.append(max(exact_dist.cdf_G(model, atom - 0.25), 1 - exact_dist.cdf_G(model, atom + 0.25)))
            ok = ok and all(b < a for a, b in zip(dist, dist[1:])) and dist[-1] < 0.05
            details.append(f"atom {atom:+.2f}: {dist[-1]:.3f}")
        return ok, ", ".join(details)

    def check_oracle_reconciliation(self):
        x = np.linspace(-4, 4, 81)
        table = asymptotics.oracle_reconciliation(PowerLawSequence(coef=1.0, exponent=1 / 3), 1.0, 0.5, self.n_grid, x)
        fixed, moving = table["fixed_theta"], table["moving_theta"]
        ok = all(b < a for a, b in zip(fixed, fixed[1:])) and moving[-1] >= moving[0]
        limit = asymptotics.limit_F(None, PowerLawSequence(coef=1.0, exponent=0.25), ThetaSequence.constant(2.0))
        ok = ok and limit.tag is LimitTag.SHIFTED_NORMAL and limit.shift == 0.5
        return ok, f"fixed {fixed[-1]:.2e}, moving {moving[-1]:.3f}, r={limit.shift}"

    def check_selprob_limit(self):
        n = 10 ** 8
        cases = [
            ("n^-1/2", "0"), ("n^-1/2", "n^-1/2"), ("2*n^-1/2", "-1*n^-1/2"),
            ("n^-1/3", "0.5*n^-1/3"), ("n^-1/3", "2*n^-1/3"), ("n^-1/3", "0"),
            ("n^-1/3", "n^-1/3+0.5*n^-1/2"), ("n^-1/3", "n^-1/3-1*n^-1/2"),
        ]
        worst = 0.0
        for mu_text, theta_text in cases:
            mu_seq, theta_seq = PowerLawSequence.parse(mu_text), ThetaSequence.parse(theta_text)
            lim = asymptotics.selprob_limit(None, mu_seq, theta_seq).probability
            exact = exact_dist.selection_prob(LocationModel(n=n, theta=float(theta_seq.eval(n)), mu=float(mu_seq.eval(n))))
            worst = max(worst, abs(lim - exact))
        return worst <= 2e-3, f"max gap {worst:.2e}"

    def check_root_asymptotics(self):
        mu_seq = PowerLawSequence(coef=1.0, exponent=1 / 3)
        worst = 0.0
        for theta in (1.0, -1.0):
            for x in (0.0, 1.0):
                ratio = asymptotics.root_asymptotics_check(mu_seq, ThetaSequence.constant(theta), x, [10 ** 8])[0]
                worst = max(worst, abs(ratio - 1.0))
        return worst <= 1e-3, f"max |ratio - 1| {worst:.2e}"

    # cdf_estimation

    def check_oscillation(self):
        closed = cdf_estimation.oscillation(100, 0.1, 0.0)
        errs = [abs(cdf_estimation.oscillation_finite_delta(100, 0.1, 0.0, d) - closed) for d in (1e-2, 1e-4, 1e-6)]
        bound = cdf_estimation.theory_epsilon_bound(100, 0.1, 0.0)
        ok = abs(closed - 0.682689) < 1e-6 and errs[0] > errs[1] > errs[2] and errs[2] < 1e-4 \
            and bound == closed / 2 and cdf_estimation.oscillation(100, 1e-8, 0.0) <= 1e-7
        return ok, f"closed {closed:.6f}, finite-delta errors {[f'{e:.1e}' for e in errs]}"

    def check_trivial_tails(self):
        n = 10 ** 6
        mu = n ** (-1 / 3)
        up = cdf_estimation.trivial_estimator_tail_error(n, mu, 1.5)
        down = cdf_estimation.trivial_estimator_tail_error(n, mu, -1.5)
        return max(up, down) <= 0.02, f"t=1.5: {up:.2e}, t=-1.5: {down:.2e}"

    def check_worst_case(self):
        reps = int(self.profile["worst_case_reps"])
        boot_reps = 200 if self.full else 100
        results = {}
        results["pretest"] = cdf_estimation.worst_case_experiment(
            "pretest", 100, 0.1, 0.0, c=1.0, epsilon=0.3, grid_size=41, reps=reps, seed=self.seed
        ).sup_failure_prob
        # m = n/4 and m = n^{2/3}
        for label, m in (("bootstrap", 25), ("bootstrap_m_n23", int(100 ** (2 / 3)))):
            boot = CdfEstimatorSpec(kind=EstimatorKind.M_OUT_OF_N_BOOTSTRAP, subsample_size=m, bootstrap_reps=boot_reps)
            results[label] = cdf_estimation.worst_case_experiment(
                boot, 100, 0.1, 0.0, c=1.0, epsilon=0.3, grid_size=41 if self.full else 11,
                reps=reps if self.full else reps // 4, seed=self.seed
            ).sup_failure_prob
        rule = PowerLawSequence(coef=1.0, exponent=1 / 3)
        results["pretest_G"] = cdf_estimation.worst_case_experiment(
            "pretest", 100, float(rule.eval(100)), 0.0, c=1.0, epsilon=0.4, grid_size=41, reps=reps,
            seed=self.seed, scale=ScaleKind.INV_MU, mu_rule=rule
        ).sup_failure_prob
        ok = all(v >= 0.45 for v in results.values())
        return ok, ", ".join(f"{k}={v:.3f}" for k, v in results.items())

    # montecarlo

    def check_scaling_constants(self):
        c = montecarlo.scaling_constants(100, 4, 0.5)
        got = [c[0] * 3, c[1] * 1.5, c[2] / 10, c[3] / 10]
        want = [25.98, 11.62, 0.7746, 0.8660]
        design = montecarlo.build_design(100, 4, 0.5)
        omega = montecarlo.toeplitz_correlation(4, 0.5)
        ok = all(abs(g - w) < 5e-3 * max(1, w) for g, w in zip(got, want)) \
            and np.allclose(design.T @ design, 100 * omega, rtol=1e-10, atol=1e-10)
        return ok, f"{[round(g, 4) for g in got]}"

    def check_kde(self):
        sample = self.rng(8).standard_normal(10000)
        x, dens = montecarlo.kde_smooth(sample, 1.0)
        at_zero = float(np.interp(0.0, x, dens))
        _, half = montecarlo.kde_smooth(sample, 0.5)
        area = float(integrate.trapezoid(dens, x))
        ok = abs(at_zero - 0.3989) < 0.05 and np.allclose(half, 0.5 * dens) and abs(area - 1.0) < 1e-3
        return ok, f"density(0)={at_zero:.4f}, area={area:.5f}"

    def check_study(self):
        reps = int(self.profile["replications"])
        threshold = 0.95 if self.full else 0.9
        fixed_rule = PowerLawSequence(coef=1.0, exponent=1 / 3)
        base = StudyConfig(replications=reps, seed=self.seed, kde=False,
                           tuning=TuningChoice(kind=TuningKind.FIXED, mu_rule=fixed_rule))
        fixed = montecarlo.run_study(base)
        cv = montecarlo.run_study(base.model_copy(update={"tuning": TuningChoice(kind=TuningKind.CROSS_VALIDATED)}))
        zf_fixed, zf_cv = fixed.zero_frequencies(), cv.zero_frequencies()
        ok = fixed.failures == 0 and cv.failures == 0
        ok = ok and min(zf_fixed[2], zf_fixed[3]) >= threshold
        ok = ok and zf_cv[2] < zf_fixed[2] and zf_cv[3] < zf_fixed[3]
        ok = ok and cv.median_mu() < 100 ** (-1 / 3)
        gammas = (1.0, 2.0) if self.full else (2.0,)
        medians = []
        for gamma in gammas:
            shifted = montecarlo.run_study(base.model_copy(update={"gamma": gamma}))
            meds = [shifted.summaries[j].median_nonzero for j in (2, 3)]
            medians.append(meds)
            ok = ok and all(m is not None and m < 0 for m in meds)
        return ok, f"fixed {zf_fixed[2]:.3f}/{zf_fixed[3]:.3f}, cv {zf_cv[2]:.3f}/{zf_cv[3]:.3f}, medians {medians}"

    # runner

    def run(self, only: Optional[list[str]] = None) -> pd.DataFrame:
        unknown = sorted(set(only or []) - {name for name, _ in self.checks})
        if unknown:
            raise DomainError(f"Unknown check(s): {', '.join(unknown)}")
        rows = []
        for name, check in self.checks:
            if only and name not in only:
                continue
            start = time.perf_counter()
            try:
                passed, detail = check()
            except Exception as e:  # a crashing check is a failed check
                logger.exception("Check %s raised", name)
                passed, detail = False, f"{type(e).__name__}: {e}"
            elapsed = time.perf_counter() - start
            logger.info("%-28s %s (%.1fs) %s", name, "ok" if passed else "FAIL", elapsed, detail)
            rows.append({"check": name, "passed": bool(passed), "seconds": round(elapsed, 3), "detail": detail})
        return pd.DataFrame(rows, columns=["check", "passed", "seconds", "detail"])


def validate(profile: str = "quick", seed: int = 20081201, only: Optional[list[str]] = None) -> pd.DataFrame:
    """Run the suite; raises ValidationFailure carrying the table when any check fails."""
    table = InvariantSuite(profile, seed).run(only)
    failed = table.loc[~table["passed"], "check"].tolist()
    if failed:
        err = ValidationFailure(f"{len(failed)} check(s) failed: {', '.join(failed)}", failed)
        err.table = table
        raise err
    return table
