import math

import numpy as np
import pytest

from quantcs.model import (
    MODES,
    PriorConfig,
    Problem,
    SolverConfig,
    problem_from_bytes,
    problem_hash,
    problem_to_bytes,
)
from quantcs.problem_gen import GenSpec, gen_problem
from quantcs.quantizer import error_domain, make_onebit, make_uniform, quantize


def small_problem(kind="uniform", seed=0, snr=30.0):
    spec = GenSpec(N=24, K=3, M=12, snr_db=snr, quantizer_kind=kind,
                   bit_depth=1 if kind == "one-bit" else 3, rng_seed=seed)
    return gen_problem(spec)


class TestPriorConfig:
    def test_defaults(self):
        p = PriorConfig()
        assert (p.eps, p.c, p.d) == (0.0, 1.0, 0.0)

    def test_eps_range(self):
        with pytest.raises(ValueError):
            PriorConfig(eps=1.5)

    def test_degenerate_rate_prior_rejected(self):
        with pytest.raises(ValueError):
            PriorConfig(eps=0.0, c=0.0)


class TestSolverConfig:
    def test_defaults(self):
        c = SolverConfig()
        assert c.pruning_threshold == 1e4
        assert c.tol == 1e-5
        assert c.max_iters == 2000
        assert c.onebit_variance_scale == 1e-3

    def test_mode_names(self):
        assert set(MODES) == {"multi-bit", "one-bit", "coupled-baseline", "oracle"}
        with pytest.raises(ValueError):
            SolverConfig(mode="qvmp-ish")

    def test_guards(self):
        with pytest.raises(ValueError):
            SolverConfig(tol=0.0)
        with pytest.raises(ValueError):
            SolverConfig(max_iters=0)
        with pytest.raises(ValueError):
            SolverConfig(pruning_threshold=1.0)


class TestProblemValidation:
    def test_dimension_mismatch_names_field(self):
        q = make_uniform(2, 1.0)
        y = np.array([0.3, -0.2])
        z, bins = quantize(q, y)
        with pytest.raises(ValueError, match="z has shape"):
            Problem(A=np.eye(3), z=z, sigma2=0.1, quantizer=q,
                    error_domain=error_domain(q, bins))

    def test_foreign_code_rejected_with_index(self):
        q = make_uniform(2, 1.0)
        z, bins = quantize(q, np.array([0.3, -0.2]))
        z = z.copy()
        z[1] = 0.11
        with pytest.raises(ValueError, match=r"z\[1\]"):
            Problem(A=np.eye(2), z=z, sigma2=0.1, quantizer=q,
                    error_domain=error_domain(q, bins))

    def test_onebit_requires_zero_observation(self):
        q = make_onebit()
        _, bins = quantize(q, np.array([0.5, -0.5]))
        with pytest.raises(ValueError, match=r"z\[0\]"):
            Problem(A=np.eye(2), z=np.array([1.0, 0.0]), sigma2=0.1,
                    quantizer=q, error_domain=error_domain(q, bins))

    def test_arrays_frozen(self):
        problem = small_problem()
        with pytest.raises(ValueError):
            problem.A[0, 0] = 7.0

    def test_noise_free_sigma_allowed(self):
        problem = small_problem(snr=math.inf)
        assert problem.sigma2 == 0.0


class TestSerialization:
    @pytest.mark.parametrize("kind", ["uniform", "saturated", "one-bit"])
    def test_roundtrip_bit_exact(self, kind):
        problem = small_problem(kind=kind, seed=5)
        blob = problem_to_bytes(problem)
        back = problem_from_bytes(blob)
        assert np.array_equal(back.A, problem.A)
        assert np.array_equal(back.z, problem.z)
        assert back.sigma2 == problem.sigma2
        assert back.quantizer == problem.quantizer
        assert np.array_equal(back.truth, problem.truth)
        assert np.array_equal(back.y, problem.y)
        if kind == "one-bit":
            assert np.array_equal(
                back.error_domain.signs_array(), problem.error_domain.signs_array()
            )
        else:
            assert back.error_domain.intervals == problem.error_domain.intervals
        assert problem_to_bytes(back) == blob

    def test_hash_is_stable_and_content_bound(self):
        a = small_problem(seed=1)
        b = small_problem(seed=1)
        c = small_problem(seed=2)
        assert problem_hash(a) == problem_hash(b)
        assert problem_hash(a) != problem_hash(c)

    def test_rejects_foreign_bytes(self):
        with pytest.raises(ValueError, match="magic"):
            problem_from_bytes(b"not a container")
