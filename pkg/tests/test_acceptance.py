"""Acceptance gate: the eleven primary criteria at their stated tolerances.

Each test prints the underlying check line (run pytest with -s to see the
observed values) and asserts the pass flag, so a failure reports the
observed quantity against its tolerance.
"""

import time

from gsqg.verify import (
    check_adjoint_identity,
    check_heat_oracles,
    check_inviscid_conservation,
    check_representation_equivalence,
    check_representation_identity,
    check_tensor_structure,
    check_uniform_l2,
    check_viscous_balances,
    check_weak_continuity,
    check_weak_residual,
    run_suite,
)


def _assert_check(result):
    print(result.line())
    assert result.passed, result.line()
    return result


def test_acceptance_01_tensor_structure():
    r = _assert_check(check_tensor_structure(m=100))
    assert r.elapsed < 30.0


def test_acceptance_02_inviscid_conservation():
    _assert_check(check_inviscid_conservation(m=64, T=1.0))


def test_acceptance_03_viscous_balances():
    _assert_check(check_viscous_balances(m=64, T=1.0))


def test_acceptance_04_heat_kernel_oracles():
    _assert_check(check_heat_oracles())


def test_acceptance_05_representation_identity():
    _assert_check(check_representation_identity(level="full"))


def test_acceptance_06_representation_equivalence():
    _assert_check(check_representation_equivalence())


def test_acceptance_07_adjoint_identity():
    _assert_check(check_adjoint_identity())


def test_acceptance_08_uniform_l2_bound():
    _assert_check(check_uniform_l2())


def test_acceptance_09_weak_residual():
    _assert_check(check_weak_residual())


def test_acceptance_10_weak_continuity_decomposition():
    _assert_check(check_weak_continuity())


def test_acceptance_11_verify_suite_runtimes():
    t0 = time.time()
    quick = run_suite("quick")
    t_quick = time.time() - t0
    assert all(r.passed for r in quick)
    assert t_quick < 60.0

    t0 = time.time()
    full = run_suite("full")
    t_full = time.time() - t0
    assert all(r.passed for r in full)
    assert t_full < 900.0
    print(f"verify quick {t_quick:.1f}s, full {t_full:.1f}s")
