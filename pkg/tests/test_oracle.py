import itertools
import random

import numpy as np
import pytest

from qborrow import elaborate_source
from qborrow.elaborator import QubitId
from qborrow.oracle import (
    BELL_CAP,
    EXHAUSTIVE_CAP,
    FIVE_STATES,
    RESTORE_CAP,
    STATE_MINUS,
    STATE_PLUS,
    STATE_PLUS_I,
    STATE_ZERO,
    OracleVerdict,
    TooManyQubits,
    apply_classical,
    bell_projector,
    check_bell_preservation,
    check_state_restoration,
    exhaustive_safe,
    pack_basis,
    permutation,
    reduced_density,
    simulate_statevector,
    unpack_basis,
)

from conftest import random_program


# --------------------------------------------------------------------------
# classical semantics


def test_apply_x():
    c = elaborate_source("borrow q[2];\nX[q[1]];")
    assert apply_classical(c, (0, 0)) == (1, 0)
    assert apply_classical(c, (1, 1)) == (0, 1)


def test_apply_cnot_truth_table():
    c = elaborate_source("borrow q[2];\nCNOT[q[1], q[2]];")
    table = {x: apply_classical(c, x) for x in itertools.product([0, 1], repeat=2)}
    assert table == {(0, 0): (0, 0), (0, 1): (0, 1), (1, 0): (1, 1), (1, 1): (1, 0)}


def test_apply_ccnot_truth_table():
    c = elaborate_source("borrow q[3];\nCCNOT[q[1], q[2], q[3]];")
    for x in itertools.product([0, 1], repeat=3):
        y = apply_classical(c, x)
        flip = x[0] and x[1]
        assert y == (x[0], x[1], x[2] ^ flip)


def test_apply_wrong_width():
    c = elaborate_source("borrow q[2];\nX[q[1]];")
    with pytest.raises(ValueError):
        apply_classical(c, (0, 0, 0))


# --------------------------------------------------------------------------
# index packing


def test_pack_is_big_endian():
    assert pack_basis((1, 0, 0)) == 4
    assert pack_basis((0, 0, 1)) == 1
    assert unpack_basis(4, 3) == (1, 0, 0)


def test_pack_unpack_round_trip():
    for n in (1, 3, 5):
        for i in range(1 << n):
            assert pack_basis(unpack_basis(i, n)) == i


def test_integer_order_is_lex_order():
    tuples = [unpack_basis(i, 3) for i in range(8)]
    assert tuples == sorted(tuples)


def test_permutation_matches_apply_classical():
    rng = random.Random(99)
    for _ in range(20):
        c = elaborate_source(random_program(rng, rng.randint(2, 6), rng.randint(1, 25)))
        values = permutation(c)
        n = c.n_qubits
        # bijection
        assert sorted(values.tolist()) == list(range(1 << n))
        for i in range(1 << n):
            assert values[i] == pack_basis(apply_classical(c, unpack_basis(i, n)))


# --------------------------------------------------------------------------
# exhaustive safety


def test_safe_four_toffoli(safe_circuit):
    assert exhaustive_safe(safe_circuit, safe_circuit.qubit("a")) == OracleVerdict(True)


def test_unsafe_three_toffoli(leaky_circuit):
    verdict = exhaustive_safe(leaky_circuit, leaky_circuit.qubit("a"))
    assert not verdict.safe
    assert verdict.witness == (0, 0, 0, 1, 0)  # q4 set, everything else clear


def test_witness_is_lex_smallest():
    c = elaborate_source("borrow q[2];\nCNOT[q[1], q[2]];")
    verdict = exhaustive_safe(c, c.qubit("q", 1))
    assert verdict.witness == (0, 0)


def test_identity_circuit_safe_everywhere():
    c = elaborate_source("borrow q[3];\nX[q[1]];\nX[q[1]];")
    for q in c.qubits:
        assert exhaustive_safe(c, q).safe


def test_x_gate_unsafe_for_its_target():
    c = elaborate_source("borrow q[2];\nX[q[2]];")
    assert exhaustive_safe(c, c.qubit("q", 1)).safe
    v = exhaustive_safe(c, c.qubit("q", 2))
    assert not v.safe and v.witness == (0, 0)


def test_exhaustive_cap():
    src = "borrow q[21];\nX[q[1]];"
    c = elaborate_source(src)
    with pytest.raises(TooManyQubits):
        exhaustive_safe(c, c.qubit("q", 1))
    assert EXHAUSTIVE_CAP == 20


# --------------------------------------------------------------------------
# statevector simulation


def test_simulate_permutes_amplitudes():
    c = elaborate_source("borrow q[2];\nCNOT[q[1], q[2]];")
    psi = np.array([0.1, 0.2, 0.3, 0.4], dtype=np.complex128)
    out = simulate_statevector(c, psi)
    # |10> -> |11>, |11> -> |10>
    assert np.allclose(out, [0.1, 0.2, 0.4, 0.3])


def test_simulate_preserves_norm():
    rng = np.random.default_rng(7)
    c = elaborate_source("borrow q[3];\nCCNOT[q[1], q[2], q[3]];\nX[q[2]];")
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    out = simulate_statevector(c, psi)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-12


def test_simulate_cap():
    c = elaborate_source("borrow q[15];\nX[q[1]];")
    with pytest.raises(TooManyQubits):
        simulate_statevector(c, np.zeros(1 << 15))


# --------------------------------------------------------------------------
# reduced density matrices


def q_at(gid, n):
    return QubitId("q", gid + 1, gid, f"q.{gid+1}")


def test_reduced_density_product_state():
    # |0> (x) |+> : qubit 0 is pure |0>, qubit 1 is pure |+>
    psi = np.array([1, 1, 0, 0], dtype=np.complex128) / np.sqrt(2)
    rho0 = reduced_density(psi, [q_at(0, 2)])
    assert np.allclose(rho0, [[1, 0], [0, 0]])
    rho1 = reduced_density(psi, [q_at(1, 2)])
    assert np.allclose(rho1, [[0.5, 0.5], [0.5, 0.5]])


def test_reduced_density_bell_marginals():
    psi = np.zeros(4, dtype=np.complex128)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    for gid in (0, 1):
        rho = reduced_density(psi, [q_at(gid, 2)])
        assert np.allclose(rho, np.eye(2) / 2)  # maximally mixed
    both = reduced_density(psi, [q_at(0, 2), q_at(1, 2)])
    assert np.allclose(both, bell_projector())
    # rank-1 projector
    eigs = np.linalg.eigvalsh(both)
    assert np.allclose(sorted(eigs), [0, 0, 0, 1])


def test_reduced_density_subset_order():
    # |01>: qubit 0 is |0>, qubit 1 is |1>; order of the subset matters
    psi = np.array([0, 1, 0, 0], dtype=np.complex128)
    rho = reduced_density(psi, [q_at(1, 2), q_at(0, 2)])
    expect = np.zeros((4, 4))
    expect[2, 2] = 1  # |1>|0> in subset order
    assert np.allclose(rho, expect)


def test_reduced_density_bad_subset():
    psi = np.zeros(4, dtype=np.complex128)
    psi[0] = 1
    with pytest.raises(ValueError):
        reduced_density(psi, [])
    with pytest.raises(ValueError):
        reduced_density(psi, [q_at(0, 2), q_at(1, 2), q_at(0, 2)])


# --------------------------------------------------------------------------
# restoration and Bell checks


def test_empty_circuit_restores_everything():
    c = elaborate_source("borrow q[2];\nX[q[2]];\nX[q[2]];")
    q1 = c.qubit("q", 1)
    for phi in FIVE_STATES.values():
        assert check_state_restoration(c, q1, phi)
    assert check_bell_preservation(c, q1)


def test_x_breaks_zero_but_not_plus():
    # X on the qubit itself: |0> goes to |1>, but |+> is an eigenstate
    c = elaborate_source("borrow q[2];\nX[q[1]];")
    q1 = c.qubit("q", 1)
    assert not check_state_restoration(c, q1, STATE_ZERO)
    assert check_state_restoration(c, q1, STATE_PLUS)
    assert check_state_restoration(c, q1, STATE_MINUS)
    assert not check_state_restoration(c, q1, STATE_PLUS_I)
    assert not check_bell_preservation(c, q1)


def test_cnot_control_restores_basis_but_not_plus(leaky_circuit):
    a = leaky_circuit.qubit("a")
    assert check_state_restoration(leaky_circuit, a, STATE_ZERO)
    assert not check_state_restoration(leaky_circuit, a, STATE_PLUS)
    assert not check_bell_preservation(leaky_circuit, a)


def test_safe_circuit_passes_all_checks(safe_circuit):
    a = safe_circuit.qubit("a")
    for phi in FIVE_STATES.values():
        assert check_state_restoration(safe_circuit, a, phi)
    assert check_bell_preservation(safe_circuit, a)


def test_restoration_requires_normalized_state():
    c = elaborate_source("borrow q;\nX[q];")
    with pytest.raises(ValueError):
        check_state_restoration(c, c.qubit("q"), (1.0, 1.0))


def test_restoration_and_bell_caps():
    c = elaborate_source(f"borrow q[{RESTORE_CAP + 1}];\nX[q[1]];")
    with pytest.raises(TooManyQubits):
        check_state_restoration(c, c.qubit("q", 1), STATE_ZERO)
    c = elaborate_source(f"borrow q[{BELL_CAP + 1}];\nX[q[1]];")
    with pytest.raises(TooManyQubits):
        check_bell_preservation(c, c.qubit("q", 1))


# --------------------------------------------------------------------------
# cross-validation against the generic simulate-and-reduce path


def naive_restoration(c, q, phi):
    """Reference implementation straight from the definition."""
    n = c.n_qubits
    phi = np.asarray(phi, dtype=np.complex128)
    target = np.outer(phi, phi.conj())
    others = [i for i in range(n) if i != q.gid]
    for env in itertools.product([0, 1], repeat=n - 1):
        psi = np.zeros(1 << n, dtype=np.complex128)
        for qbit in (0, 1):
            bits = [0] * n
            for pos, val in zip(others, env):
                bits[pos] = val
            bits[q.gid] = qbit
            psi[pack_basis(tuple(bits))] = phi[qbit]
        out = simulate_statevector(c, psi)
        rho = reduced_density(out, [q])
        if not np.allclose(rho, target, atol=1e-9):
            return False
    return True


def naive_bell(c, q):
    """Reference: simulate the circuit with an explicit extra partner qubit."""
    n = c.n_qubits
    values = permutation(c)
    partner = QubitId("partner", 1, n, "partner")
    others = [i for i in range(n) if i != q.gid]
    amp = 1 / np.sqrt(2)
    for env in itertools.product([0, 1], repeat=n - 1):
        psi = np.zeros(1 << (n + 1), dtype=np.complex128)
        for qbit in (0, 1):
            bits = [0] * n
            for pos, val in zip(others, env):
                bits[pos] = val
            bits[q.gid] = qbit
            psi[(pack_basis(tuple(bits)) << 1) | qbit] = amp
        out = np.zeros_like(psi)
        for i in range(1 << (n + 1)):
            out[(values[i >> 1] << 1) | (i & 1)] = psi[i]
        rho = reduced_density(out, [q, partner])
        if not np.allclose(rho, bell_projector(), atol=1e-9):
            return False
    return True


def test_restoration_matches_naive_path():
    rng = random.Random(4242)
    for _ in range(15):
        c = elaborate_source(random_program(rng, rng.randint(2, 5), rng.randint(1, 15)))
        for q in c.qubits:
            for phi in (STATE_ZERO, STATE_PLUS, STATE_PLUS_I):
                assert check_state_restoration(c, q, phi) == naive_restoration(c, q, phi)


def test_bell_matches_naive_path():
    rng = random.Random(2424)
    for _ in range(15):
        c = elaborate_source(random_program(rng, rng.randint(2, 5), rng.randint(1, 15)))
        for q in c.qubits:
            assert check_bell_preservation(c, q) == naive_bell(c, q)
