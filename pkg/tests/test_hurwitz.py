import numpy as np
import pytest

from app.exceptions import (
    BudgetExhausted,
    IndexOutOfRange,
    InvalidDictionary,
    InvariantViolation,
    StepFailure,
)
from app.models.factorization import Factorization, MoveStep, StepKind, TwistFactor
from app.models.mapping_class import GeneratorWord
from app.models.words import SurfaceSig
from app.utils.file_formats import parse_script


@pytest.fixture
def n3(catalog):
    return catalog.relation("N_3").factorization


@pytest.fixture
def n6(catalog):
    return catalog.relation("N_6").factorization


def standard(holes, names, target=None):
    factors = tuple(TwistFactor(name) for name in names)
    if target is None:
        target = tuple(range(1, holes + 1))
    return Factorization(SurfaceSig(1, holes), factors, target)


@pytest.mark.unit
@pytest.mark.parametrize("name", ["N_1", "N_2", "N_3", "N_4"])
def test_small_relations_hold(catalog, hurwitz_service, name):
    assert hurwitz_service.is_relation(catalog.relation(name).factorization)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["N_5", "N_6", "N_7", "N_8", "N_9", "S_8"])
def test_large_relations_hold(catalog, hurwitz_service, name):
    assert hurwitz_service.is_relation(catalog.relation(name).factorization)


@pytest.mark.unit
def test_non_relation(hurwitz_service):
    assert not hurwitz_service.is_relation(standard(1, ["a1", "b"] * 5))
    assert hurwitz_service.is_relation(standard(1, ["a1", "b"] * 6))


@pytest.mark.unit
def test_factor_word(hurwitz_service):
    factor = TwistFactor("b", GeneratorWord.parse("a1.~b2"))
    assert hurwitz_service.factor_word(factor).format() == "a1.~b2.b.b2.~a1"


@pytest.mark.unit
@pytest.mark.parametrize("direction", [StepKind.LEFT, StepKind.RIGHT])
def test_moves_preserve_product(hurwitz_service, n3, direction):
    product = hurwitz_service.product(n3)
    for position in range(1, len(n3)):
        moved = hurwitz_service.hurwitz_move(n3, position, direction)
        assert len(moved) == len(n3)
        assert hurwitz_service.product(moved).equals(product)


@pytest.mark.unit
def test_left_then_right_restores(hurwitz_service, n3):
    for position in (1, 4, 11):
        moved = hurwitz_service.hurwitz_move(n3, position, StepKind.LEFT)
        back = hurwitz_service.hurwitz_move(moved, position, StepKind.RIGHT)
        assert hurwitz_service.factorwise_equal(back, n3)


@pytest.mark.unit
def test_commuting_move_keeps_names(hurwitz_service):
    factorization = standard(3, ["a1", "a2"], target=())
    moved = hurwitz_service.hurwitz_move(factorization, 1, StepKind.LEFT)
    assert moved.labels == "a2 a1"


@pytest.mark.unit
def test_braid_move_is_renamed(hurwitz_service):
    factorization = standard(1, ["a1", "b", "a1"], target=())
    moved = hurwitz_service.hurwitz_move(factorization, 1, StepKind.LEFT)
    assert moved.factors[1] == TwistFactor("a1")
    assert moved.factors[0] != TwistFactor("b")
    assert hurwitz_service.product(moved).equals(hurwitz_service.product(factorization))


@pytest.mark.unit
@pytest.mark.parametrize("position", [0, 12, 13])
def test_move_out_of_range(hurwitz_service, n3, position):
    with pytest.raises(IndexOutOfRange):
        hurwitz_service.hurwitz_move(n3, position, StepKind.LEFT)


@pytest.mark.unit
def test_cyclic_rotate(hurwitz_service, n3):
    assert hurwitz_service.cyclic_rotate(n3, len(n3)) == n3
    rotated = hurwitz_service.cyclic_rotate(n3, 4)
    assert rotated.factors == n3.factors[4:] + n3.factors[:4]
    assert hurwitz_service.is_relation(rotated)
    with pytest.raises(InvariantViolation):
        hurwitz_service.cyclic_rotate(standard(2, ["a1"], target=(1,)), 1)


@pytest.mark.unit
def test_global_conjugate(hurwitz_service, n3):
    conjugated = hurwitz_service.global_conjugate(n3, GeneratorWord.parse("b"))
    assert hurwitz_service.is_relation(conjugated)
    assert hurwitz_service.global_conjugate(n3, GeneratorWord()) == n3


@pytest.mark.unit
def test_relabel_rotation_is_cyclic_rotation(hurwitz_service, symmetry_service, n6):
    relabeled = hurwitz_service.relabel(n6, symmetry_service.get("rot:6:1"))
    rotated = hurwitz_service.cyclic_rotate(n6, 2)
    assert hurwitz_service.factorwise_equal(relabeled, rotated)


@pytest.mark.unit
def test_cap_two_holes(catalog, hurwitz_service, symmetry_service):
    n2 = catalog.relation("N_2").factorization
    capped = hurwitz_service.cap(n2, 2, symmetry_service.get("cap:2:2"))
    assert capped.surface == SurfaceSig(1, 1)
    assert len(capped) == 12
    assert capped.target == (1,)
    assert hurwitz_service.is_relation(capped)


@pytest.mark.unit
def test_cap_errors(catalog, hurwitz_service, symmetry_service):
    n2 = catalog.relation("N_2").factorization
    with pytest.raises(IndexOutOfRange):
        hurwitz_service.cap(n2, 3, symmetry_service.get("cap:2:2"))
    with pytest.raises(InvalidDictionary):
        hurwitz_service.cap(n2, 1, symmetry_service.get("cap:2:2"))


@pytest.mark.unit
def test_replay_reports_failing_step(hurwitz_service, n3):
    script = parse_script("L 1\nL 40\n", "broken")
    with pytest.raises(StepFailure) as excinfo:
        hurwitz_service.replay(n3, script)
    assert excinfo.value.step_index == 2


@pytest.mark.unit
def test_replay_rejects_non_relation(hurwitz_service):
    with pytest.raises(StepFailure) as excinfo:
        hurwitz_service.replay(standard(1, ["a1", "b"]), parse_script("L 1"))
    assert excinfo.value.step_index == 0


@pytest.mark.unit
def test_replay_observer(hurwitz_service, n3):
    seen = []
    script = parse_script("L 1; R 1; ROT 3")
    final = hurwitz_service.replay(
        n3,
        script,
        observer=lambda index, step, current: seen.append((index, step.kind)),
    )
    assert seen == [(1, StepKind.LEFT), (2, StepKind.RIGHT), (3, StepKind.ROT)]
    assert script.kinds_used() == {StepKind.LEFT, StepKind.RIGHT, StepKind.ROT}
    assert hurwitz_service.factorwise_equal(final, hurwitz_service.cyclic_rotate(n3, 3))


@pytest.mark.unit
def test_search_identical(hurwitz_service, n3):
    assert len(hurwitz_service.search_equivalence(n3, n3)) == 0


@pytest.mark.unit
def test_search_rotation(hurwitz_service, n6):
    goal = hurwitz_service.cyclic_rotate(n6, 2)
    script = hurwitz_service.search_equivalence(n6, goal, budget=10000)
    assert script.steps == (MoveStep(StepKind.ROT, index=2),)
    assert hurwitz_service.factorwise_equal(hurwitz_service.replay(n6, script), goal)


@pytest.mark.unit
def test_search_finds_move(hurwitz_service, n3):
    goal = hurwitz_service.hurwitz_move(n3, 3, StepKind.RIGHT)
    script = hurwitz_service.search_equivalence(n3, goal, budget=100)
    assert len(script) >= 1
    assert hurwitz_service.factorwise_equal(hurwitz_service.replay(n3, script), goal)


@pytest.mark.unit
def test_search_budget(hurwitz_service, n3):
    goal = hurwitz_service.hurwitz_move(n3, 3, StepKind.RIGHT)
    with pytest.raises(BudgetExhausted) as excinfo:
        hurwitz_service.search_equivalence(n3, goal, budget=0)
    assert excinfo.value.explored == 0


@pytest.mark.unit
def test_search_length_mismatch(hurwitz_service, n3):
    with pytest.raises(InvariantViolation):
        hurwitz_service.search_equivalence(n3, n3.with_factors(n3.factors[:-1]))


def random_word(rng, names, length):
    tokens = [rng.choice(names) for _ in range(length)]
    return GeneratorWord.parse(
        ".".join(token if rng.random() < 0.5 else f"~{token}" for token in tokens)
    )


def round_trips(hurwitz_service, factorization, rng, count):
    inverse = {StepKind.LEFT: StepKind.RIGHT, StepKind.RIGHT: StepKind.LEFT}
    current = factorization
    for _ in range(count):
        position = rng.randint(1, len(current) - 1)
        direction = rng.choice([StepKind.LEFT, StepKind.RIGHT])
        moved = hurwitz_service.hurwitz_move(current, position, direction)
        back = hurwitz_service.hurwitz_move(moved, position, inverse[direction])
        assert hurwitz_service.factorwise_equal(back, current)
        current = moved
    return current


@pytest.mark.unit
def test_random_round_trips(hurwitz_service, n3, rng):
    walked = round_trips(hurwitz_service, n3, rng, 50)
    assert hurwitz_service.is_relation(walked)


@pytest.mark.slow
def test_random_round_trips_extended(hurwitz_service, n3, rng):
    walked = round_trips(hurwitz_service, n3, rng, 10000)
    assert hurwitz_service.is_relation(walked)


@pytest.mark.unit
def test_random_global_conjugations(hurwitz_service, n3, rng):
    names = ["a1", "a2", "a3", "b", "b1", "b2", "b3"]
    for _ in range(10):
        word = random_word(rng, names, rng.randint(1, 4))
        assert hurwitz_service.is_relation(hurwitz_service.global_conjugate(n3, word))


@pytest.mark.slow
def test_random_global_conjugations_extended(hurwitz_service, n3, rng):
    names = ["a1", "a2", "a3", "b", "b1", "b2", "b3"]
    for _ in range(1000):
        word = random_word(rng, names, rng.randint(1, 6))
        assert hurwitz_service.is_relation(hurwitz_service.global_conjugate(n3, word))


@pytest.mark.slow
def test_search_certificates_replay(hurwitz_service, n3, rng):
    for _ in range(5):
        goal = n3
        for _ in range(2):
            position = rng.randint(1, len(goal) - 1)
            direction = rng.choice([StepKind.LEFT, StepKind.RIGHT])
            goal = hurwitz_service.hurwitz_move(goal, position, direction)
        script = hurwitz_service.search_equivalence(n3, goal, budget=5000)
        final = hurwitz_service.replay(n3, script)
        assert hurwitz_service.factorwise_equal(final, goal)


def factor_matrices(hurwitz_service, factorization):
    mcg = hurwitz_service.mcg(factorization)
    return [
        mcg.homology_matrix(mcg.factor_twist(factor)) for factor in factorization.factors
    ]


def conjugacy_invariants(matrix):
    shifted = matrix - np.eye(len(matrix), dtype=matrix.dtype)
    return (
        int(np.trace(matrix)),
        int(np.linalg.matrix_rank(shifted)),
        int(np.gcd.reduce(np.abs(shifted).ravel())),
    )


@pytest.mark.unit
def test_moves_conjugate_homology(hurwitz_service, n3, rng):
    mcg = hurwitz_service.mcg(n3)
    current = n3
    for _ in range(20):
        position = rng.randint(1, len(current) - 1)
        direction = rng.choice([StepKind.LEFT, StepKind.RIGHT])
        moved = hurwitz_service.hurwitz_move(current, position, direction)
        before = factor_matrices(hurwitz_service, current)
        after = factor_matrices(hurwitz_service, moved)
        x, y = before[position - 1], before[position]
        if direction == StepKind.LEFT:
            x_inv = mcg.homology_matrix(
                mcg.factor_twist(current.factors[position - 1]).inverse()
            )
            assert np.array_equal(after[position - 1], x @ y @ x_inv)
            assert np.array_equal(after[position], x)
        else:
            y_inv = mcg.homology_matrix(
                mcg.factor_twist(current.factors[position]).inverse()
            )
            assert np.array_equal(after[position - 1], y)
            assert np.array_equal(after[position], y_inv @ x @ y)
        for index in set(range(len(current))) - {position - 1, position}:
            assert np.array_equal(after[index], before[index])
        assert sorted(map(conjugacy_invariants, before)) == sorted(
            map(conjugacy_invariants, after)
        )
        current = moved


@pytest.mark.unit
def test_factor_homology_is_multiplicative(hurwitz_service, n3, rng):
    mcg = hurwitz_service.mcg(n3)
    for _ in range(10):
        first, second = rng.sample(n3.factors, 2)
        f, g = mcg.factor_twist(first), mcg.factor_twist(second)
        assert np.array_equal(
            mcg.homology_matrix(f @ g), mcg.homology_matrix(f) @ mcg.homology_matrix(g)
        )


def cap_default(hurwitz_service, symmetry_service, factorization, hole):
    relabel = symmetry_service.get(f"cap:{factorization.surface.holes}:{hole}")
    return hurwitz_service.cap(factorization, hole, relabel)


@pytest.mark.slow
def test_cap_last_hole_of_n9(catalog, hurwitz_service, symmetry_service):
    n9 = catalog.relation("N_9").factorization
    capped = cap_default(hurwitz_service, symmetry_service, n9, 9)
    assert capped.labels == "a1 b1 b2 b3 a4 b4 b5 b6 a7 b7 b8 b"
    assert hurwitz_service.is_relation(capped)


@pytest.mark.slow
@pytest.mark.parametrize("first, second", [(1, 2), (3, 7), (8, 9)])
def test_caps_commute_on_n9(catalog, hurwitz_service, symmetry_service, first, second):
    n9 = catalog.relation("N_9").factorization
    one = cap_default(
        hurwitz_service,
        symmetry_service,
        cap_default(hurwitz_service, symmetry_service, n9, first),
        second - 1,
    )
    other = cap_default(
        hurwitz_service,
        symmetry_service,
        cap_default(hurwitz_service, symmetry_service, n9, second),
        first,
    )
    assert one.surface == other.surface == SurfaceSig(1, 7)
    assert hurwitz_service.factorwise_equal(one, other)
    assert hurwitz_service.is_relation(one)
