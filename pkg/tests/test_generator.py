import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tf1crack import (
    ColumnPrefix,
    Keystream,
    State,
    Tf1Params,
    WordSpec,
    default_params,
    demo_generalized_instance,
    generate,
    generate_from_instance,
    output_word,
    state_from_seed,
    tf1_instance,
    update,
)
from tf1crack.generator import (
    compute_s,
    instance_output,
    predicted_output_lsb,
    state_prefix,
    t2_tf1,
    truncated_t2,
    truncated_update,
)
from tf1crack.word import low_mask

from helpers import random_states

W4 = WordSpec(4)
W8 = WordSpec(8)
W16 = WordSpec(16)


def params4(c1=5, c3=3, c=1):
    return Tf1Params(c1=c1, c3=c3, c=c, spec=W4)


def test_params_validation():
    with pytest.raises(ValueError):
        Tf1Params(c1=0x10, c3=0, c=1, spec=W4)
    p = default_params(W8)
    assert p.c & 1 == 1
    assert p.c1 <= W8.mask and p.c3 <= W8.mask


def test_compute_s_examples():
    p = Tf1Params(c1=0, c3=0, c=0x53, spec=W8)
    assert compute_s(State(0, 7, 9, 3), p) == 0x53  # a=0 forces p=0
    assert compute_s(State(0xFF, 0xFF, 0xFF, 0xFF), p) == 0xAD
    assert compute_s(State(0xF, 0xF, 0xF, 0xF), params4()) == 0xF


def test_update_zero_state():
    for params in (params4(), default_params(W8), default_params(W16)):
        zero = State(0, 0, 0, 0)
        assert update(zero, params) == State(params.c, 0, 0, 0)


def test_update_hand_derived_vector():
    # w=4, C=1, C1=5, C3=3: s=1; rows give (1^1, 0^1, 2*3, 2*5) = (0, 1, 6, 10)
    assert update(State(1, 0, 0, 0), params4()) == State(0, 1, 6, 10)


def test_update_prefix_agreement():
    # two states agreeing on columns 1..3 update to states agreeing there
    params = default_params(W8)
    m = low_mask(3)
    x = State(0b10110101, 0b01110010, 0b11010110, 0b00101101)
    y = State(x.a ^ 0b11111000, x.b ^ 0b10101000, x.c ^ 0b01010000, x.d ^ 0b11100000)
    ux, uy = update(x, params), update(y, params)
    assert all((p & m) == (q & m) for p, q in zip(ux.words(), uy.words()))


def test_t2_examples():
    assert t2_tf1(State(0, 9, 0, 4), W8) == 0
    assert t2_tf1(State(0xFF, 0, 0x01, 0), W8) == 0
    assert t2_tf1(State(0x12, 0, 0x34, 0), W8) == 0x46


def test_output_word_examples():
    for b, d in ((0, 0), (3, 9), (0xFF, 0x80)):
        assert output_word(State(0xE0, b, 0x20, d), W8) == 0  # a+c wraps to 0
    assert output_word(State(1, 0, 0, 0), W8) == 0x10
    assert output_word(State(0x12, 0x05, 0x34, 0x0B), W8) == 0x64


def test_generate_examples():
    p = default_params(W8)
    assert len(generate(State(1, 2, 3, 4), p, 0)) == 0
    p_c1 = Tf1Params(c1=p.c1, c3=p.c3, c=1, spec=W8)
    assert generate(State(0, 0, 0, 0), p_c1, 1).words == (0x10,)
    a = generate(State(9, 9, 9, 9), p, 64)
    b = generate(State(9, 9, 9, 9), p, 64)
    assert a == b
    with pytest.raises(ValueError):
        generate(State(0, 0, 0, 0), p, -1)


def test_generate_matches_stepwise_evaluation():
    params = default_params(W16)
    seed = state_from_seed(123, W16)
    ks = generate(seed, params, 50)
    st = seed
    for word in ks.words:
        st = update(st, params)
        assert output_word(st, W16) == word


def test_truncated_update_full_width_equals_update():
    params = default_params(W8)
    for st in random_states(W8, 5, 200):
        full = state_prefix(update(st, params), 8)
        assert truncated_update(state_prefix(st, 8), params) == full


def test_truncated_update_single_column_zero_prefix():
    # all-zero one-column prefix with odd C: only the a column turns on
    params = default_params(W8)
    out = truncated_update(ColumnPrefix(1, 0, 0, 0, 0), params)
    assert out == ColumnPrefix(1, 1, 0, 0, 0)


def test_truncated_update_is_prefix_of_update():
    params = default_params(W16)
    from tf1crack.rng import SplitMix64

    rng = SplitMix64(99)
    for st in random_states(W16, 7, 500):
        l = 1 + rng.below(16)
        assert truncated_update(state_prefix(st, l), params) == state_prefix(update(st, params), l)


def test_truncated_t2():
    assert truncated_t2(ColumnPrefix(5, 0x11, 0, 0x0F, 0)) == 0  # (0x11+0x0F) mod 32
    st = State(0x12, 0, 0x34, 0)
    assert truncated_t2(state_prefix(st, 8)) == t2_tf1(st, W8)
    inst = demo_generalized_instance(W4, params4())
    assert truncated_t2(ColumnPrefix(4, 1, 3, 0, 2), inst) == ((1 + 0) & 0xF) ^ (3 & 2)


def test_predicted_output_lsb_contract():
    params = default_params(W8)
    inst = tf1_instance(params)
    k = W8.half + 1
    for st in random_states(W8, 13, 2_000):
        predicted = predicted_output_lsb(state_prefix(st, k), params)
        nxt = update(st, params)
        assert predicted == output_word(nxt, W8) & 1
        assert predicted == predicted_output_lsb(state_prefix(st, k), instance=inst)


def test_predicted_output_lsb_zero_state():
    params = Tf1Params(c1=0xD5, c3=0x15, c=1, spec=W8)
    # next state is (1,0,0,0), output 0x10, LSB 0
    assert predicted_output_lsb(state_prefix(State(0, 0, 0, 0), 8), params) == 0


def test_predicted_output_lsb_needs_enough_columns():
    params = default_params(W8)
    with pytest.raises(ValueError):
        predicted_output_lsb(ColumnPrefix(4, 0, 0, 0, 0), params)
    with pytest.raises(ValueError):
        predicted_output_lsb(ColumnPrefix(4, 0, 0, 0, 0))


def test_demo_instance_values():
    inst = demo_generalized_instance(W4, params4())
    assert inst.t2(State(0, 5, 0, 0)) == 0
    assert inst.t2(State(0, 0xF, 0, 0xF)) == 0xF
    assert inst.t2(State(1, 3, 0, 2)) == 3
    assert inst.f(State(1, 3, 0, 2)) == 1
    assert not inst.trivial_t2_preimages


def test_demo_instance_truncation_consistency():
    inst = demo_generalized_instance(W8, default_params(W8))
    from tf1crack.rng import SplitMix64

    rng = SplitMix64(4)
    for st in random_states(W8, 21, 2_000):
        l = 1 + rng.below(8)
        assert inst.t2_trunc(state_prefix(st, l)) == inst.t2(st) & low_mask(l)


def test_demo_instance_spec_mismatch():
    with pytest.raises(ValueError):
        demo_generalized_instance(W8, params4())


def test_tf1_instance_reproduces_generator():
    params = default_params(W8)
    inst = tf1_instance(params)
    for st in random_states(W8, 3, 300):
        assert instance_output(st, inst) == output_word(st, W8)
    seed = state_from_seed(8, W8)
    assert generate_from_instance(seed, inst, 64) == generate(seed, params, 64)


def test_state_from_seed_deterministic():
    assert state_from_seed(7, W16) == state_from_seed(7, W16)
    assert state_from_seed(7, W16) != state_from_seed(8, W16)
    st = state_from_seed(0xFFFF_FFFF_FFFF_FFFF, W4)
    assert all(v <= W4.mask for v in st.words())


def test_column_prefix_validation():
    with pytest.raises(ValueError):
        ColumnPrefix(3, 8, 0, 0, 0).validate()
    with pytest.raises(ValueError):
        ColumnPrefix(0, 0, 0, 0, 0).validate()
    ColumnPrefix(3, 7, 7, 7, 7).validate(W8)


def test_keystream_container():
    ks = Keystream(W8, (1, 2, 3))
    assert len(ks) == 3 and ks[1] == 2 and list(ks) == [1, 2, 3]


@given(st.integers(min_value=0, max_value=(1 << 64) - 1), st.integers(min_value=1, max_value=16))
@settings(max_examples=200)
def test_update_tfunction_property_hypothesis(noise, k):
    params = default_params(W16)
    x = state_from_seed(noise, W16)
    keep = low_mask(k)
    y = State(
        (x.a & keep) | (~noise & W16.mask & ~keep),
        x.b & keep,
        (x.c & keep) | (noise >> 7 & W16.mask & ~keep),
        x.d & keep,
    )
    ux, uy = update(x, params), update(y, params)
    assert all((p & keep) == (q & keep) for p, q in zip(ux.words(), uy.words()))
