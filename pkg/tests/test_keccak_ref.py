import hashlib
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sramhash import keccak_ref as kr
from sramhash.keccak_ref import KeccakState

from conftest import random_states

# Published Keccak-f[1600] output for the all-zero input state, lanes in x + 5y order.
KECCAK_F1600_ZERO = (
    0xF1258F7940E1DDE7, 0x84D5CCF933C0478A, 0xD598261EA65AA9EE, 0xBD1547306F80494D,
    0x8B284E056253D057, 0xFF97A42D7F8E6FD4, 0x90FEE5A0A44647C4, 0x8C5BDA0CD6192E76,
    0xAD30A6F71B19059C, 0x30935AB7D08FFC64, 0xEB5AA93F2317D635, 0xA9A6E6260D712103,
    0x81A57C16DBCF555F, 0x43B831CD0347C826, 0x01F22F1A11A5569F, 0x05E5635A21D9AE61,
    0x64BEFEF28CC970F2, 0x613670957BC46611, 0xB87C5A554FD00ECB, 0x8C3EE88A1CCF32C8,
    0x940C7922AE3A2614, 0x1841F924A2C509E4, 0x16F53526E70465C2, 0x75F644E97F30A13B,
    0xEAF1FF7B5CECA249,
)


def bit(s: KeccakState, x, y, z) -> int:
    return s[x % 5, y % 5] >> (z % s.w) & 1


def from_bits(f, w=64) -> KeccakState:
    lanes = []
    for y in range(5):
        for x in range(5):
            lanes.append(sum(f(x, y, z) << z for z in range(w)))
    # lanes were built row-major in y, which is x + 5y order
    return KeccakState(tuple(lanes), w)


def theta_bits(s):
    def parity(x, z):
        return bit(s, x, 0, z) ^ bit(s, x, 1, z) ^ bit(s, x, 2, z) ^ bit(s, x, 3, z) ^ bit(s, x, 4, z)
    return from_bits(lambda x, y, z: bit(s, x, y, z) ^ parity(x - 1, z) ^ parity(x + 1, z - 1), s.w)


def chi_bits(s):
    return from_bits(lambda x, y, z: bit(s, x, y, z) ^ ((1 - bit(s, x + 1, y, z)) & bit(s, x + 2, y, z)),
                     s.w)


def test_frozen_tables_match_generators():
    assert kr.round_constants(64) == kr.ROUND_CONSTANTS_64
    assert kr.rho_offsets(64) == kr.RHO_OFFSETS_64


@pytest.mark.parametrize("w,rounds", [(1, 12), (8, 18), (32, 22), (64, 24)])
def test_round_count(w, rounds):
    assert kr.num_rounds(w) == rounds
    assert len(kr.round_constants(w)) == rounds


def test_state_invariants():
    with pytest.raises(ValueError):
        KeccakState((0,) * 25, 3)
    with pytest.raises(ValueError):
        KeccakState((0,) * 24)
    with pytest.raises(ValueError):
        KeccakState((1 << 64,) + (0,) * 24)
    assert KeccakState.zeros(16).b == 400


def test_bytes_round_trip(rng):
    s = KeccakState.random(rng)
    assert KeccakState.from_bytes(s.to_bytes()) == s
    assert KeccakState.from_bytes(b"\x01" + bytes(199))[0, 0] == 1


# -- theta ---------------------------------------------------------------------

def test_theta_zero():
    assert kr.theta(KeccakState.zeros()) == KeccakState.zeros()


def test_theta_single_bit():
    s = KeccakState.zeros().with_lane(0, 0, 1)
    out = kr.theta(s)
    for y in range(5):
        # C[0] = bit 0 reaches sheet 1 directly and sheet 4 rotated by one
        assert out[1, y] == 0b01
        assert out[4, y] == 0b10
        assert out[2, y] == out[3, y] == 0
    assert out[0, 0] == 1 and all(out[0, y] == 0 for y in range(1, 5))
    assert out == theta_bits(s)


def test_theta_matches_bit_oracle():
    for s in random_states(1, 20):
        assert kr.theta(s) == theta_bits(s)
    for s in random_states(2, 5, w=8):
        assert kr.theta(s) == theta_bits(s)


def test_theta_leaves_input_alone(rng):
    s = KeccakState.random(rng)
    copy = KeccakState(s.lanes)
    kr.theta(s)
    assert s == copy


# -- rho -------------------------------------------------------------------------

def test_rho_zero_and_lane00():
    assert kr.rho(KeccakState.zeros()) == KeccakState.zeros()
    s = KeccakState.zeros().with_lane(0, 0, 0xDEADBEEF)
    assert kr.rho(s)[0, 0] == 0xDEADBEEF


def test_rho_lane_20_rotates_by_62():
    s = KeccakState.zeros().with_lane(2, 0, 1)
    assert kr.rho(s)[2, 0] == 1 << 62
    # rotating left by 62 is the same as right by 2
    assert kr.rotl(1, 62, 64) == (1 >> 2 | 1 << 62)


def test_rho_inverse(rng):
    s = KeccakState.random(rng)
    offs = kr.rho_offsets(64)
    back = KeccakState(tuple(kr.rotl(v, (64 - offs[i]) % 64, 64)
                             for i, v in enumerate(kr.rho(s).lanes)))
    assert back == s


# -- pi ----------------------------------------------------------------------------

def test_pi_uniform_state():
    s = KeccakState((0x1234,) * 25)
    assert kr.pi(s) == s


def test_pi_moves_lane_10_to_02():
    s = KeccakState.zeros().with_lane(1, 0, 0xABC)
    out = kr.pi(s)
    assert out[0, 2] == 0xABC
    assert sum(1 for v in out.lanes if v) == 1


def test_pi_order_by_brute_force():
    labeled = KeccakState(tuple(range(25)))
    # cycle structure of (x, y) -> (y, 2x+3y)
    cycles = []
    seen = set()
    for start in itertools.product(range(5), range(5)):
        if start in seen:
            continue
        length, cur = 0, start
        while True:
            seen.add(cur)
            cur = kr.pi_target(*cur)
            length += 1
            if cur == start:
                break
        cycles.append(length)
    assert sorted(cycles) == [1, 24]
    s = labeled
    for i in range(1, 25):
        s = kr.pi(s)
        assert (s == labeled) == (i == 24)


# -- chi / iota ----------------------------------------------------------------------

def test_chi_constant_states():
    assert kr.chi(KeccakState.zeros()) == KeccakState.zeros()
    ones = KeccakState(((1 << 64) - 1,) * 25)
    assert kr.chi(ones) == ones


def test_chi_matches_truth_table():
    for s in random_states(3, 20):
        assert kr.chi(s) == chi_bits(s)


def test_iota():
    z = KeccakState.zeros()
    rc0 = sum(kr.rc_bit(j) << ((1 << j) - 1) for j in range(7))
    assert kr.iota(z, 0)[0, 0] == rc0 == 1
    s = random_states(4, 1)[0]
    assert kr.iota(kr.iota(s, 5), 5) == s
    changed = [i for i, (a, b) in enumerate(zip(s.lanes, kr.iota(s, 3).lanes)) if a != b]
    assert changed == [0]
    with pytest.raises(IndexError):
        kr.iota(s, 24)
    with pytest.raises(IndexError):
        kr.iota(s, -1)


# -- permutation / sponge -----------------------------------------------------------------

def test_keccak_f_zero_kat():
    assert kr.keccak_f(KeccakState.zeros()).lanes == KECCAK_F1600_ZERO


def test_keccak_f_is_composition_of_steps(rng):
    s = KeccakState.random(rng)
    t = s
    for i in range(24):
        t = kr.iota(kr.chi(kr.pi(kr.rho(kr.theta(t)))), i)
    assert kr.keccak_f(s) == t


def test_keccak_f_changes_nonzero_inputs():
    for s in random_states(5, 10) + [KeccakState.zeros().with_lane(4, 4, 1)]:
        assert kr.keccak_f(s) != s


def test_keccak_f_32_runs_22_rounds():
    s = random_states(6, 1, w=32)[0]
    t = s
    for i in range(22):
        t = kr.keccak_round(t, i)
    assert kr.keccak_f(s) == t


@pytest.mark.parametrize("msg,digest", [
    (b"", "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a"),
    (b"abc", "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532"),
])
def test_sha3_known_answers(msg, digest):
    assert kr.sha3_256(msg).hex() == digest


def test_sha3_against_hashlib(rng):
    for n in [0, 1, 134, 135, 136, 137, 271, 272, 500, 1000]:
        m = bytes(rng.getrandbits(8) for _ in range(n))
        assert kr.sha3_256(m) == hashlib.sha3_256(m).digest()


def test_2168_bit_message_is_two_blocks():
    assert len(kr.split_blocks(bytes(271))) == 2
    assert all(len(b) == 136 for b in kr.split_blocks(bytes(271)))


def test_padding_edge():
    assert kr.pad_sha3(bytes(135))[-1] == 0x86
    assert len(kr.pad_sha3(bytes(136))) == 272


# -- linearity / bijectivity ----------------------------------------------------------------

lanes64 = st.lists(st.integers(0, (1 << 64) - 1), min_size=25, max_size=25)


@settings(max_examples=50, deadline=None)
@given(lanes64, lanes64)
def test_linear_steps(a, b):
    sa, sb = KeccakState(tuple(a)), KeccakState(tuple(b))
    for f in (kr.theta, kr.rho, kr.pi):
        assert f(sa ^ sb) == f(sa) ^ f(sb)


def test_rho_pi_are_bijections():
    r = random.Random(7)
    labels = KeccakState(tuple(1 << r.randrange(64) | 1 << i for i in range(25)))
    for f in (kr.rho, kr.pi):
        out = f(labels)
        assert sorted(bin(v).count("1") for v in out.lanes) == \
            sorted(bin(v).count("1") for v in labels.lanes)
    assert sorted(kr.pi(labels).lanes) == sorted(labels.lanes)
    others = random_states(8, 50)
    for f in (kr.rho, kr.pi):
        assert len({f(s) for s in others}) == 50
