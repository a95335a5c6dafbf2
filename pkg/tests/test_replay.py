import numpy as np
import pytest

from gdr.errors import EmptyBufferError, InvalidInputError
from gdr.replay import ReplayBuffer, Transition


def tr(i, obs_dim=2, act_dim=1, done=False):
    return Transition(np.full(obs_dim, float(i)), np.full(act_dim, i / 100), float(i), np.full(obs_dim, i + 1.0), done)


def test_push_and_contents_in_order():
    buf = ReplayBuffer(5, 2, 1)
    for i in range(3):
        buf.push(tr(i))
    assert len(buf) == 3
    assert [t.reward for t in buf.contents()] == [0.0, 1.0, 2.0]


def test_ring_overwrites_oldest():
    buf = ReplayBuffer(3, 2, 1)
    buf.extend(tr(i) for i in range(7))
    assert len(buf) == 3 and buf.capacity == 3
    assert [t.reward for t in buf.contents()] == [4.0, 5.0, 6.0]
    assert buf.cursor == 1


def test_done_round_trip():
    buf = ReplayBuffer(2, 2, 1)
    buf.push(tr(0, done=True))
    buf.push(tr(1))
    assert [t.done for t in buf.contents()] == [True, False]


def test_sample_shapes_and_membership():
    buf = ReplayBuffer(10, 2, 1)
    buf.extend(tr(i) for i in range(4))
    b = buf.sample(50, np.random.default_rng(0))
    assert b.states.shape == (50, 2) and b.actions.shape == (50, 1) and b.rewards.shape == (50,)
    assert set(b.rewards) <= {0.0, 1.0, 2.0, 3.0}
    np.testing.assert_array_equal(b.next_states[:, 0], b.rewards + 1)


def test_empty_and_invalid():
    buf = ReplayBuffer(4, 2, 1)
    with pytest.raises(EmptyBufferError):
        buf.sample(1, np.random.default_rng(0))
    with pytest.raises(InvalidInputError):
        buf.push(tr(0, obs_dim=3))
    with pytest.raises(InvalidInputError):
        buf.push(Transition(np.zeros(2), np.zeros(1), np.inf, np.zeros(2), False))
    with pytest.raises(InvalidInputError):
        ReplayBuffer(0, 2, 1)


def test_stored_values_are_copies():
    buf = ReplayBuffer(2, 2, 1)
    s = np.zeros(2)
    buf.push(Transition(s, np.zeros(1), 0.0, s, False))
    s[0] = 9.0
    assert buf.contents()[0].state[0] == 0.0


@pytest.mark.parametrize("capacity, first, second", [(5, 3, 4), (5, 0, 12), (7, 7, 7), (3, 2, 1), (4, 9, 0)])
def test_extend_matches_push(capacity, first, second):
    a = ReplayBuffer(capacity, 2, 1)
    b = ReplayBuffer(capacity, 2, 1)
    for chunk in (range(first), range(100, 100 + second)):
        for i in chunk:
            a.push(tr(i, done=i % 3 == 0))
        b.extend(tr(i, done=i % 3 == 0) for i in chunk)
    assert (a.size, a.cursor) == (b.size, b.cursor)
    assert [(t.reward, t.done) for t in a.contents()] == [(t.reward, t.done) for t in b.contents()]
    np.testing.assert_array_equal(a.sample(20, np.random.default_rng(0)).states,
                                  b.sample(20, np.random.default_rng(0)).states)


def test_extend_rejects_bad_block_without_writing():
    buf = ReplayBuffer(5, 2, 1)
    with pytest.raises(InvalidInputError):
        buf.extend([tr(0), tr(1, obs_dim=3)])
    with pytest.raises(InvalidInputError):
        buf.extend([tr(0), Transition(np.zeros(2), np.zeros(1), np.nan, np.zeros(2), False)])
    assert len(buf) == 0
