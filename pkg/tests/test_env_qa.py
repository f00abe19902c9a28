import json

import numpy as np
import pytest

from textenvs.core import EnvConfig, EpisodeFinished, InvalidSample, QASample, Sample
from textenvs.envs import ANS_ACTION, CONT_ACTION, QAEnv
from textenvs.featurize import hash_store
from textenvs.envs.qa import QAFeaturizer

from transcript_data import QA_EPISODES


def make_sample(choices, answer_key, sid="q0"):
    return QASample(
        id=sid,
        input_text="the question",
        oracle_label=[answer_key],
        question="the question",
        facts=["a fact", "another fact"],
        choices=dict(choices),
        answer_key=answer_key,
    )


def make_env(kind="informed"):
    return QAEnv(featurizer=QAFeaturizer(hash_store(8), kind))


def drive_to(env, sample, selected_key):
    obs = env.reset(sample)
    keys = sample.choice_keys
    rewards = []
    for key in keys:
        action = ANS_ACTION if key == selected_key else CONT_ACTION
        obs, r, done, info = env.step(env.action_space.action_to_ix(action))
        rewards.append(r)
        if done:
            break
    return rewards, done, info


@pytest.mark.parametrize("name,choices,answer,selected,want", QA_EPISODES,
                         ids=[e[0] for e in QA_EPISODES])
def test_transcript_indicators(name, choices, answer, selected, want):
    env = make_env()
    rewards, done, _ = drive_to(env, make_sample(choices, answer), selected)
    assert done
    assert rewards[-1] == want
    assert all(r == 0.0 for r in rewards[:-1])
    assert env.total_reward == want


def test_demo_wrong_answer_on_second_choice():
    env = make_env()
    sample = make_sample({"A": "energy", "B": "destroy matter"}, "A")
    env.reset(sample)
    _, r, done, _ = env.step(env.action_space.action_to_ix("CONTINUE"))
    assert (r, done) == (0.0, False)
    _, r, done, _ = env.step(env.action_space.action_to_ix("ANSWER"))
    assert (r, done) == (0.0, True)
    assert env.total_reward == 0.0


def test_cont_past_last_choice_terminates():
    env = make_env()
    sample = make_sample({k: f"c{k}" for k in "ABCDEFGH"}, "A")
    env.reset(sample)
    rewards = []
    for _ in range(8):
        _, r, done, info = env.step(env.action_space.action_to_ix(CONT_ACTION))
        rewards.append(r)
    assert done
    assert info == {"ran_out_of_choices": "true"}
    assert sum(rewards) == 0.0
    with pytest.raises(EpisodeFinished):
        env.step(0)


def test_single_choice_sample_rejected():
    env = make_env()
    with pytest.raises(InvalidSample):
        env.reset(make_sample({"A": "only"}, "A"))


def test_non_qa_sample_rejected():
    env = make_env()
    with pytest.raises(InvalidSample):
        env.reset(Sample("plain", "text", ["A"]))


def test_informed_observation_is_2d():
    env = make_env("informed")
    obs = env.reset(make_sample({"A": "x", "B": "y"}, "A"))
    assert env.observation_dim() == 2
    assert len(obs.vector) == 2


def test_simple_observation_is_3d_of_store():
    env = make_env("simple")
    assert env.observation_dim() == 24  # 3 * dim 8
    obs = env.reset(make_sample({"A": "x", "B": "y"}, "A"))
    assert len(obs.vector) == 24


def test_episode_length_bounded_by_choices():
    env = make_env()
    sample = make_sample({"A": "1", "B": "2", "C": "3"}, "B")
    env.reset(sample)
    steps = 0
    while not env.done:
        env.step(env.action_space.action_to_ix(CONT_ACTION))
        steps += 1
    assert steps <= len(sample.choices)


def test_action_space_is_binary_with_aliases():
    env = make_env()
    assert env.action_space.actions == [ANS_ACTION, CONT_ACTION]
    assert env.action_space.action_to_ix("ANSWER") == env.action_space.action_to_ix("ANS")


def test_render_step_layout(capsys):
    env = make_env()
    env.reset(make_sample({"A": "energy", "B": "matter"}, "A"))
    env.render()
    out = capsys.readouterr().out
    assert "Step 0" in out
    assert "Question: the question" in out
    assert "Fact: a fact" in out
    assert "Choice A: energy" in out


def test_transcript_shape(capsys):
    env = make_env()
    sample = make_sample({"A": "x", "B": "y"}, "B", sid="t")
    drive_to(env, sample, "B")
    env.render()
    printed = json.loads(capsys.readouterr().out)
    assert set(printed) == {
        "question", "facts", "choices", "true_label", "predicted_label", "total_reward",
    }
    assert printed["predicted_label"] == "B"
    assert printed["total_reward"] == 1.0


def test_seeded_choice_shuffle():
    sample = make_sample({k: f"c{k}" for k in "ABCD"}, "A")
    env = QAEnv(
        featurizer=QAFeaturizer(hash_store(8), "informed"),
        config=EnvConfig(seed=11),
        shuffle_choices=True,
    )
    env.reset(sample)
    order1 = list(env.choice_keys)
    env2 = QAEnv(
        featurizer=QAFeaturizer(hash_store(8), "informed"),
        config=EnvConfig(seed=11),
        shuffle_choices=True,
    )
    env2.reset(sample)
    assert order1 == list(env2.choice_keys)
    assert sorted(order1) == list("ABCD")
