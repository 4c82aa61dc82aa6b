"""
Потоки случайных чисел на счётчиковом генераторе Philox.

Ключ потока (назначение, *ключи) добавляется к главному seed через spawn_key
SeedSequence, поэтому поток задачи зависит только от seed и своего ключа,
а не от порядка выполнения задач на воркерах.

    - make_stream:
        Вернуть numpy Generator для заданного ключа.
"""
import numpy as np

from smc_stability.common.constants import StreamPurpose


def make_stream(seed: int, purpose: StreamPurpose, *keys: int) -> np.random.Generator:
    """ Вернуть независимый поток для ключа (seed, purpose, *keys). """
    spawn_key = (int(purpose),) + tuple(int(key) for key in keys)
    sequence = np.random.SeedSequence(int(seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(sequence))
