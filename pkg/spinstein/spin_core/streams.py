"""
Counter-based random streams keyed by (seed, replica, substream).

Every stochastic operation receives one of these generators explicitly; nothing in the
package touches a global random state.
"""
import numpy as np


def make_stream(seed: int, replica: int = 0, substream: int = 0) -> np.random.Generator:
    """Philox generator for one replica; the same key always yields the same draws."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replica), int(substream)))
    return np.random.Generator(np.random.Philox(sequence))


def sample_categorical(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Draw an index from a probability vector by inverting its cumulative sum."""
    cumulative = np.cumsum(probs)
    index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    return min(index, len(cumulative) - 1)
