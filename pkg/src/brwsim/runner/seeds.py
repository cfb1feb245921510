"""Hierarchical seed derivation.

    medium_seed(k)       = H(master, MEDIUM_TAG, k)
    replicate_seed(k, i) = H(master, REPLICATE_TAG, k, i)

where ``H`` is ``brwsim.rng.hash_words``. Seeds depend only on their
indices, never on scheduling.
"""

from brwsim.rng import HASH_VERSION, hash_words

MEDIUM_TAG = 0x4D454449554D  # "MEDIUM"
REPLICATE_TAG = 0x5245504C  # "REPL"

SEED_RULE = (
    f"{HASH_VERSION}: medium_seed(k) = H(master, {MEDIUM_TAG:#x}, k); "
    f"replicate_seed(k, i) = H(master, {REPLICATE_TAG:#x}, k, i)"
)


def medium_seed(master_seed: int, k: int) -> int:
    return hash_words(master_seed, MEDIUM_TAG, k)


def replicate_seed(master_seed: int, k: int, i: int) -> int:
    return hash_words(master_seed, REPLICATE_TAG, k, i)


def derive_seeds(master_seed: int, k: int, i: int) -> tuple[int, int]:
    return medium_seed(master_seed, k), replicate_seed(master_seed, k, i)
