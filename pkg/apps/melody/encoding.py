from apps.context.concepts import AFFECT_ORDER
from .exceptions import EncodingError

THEME_BITS = 6
SITUATION_LENGTH = 2 * len(AFFECT_ORDER) + THEME_BITS


def activation_bin(level):
    """[0,25) -> 0, [25,50) -> 1, [50,75) -> 2, [75,100] -> 3."""
    if not 0.0 <= level <= 100.0:
        raise EncodingError(f"activation {level!r} outside [0, 100]")
    return min(3, int(level // 25))


def encode_environment(snapshot, theme_id):
    if not 0 <= theme_id < 2 ** THEME_BITS:
        raise EncodingError(f"theme id {theme_id!r} does not fit in {THEME_BITS} bits")
    affect_bits = "".join(f"{activation_bin(level):02b}" for level in snapshot.values())
    return affect_bits + f"{theme_id:0{THEME_BITS}b}"
