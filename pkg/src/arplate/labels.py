"""The 26-class label map for Egyptian plate characters.

Class ids 0-8 are the Eastern Arabic digits 1-9 (plate numbers never
contain zero); ids 9-25 are the restricted 17-letter alphabet used on
plates, each with the Latin transliteration key published for it.
"""
from __future__ import annotations

DIGITS = "١٢٣٤٥٦٧٨٩"
LETTERS = "أبجدرسصطعفقلمنهوي"
LETTER_LATIN = ["A", "B", "G", "D", "R", "S", "C", "T", "E", "F", "K", "L", "M", "N", "H", "W", "Y"]

N_CLASSES = 26
DIGIT_IDS = tuple(range(9))
LETTER_IDS = tuple(range(9, 26))

ID_TO_CHAR = {i: DIGITS[i] for i in DIGIT_IDS}
ID_TO_CHAR.update({9 + i: LETTERS[i] for i in range(17)})

ID_TO_LATIN = {i: str(i + 1) for i in DIGIT_IDS}
ID_TO_LATIN.update({9 + i: LETTER_LATIN[i] for i in range(17)})

CHAR_TO_ID = {c: i for i, c in ID_TO_CHAR.items()}
LATIN_TO_ID = {k: i for i, k in ID_TO_LATIN.items()}

assert len(ID_TO_CHAR) == N_CLASSES
assert len(CHAR_TO_ID) == N_CLASSES
assert len(LATIN_TO_ID) == N_CLASSES


def is_digit_id(class_id: int) -> bool:
    return 0 <= class_id < 9


def is_letter_id(class_id: int) -> bool:
    return 9 <= class_id < 26


def char_to_id(char: str) -> int:
    try:
        return CHAR_TO_ID[char]
    except KeyError:
        raise ValueError(f"character {char!r} is not in the plate alphabet") from None


def id_to_char(class_id: int) -> str:
    try:
        return ID_TO_CHAR[class_id]
    except KeyError:
        raise ValueError(f"class id {class_id} out of range") from None


def id_to_latin(class_id: int) -> str:
    try:
        return ID_TO_LATIN[class_id]
    except KeyError:
        raise ValueError(f"class id {class_id} out of range") from None


def transliterate(text: str) -> str:
    """Arabic plate characters to their Latin keys, one for one."""
    return "".join(ID_TO_LATIN[char_to_id(c)] for c in text)
