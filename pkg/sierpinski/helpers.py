# -*- coding: utf-8 -*-

"""
Small argument validation and lookup helpers shared by every module.
"""

import enum
import typing

from fuzzywuzzy.process import extractOne

MIN_SUGGESTION_SCORE = 70
"""
minimal fuzzy match score for a "did you mean" suggestion.
"""


def validate_enum_arg(
    enum_class: typing.Type[enum.Enum],
    attr: str,
    value: enum.Enum,
):
    if not isinstance(value, enum_class):
        raise TypeError(
            (
                "param '{}' validation error: "
                "'{}' is not a valid {} type!"
            ).format(attr, value, enum_class)
        )

    if value not in enum_class:  # pragma: no cover
        raise ValueError(
            (
                "param '{}' validation error: "
                "'{}' is not a valid {} value!"
            ).format(attr, value, enum_class)
        )


def suggest(name: str, choices: typing.Iterable[str]) -> typing.Optional[str]:
    """
    Find the closest candidate of ``name`` in ``choices``.

    :return: the best match, or None if nothing is close enough.
    """
    choices = list(choices)
    if not choices:
        return None
    best, score = extractOne(name, choices)
    if score >= MIN_SUGGESTION_SCORE:
        return best
    return None


def unknown_name_message(what: str, name: str, choices: typing.Iterable[str]) -> str:
    """
    Build the "unknown xxx" message, with a suggestion when one exists.
    """
    choices = sorted(choices)
    msg = "unknown {} '{}'".format(what, name)
    best = suggest(name, choices)
    if best is not None:
        msg += ", did you mean '{}'?".format(best)
    else:
        msg += ", choose from: {}".format(", ".join(choices))
    return msg


def enum_by_value(
    enum_class: typing.Type[enum.Enum],
    attr: str,
    value: typing.Union[str, enum.Enum],
) -> enum.Enum:
    """
    Resolve an enum member from its string value (CLI / config form).
    """
    if isinstance(value, enum_class):
        return value
    for member in enum_class:
        if member.value == value:
            return member
    raise ValueError(
        "param '{}' validation error: {}".format(
            attr,
            unknown_name_message(attr, str(value), [m.value for m in enum_class]),
        )
    )
