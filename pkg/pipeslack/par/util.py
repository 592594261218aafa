# -*- coding: utf-8 -*-
"""
Utility functions for pipeslack parameter sets.
"""
import ast


def _eval_ignore():
    """Provides a list of strings that should not be evaluated."""
    return [ 'open', 'file', 'dict', 'list', 'tuple' ]


def _evaluate(value, ignore):
    if value in ignore:
        return value
    try:
        return ast.literal_eval(value)
    except (ValueError, SyntaxError):
        return value


def recursive_dict_evaluate(d):
    """
    Recursively evaluate each string in the provided dictionary.

    A raw read of a configuration file with `ConfigObj` gives strings
    or lists of strings, while the ``from_dict`` methods of the
    parameter sets expect typed values (e.g. ``d['n_process'] = 2``
    instead of ``'2'``).  Values that are not Python literals, or that
    are listed by :func:`_eval_ignore`, are returned unchanged.

    Args:
        d (dict):
            Dictionary of values to evaluate; modified in place.

    Returns:
        dict: The input dictionary with evaluated values.
    """
    ignore = _eval_ignore()
    for k in d.keys():
        if isinstance(d[k], dict):
            d[k] = recursive_dict_evaluate(d[k])
        elif isinstance(d[k], list):
            d[k] = [ _evaluate(v, ignore) for v in d[k] ]
        elif isinstance(d[k], str):
            d[k] = _evaluate(d[k], ignore)
    return d
