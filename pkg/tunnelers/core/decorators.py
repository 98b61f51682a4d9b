import functools
from enum import Enum

import numpy as np


class MomentumInputType(Enum):
    SCALAR = 1
    ARRAY = 2


def momentum_API(func):
    """
    Ensures the momentum (second positional argument, after the configuration) can be worked on
    using the numpy API.
    If the momentum is a python or numpy scalar, it is cast to a 0-d array, the function is called,
    and scalar results are restored (complex or float), so that callers can pass either a single
    momentum or a whole grid.
    """

    @functools.wraps(func)
    def wrapper(cfg, k, *args, **kwargs):
        input_type = MomentumInputType.ARRAY
        if np.ndim(k) == 0:
            input_type = MomentumInputType.SCALAR
        k = np.asarray(k)
        result = func(cfg, k, *args, **kwargs)
        if input_type == MomentumInputType.SCALAR:
            result = _restore_scalar(result)
        return result

    return wrapper


def _restore_scalar(result):
    if isinstance(result, tuple):
        return tuple(_restore_scalar(r) for r in result)
    if isinstance(result, np.ndarray) and result.ndim == 0:
        return result.item()
    return result
