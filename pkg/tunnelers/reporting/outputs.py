import hashlib
import logging
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.10g'
SIGNED_FORMAT = '%+.10g'


class OutputWriter:
    """
    Writes the run outputs into one directory. Every file is written to a temporary file first and
    then renamed, and its sha256 checksum is recorded in `checksums_`.
    """

    def __init__(self, directory: Union[str, Path]):
        """

        :param directory: the output directory, created if needed
        """
        self.directory = Path(directory)
        self.checksums_: Dict[str, str] = {}

    def write_text(self, name: str, text: str, record: bool = True) -> Path:
        """
        Atomically writes text to directory / name

        :param name: the file name
        :param text: the content
        :param record: whether to record the checksum
        :return: the path of the written file
        """
        self.directory.mkdir(parents=True, exist_ok=True)
        data = text.encode('utf-8')
        target = self.directory / name
        handle, temporary = tempfile.mkstemp(dir=self.directory, prefix=f'.{name}.', suffix='.tmp')
        try:
            with os.fdopen(handle, 'wb') as stream:
                stream.write(data)
            os.replace(temporary, target)
        except BaseException:
            if os.path.exists(temporary):
                os.remove(temporary)
            raise
        if record:
            self.checksums_[name] = hashlib.sha256(data).hexdigest()
        logger.info('wrote %s', target)
        return target

    def write_frame(self, name: str, frame: pd.DataFrame, index: bool = False) -> Path:
        """
        Writes a DataFrame as CSV with a fixed float format
        """
        return self.write_text(name, frame.to_csv(index=index, float_format=FLOAT_FORMAT, lineterminator='\n'))

    def write_report(self, name: str, entries: Mapping[str, object]) -> Path:
        """
        Writes a key=value report, one entry per line
        """
        lines = [f'{key}={_format(value)}' for key, value in entries.items()]
        return self.write_text(name, '\n'.join(lines) + '\n')


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    if isinstance(value, (complex, np.complexfloating)):
        return f'{FLOAT_FORMAT % value.real}{SIGNED_FORMAT % value.imag}j'
    return str(value)


@dataclass(frozen=True)
class AcceptanceCheck:
    """
    One checked number: `value` compared with `expected` within `tolerance`, or against a bound
    when `relation` is '<=' or '>='.
    """
    name: str
    value: float
    expected: float
    tolerance: float = 0.
    relation: str = '~'
    passed: bool = False

    @classmethod
    def within(cls, name: str, value: Optional[float], expected: float, tolerance: float) -> 'AcceptanceCheck':
        passed = value is not None and bool(np.isfinite(value)) and bool(abs(value - expected) <= tolerance)
        return cls(name, _as_float(value), expected, tolerance, '~', passed)

    @classmethod
    def at_most(cls, name: str, value: Optional[float], bound: float) -> 'AcceptanceCheck':
        passed = value is not None and bool(np.isfinite(value)) and bool(value <= bound)
        return cls(name, _as_float(value), bound, 0., '<=', passed)

    @classmethod
    def at_least(cls, name: str, value: Optional[float], bound: float) -> 'AcceptanceCheck':
        passed = value is not None and bool(np.isfinite(value)) and bool(value >= bound)
        return cls(name, _as_float(value), bound, 0., '>=', passed)

    def describe(self) -> str:
        if self.relation == '~':
            band = f'{FLOAT_FORMAT % self.expected} +/- {FLOAT_FORMAT % self.tolerance}'
        else:
            band = f'{self.relation} {FLOAT_FORMAT % self.expected}'
        status = 'pass' if self.passed else 'FAIL'
        return f'{FLOAT_FORMAT % self.value} [{band}] {status}'

    def as_dict(self) -> Dict:
        return asdict(self)


def _as_float(value) -> float:
    return float('nan') if value is None else float(value)
