import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List

import tunnelers
from tunnelers.core.exceptions import ConfigurationError
from tunnelers.core.pipeline import Pipeline
from tunnelers.reporting.config import RunConfig
from tunnelers.reporting.outputs import OutputWriter
from tunnelers.reporting.stages import (AcceptanceStage, FitStage, PolesStage, SnapshotStage, StationaryStage,
                                        TimesStage, TraceStage)

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'

# stages run by every command, in order
COMMANDS = {
    'snapshot': ('snapshot',),
    'trace': ('trace',),
    'fit': ('trace', 'fit'),
    'times': ('trace', 'fit', 'times'),
    'stationary': ('stationary',),
    'poles': ('poles',),
    'all': ('snapshot', 'stationary', 'trace', 'fit', 'times', 'poles'),
}

STAGES = {
    'snapshot': SnapshotStage,
    'trace': TraceStage,
    'fit': FitStage,
    'times': TimesStage,
    'stationary': StationaryStage,
    'poles': PolesStage,
}


@dataclass
class RunManifest:
    """
    Record of a run: the configuration, the tool version, the checksum of every output
    and the wall-clock time of every stage.
    """
    command: str
    config: Dict
    version: str = tunnelers.__version__
    checksums: Dict[str, str] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    checks: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check['passed'] for check in self.checks)

    def to_json(self) -> str:
        return json.dumps({**asdict(self), 'passed': self.passed}, indent=2, sort_keys=True)


def build_pipeline(config: RunConfig, writer: OutputWriter, command: str = 'all') -> Pipeline:
    """
    Pipeline of the stages needed by a command, closed by the acceptance checks

    :param config: the run configuration
    :param writer: the output writer shared by the stages
    :param command: one of COMMANDS
    :return: a Pipeline
    """
    if command not in COMMANDS:
        raise ConfigurationError(f'unknown command {command!r} (known: {", ".join(COMMANDS)})')
    stages = {name: STAGES[name](config, writer) for name in COMMANDS[command]}
    stages['acceptance'] = AcceptanceStage(config, writer, emit=command == 'all')
    return Pipeline(stages)


def run_all(config: RunConfig, command: str = 'all') -> RunManifest:
    """
    Runs a command end to end and writes its outputs and manifest.json into config.out_dir.

    :param config: the run configuration
    :param command: one of COMMANDS, 'all' by default
    :return: the RunManifest
    """
    writer = OutputWriter(config.output_path)
    pipeline = build_pipeline(config, writer, command)
    logger.info('running %s into %s', command, config.output_path)
    context = pipeline.run()
    manifest = RunManifest(
        command=command,
        config=config.as_dict(),
        checksums=dict(writer.checksums_),
        timings=dict(pipeline.timings_),
        checks=[check.as_dict() for check in context.get('checks', [])],
    )
    writer.write_text(MANIFEST_NAME, manifest.to_json() + '\n', record=False)
    logger.info('%s finished, all checks passed: %s', command, manifest.passed)
    return manifest
