import logging
import time
from typing import Dict

from tunnelers.core.base import StageMixin
from tunnelers.core.exceptions import StageError

logger = logging.getLogger(__name__)


class Pipeline:
    """
    Class for chaining different stages together.

    Stages are run in insertion order, each one sees the context built by the previous ones.
    """

    def __init__(self, stages: Dict[str, StageMixin]):
        """
        Creates a Pipeline consisting of different stages
        :param stages: a dictionary containing as keys the stage names and as values the stage instances
        """
        self.stages = stages
        self.timings_ = {}

    def run(self, context: Dict = None) -> Dict:
        """
        Calls all stages run function in order

        :param context: initial context entries (optional)
        :return: the context enriched by every stage
        """
        context = dict(context or {})
        self.timings_ = {}
        for name, stage in self.stages.items():
            logger.info('running stage %s', name)
            start = time.perf_counter()
            try:
                produced = stage.run(context)
            except StageError:
                raise
            except Exception as error:
                raise StageError(name, error) from error
            self.timings_[name] = time.perf_counter() - start
            logger.info('stage %s done in %.2f s', name, self.timings_[name])
            context.update(produced or {})
        return context
