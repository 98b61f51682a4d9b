import abc
from typing import Dict


class StageMixin:
    """
    Base class for the steps of a reproduction run.

    A stage reads what earlier stages produced from the shared context and returns the entries it adds.
    """

    name: str = 'stage'

    @abc.abstractmethod
    def run(self, context: Dict) -> Dict:
        """

        :param context: the results of the previous stages, keyed by entry name
        :return: the new context entries produced by this stage
        """
        pass
