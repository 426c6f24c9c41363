"""Find the Strategy for a strategy name."""
from .bump import BumpStrategy
from .gergov import GergovStrategy
from .greedy_by_breadth import GreedyByBreadthStrategy
from .greedy_by_size import GreedyBySizeStrategy
from .mincost_flow import MincostFlowStrategy
from .mip import MipStrategy
from .plans import StrategyConfig, UnknownStrategy

STRATEGIES = ['bump_allocation', 'greedy_by_size', 'greedy_by_breadth',
              'mincost_flow', 'gergov', 'mip']


def get_strategy(name=None, config=None):
    """Find Strategy object for the given strategy name.

    If name is None the name from config is used, which defaults to
    greedy_by_size.
    """
    if config is None:
        config = StrategyConfig(strategy=name)
    if name is None:
        name = config.strategy_name
    if name == 'bump_allocation':
        return BumpStrategy(config)
    elif name == 'greedy_by_size':
        return GreedyBySizeStrategy(config)
    elif name == 'greedy_by_breadth':
        return GreedyByBreadthStrategy(config)
    elif name == 'mincost_flow':
        return MincostFlowStrategy(config)
    elif name == 'gergov':
        return GergovStrategy(config)
    elif name == 'mip':
        return MipStrategy(config)
    else:
        raise UnknownStrategy(name)
