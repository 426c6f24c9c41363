"""Memory planning entry points.

plan() dispatches on the configured strategy, the plan_<name>() functions
run one strategy whatever the config names. All return a Plan and may
raise Timeout.
"""
from .plans import StrategyConfig
from .strategies import get_strategy


def _config(config):
    return StrategyConfig() if config is None else config


def plan(trace, config=None):
    """Plan trace with the configured strategy, greedy_by_size by default."""
    config = _config(config)
    return get_strategy(config.strategy_name, config).plan(trace)


def plan_bump(trace, config=None):
    """Plan trace by bump allocation."""
    return get_strategy('bump_allocation', _config(config)).plan(trace)


def plan_greedy_by_size(trace, config=None):
    """Plan trace greedy by size with best fit."""
    return get_strategy('greedy_by_size', _config(config)).plan(trace)


def plan_greedy_by_breadth(trace, config=None):
    """Plan trace greedy by operator breadth."""
    return get_strategy('greedy_by_breadth', _config(config)).plan(trace)


def plan_mincost_flow(trace, config=None):
    """Plan trace by min-cost flow over the reuse network."""
    return get_strategy('mincost_flow', _config(config)).plan(trace)


def plan_gergov(trace, config=None):
    """Plan trace with the infeasible then best fit approach."""
    return get_strategy('gergov', _config(config)).plan(trace)


def plan_mip_exact(trace, config=None):
    """Optimal plan by branch and bound, for small traces."""
    return get_strategy('mip', _config(config)).plan(trace)
