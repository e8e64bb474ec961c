"""Pushdown-system bisimilarity: gadgets, counters and the tower-hardness reduction."""
from .lts import Config, Pda, Rule, parse_config, parse_pda, format_pda, step, reachable

__all__ = ["Config", "Pda", "Rule", "parse_config", "parse_pda", "format_pda", "step", "reachable"]
