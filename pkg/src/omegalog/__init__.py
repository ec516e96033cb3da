"""omegalog: a workbench for omega-logic over second-order arithmetic."""

__version__ = "0.1.0"
