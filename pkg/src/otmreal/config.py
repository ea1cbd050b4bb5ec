from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class CheckCfg:
    """Knobs shared by the truth evaluator, the checker and the VM."""

    universe_rank: int = 4
    element_cap: int = 20
    sample_count: int = 32
    enum_depth: int = 3
    vm_steps: int = 100_000
    vm_limits: int = 16
    vm_window: int = 4096

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be positive")

    def with_(self, **kw) -> "CheckCfg":
        return replace(self, **kw)


DEFAULT = CheckCfg()
