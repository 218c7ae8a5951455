from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical slacks shared by every check.

    tau_psd is the Loewner slack (relative to ``max(1, norms)``), tau_eig the
    Jacobi off-diagonal target and tau_id the slack for identity checks such as
    unitality.
    """

    tau_psd: float = 1e-8
    tau_eig: float = 1e-13
    tau_id: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (0.0 < value <= 1e-3):
                raise ValueError(f"{f.name} must lie in (0, 1e-3], got {value!r}")

    def with_overrides(self, **kw):
        return replace(self, **{k: float(v) for k, v in kw.items() if v is not None})

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = ToleranceConfig()
