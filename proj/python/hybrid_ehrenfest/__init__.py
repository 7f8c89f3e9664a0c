"""Hybrid quantum-classical moment hierarchy: Python interface to the C++ core."""

from ._core import (
    ConfigError,
    Ensemble,
    InvalidArgument,
    MomentField,
    NumericalError,
    PhaseGrid,
    Scenario,
    __version__,
    closure,
    commutator,
    ensemble_average,
    estimate_moments,
    evolve_effective,
    fig1_scan,
    mixture_moments,
    propagate,
    purity,
    run,
    sample_ensemble,
    scenario,
    set_reproducible,
    set_threads,
    trajectory,
    von_neumann_entropy,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
