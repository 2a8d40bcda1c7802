"""Sleeping Lagrange top: slice linearizations, spectra, transitions, simulation."""

__version__ = "0.1.0"

from .model import (PhasePoint, TangentVector, TopParameters, VelocityDecomposition,
                    VelocityPair, sleeping_point)
from .spectrum import (SpectrumClass, classify_spectrum, eigenvalues_closed_form,
                       eigenvalues_numeric, linearization, spectrum_report)
from .transitions import (EtaRule, fast_slow_threshold, fast_superfast_lewis,
                          hyperbola_eta, optimal_eta, stability_classify,
                          sweep_eigenvalue_paths)
from .dynamics import IntegratorConfig, integrate, perturbation_probe
