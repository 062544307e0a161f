from .diagnostics import (GrowthFit, PhaseDiagnostics, ZigzagReport, fit_growth, phase_extract,
                          zigzag_experiment)
from .evolve import StepperConfig, ccn_evolve, ccn_linear_exact, cn_rhs, rgl_evolve
from .grid import Field2D, PeriodicGrid2D, derivative
from .io import read_checkpoint, write_checkpoint, write_diagnostics_csv
from .sideband import cn_growth, richardson_dispersion, sideband_growth, sideband_matrix
