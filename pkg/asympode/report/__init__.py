from .verification import VerificationReport, ResidualFit, verify, fit_log_slope, informative_window, slope_tolerance
from .emitter import emit, render
from .constants import VERDICT_PASS, VERDICT_FAIL, VERDICT_VACUOUS
from .exceptions import *
