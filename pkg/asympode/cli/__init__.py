from .problem import ProblemFile, Tolerances, NonlinearityConfig, load_problem, validate_problem, with_overrides
from .pipeline import Pipeline, run_pipeline, exit_code, record_error
from .main import main, build_parser
from .exceptions import *
