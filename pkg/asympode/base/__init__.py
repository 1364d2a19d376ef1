from .exceptions import *
from .rational import *
from .polynomial import *
from .workers import worker_count
from .fitting import LineFit, fit_line, fit_constant
