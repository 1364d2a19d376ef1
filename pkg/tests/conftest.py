from fixtures.systems import *
from fixtures.trajectories import *
from fixtures.problems import *
