from .config import *
from .gaussian import *
from .halfplane import *
from .surface_group import *
from .orbit import *
from .modsym import *
from .stats import *
from .dirichlet import *
from .dump import *

__version__ = '0.1.0'
