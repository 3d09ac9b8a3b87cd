from .arrangement import *
from .mirror import *
from .multiplicative import *
from .tropical import *
