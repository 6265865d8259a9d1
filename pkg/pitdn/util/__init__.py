from pitdn.util import types
from pitdn.util import generic
