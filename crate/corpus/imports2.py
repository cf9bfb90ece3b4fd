import math
import os.path
from collections import (OrderedDict,
                         defaultdict)

d = defaultdict(int)
d['k'] += 1
print(math.floor(2.7), len(OrderedDict()), d['k'])
print(os.path.sep != '')
