import os

path = os.devnull
with open(path, 'w') as fh:
    fh.write('nothing\n')
print('written')
