template = '%s scored %d%%'
line = template % ('ada', 93)
parts = line.split(' ')
joined = '_'.join(parts)
print(line)
print(joined.count('_'))
