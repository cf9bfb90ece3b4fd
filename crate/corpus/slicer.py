xs = list(range(10))
print(xs[2:7])
print(xs[::2])
print(xs[::-1])
print(xs[1:9:3])
head, tail = xs[0], xs[1:]
print(head, len(tail))
