def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


u = [1, 2, 3]
v = [4, 5, 6]
print(dot(u, v))
print(dot(u, u) ** 0.5)
