a = {1, 2, 3}
b = {3, 4}
print(sorted(a & b))
print(sorted(a | b))
print(sorted(a - b))
print(2 in a, 9 not in b)
