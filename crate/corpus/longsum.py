total = 1 + \
    2 + \
    3
parts = (4 +
         5 +
         6)
print(total, parts)
