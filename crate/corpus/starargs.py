def biggest(*values):
    best = values[0]
    for v in values[1:]:
        if v > best:
            best = v
    return best


print(biggest(3, 9, 4))
nums = [5, 2, 8]
print(biggest(*nums))
