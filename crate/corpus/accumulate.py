def accumulate(xs):
    total = 0
    out = []
    for x in xs:
        total += x
        out.append(total)
    return out


print(accumulate([1, 2, 3, 4]))
