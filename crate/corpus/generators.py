def pairs(xs):
    it = iter(xs)
    for a in it:
        b = next(it, None)
        yield a, b


print(list(pairs([1, 2, 3, 4, 5])))
