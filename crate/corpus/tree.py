def depth(node):
    if node is None:
        return 0
    left, right = node
    return 1 + max(depth(left), depth(right))


t = ((None, None), (None, (None, None)))
print(depth(t))
