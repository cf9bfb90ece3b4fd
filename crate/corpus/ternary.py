xs = [3, -1, 4, -5]
signs = [1 if x > 0 else -1 for x in xs]
label = 'empty' if not xs else 'full'
print(signs, label)
