evens = [n for n in range(20) if n % 2 == 0]
squares = {n: n ** 2 for n in evens}
big = {n for n in evens if n > 10}
print(len(evens), len(squares), len(big))
