def clamp(n, lo, hi):
    if lo <= n <= hi:
        return n
    if n < lo:
        return lo
    return hi


print(clamp(5, 0, 10))
print(clamp(-3, 0, 10))
