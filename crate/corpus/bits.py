x = 0b1010
y = 0o17
z = 0x1f
print(x & y, x | y, x ^ y)
print(x << 2, z >> 1)
print(~x)
