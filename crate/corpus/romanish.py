digits = {1: 'I', 5: 'V', 10: 'X'}


def roman_units(n):
    out = ''
    while n >= 10:
        out += digits[10]
        n -= 10
    return out + digits[5] * (n // 5) + digits[1] * (n % 5)


print(roman_units(23))
