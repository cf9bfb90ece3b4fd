def swap_case(s):
    out = []
    for ch in s:
        if ch.isupper():
            out.append(ch.lower())
        else:
            out.append(ch.upper())
    return ''.join(out)


print(swap_case('PyThOn'))
