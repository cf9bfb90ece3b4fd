def chunks(text, size):
    out = []
    for i in range(0, len(text), size):
        out.append(text[i:i + size])
    return out


print(chunks('abcdefghij', 3))
