def describe(name, **traits):
    parts = [name]
    for key in sorted(traits):
        parts.append(key + '=' + str(traits[key]))
    return ' '.join(parts)


print(describe('cat', legs=4, tail=True))
