def scale(x: float, k: float = 2.0) -> float:
    return x * k


def name_of(obj) -> str:
    return str(obj)


print(scale(3.0), name_of(9))
