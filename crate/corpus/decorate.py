def twice(fn):
    def wrapper(x):
        return fn(fn(x))
    return wrapper


@twice
def inc(x):
    return x + 1


print(inc(10))
