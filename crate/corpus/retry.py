def retry(fn, attempts=3):
    last = None
    for _ in range(attempts):
        try:
            return fn()
        except RuntimeError as err:
            last = err
    raise last
