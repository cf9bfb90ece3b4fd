def safe_div(a, b):
    try:
        return a / b
    except ZeroDivisionError:
        return 0.0
    finally:
        pass


print(safe_div(6, 3))
print(safe_div(1, 0))
