import time


def countdown(n):
    while n:
        yield n
        n -= 1


print(list(countdown(5)))
print(time.strftime('%Y'))
