double = lambda x: x * 2
compose = lambda f, g: lambda x: f(g(x))
quad = compose(double, double)
print(quad(5))
print(sorted([3, 1, 2], key=lambda n: -n))
