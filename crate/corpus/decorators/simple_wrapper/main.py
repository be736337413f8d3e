def logged(func):
    def wrapper(value):
        result = func(value)
        return result
    return wrapper


@logged
def square(n):
    return n * n


area = square(4)
