def inner():
    return 3.5


def outer(scale):
    value = inner() * scale
    return value


answer = outer(2)
