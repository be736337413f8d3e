def add(a, b):
    return a + b


def negate(value):
    result = -value
    return result


total = add(1, 2)
neg = negate(total)
