def func(a, b=2):
    result = a + b
    return result


x = func(1)
y = func(3, b=4)
