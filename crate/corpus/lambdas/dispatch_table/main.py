def dispatch(op, a, b):
    table = {"add": lambda x, y: x + y, "mul": lambda x, y: x * y}
    handler = table[op]
    return handler(a, b)


summed = dispatch("add", 2, 3)
product = dispatch("mul", 1.5, 2)
