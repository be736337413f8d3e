def compute(expr):
    outcome = eval(expr)
    return outcome


result = compute("1 + 2")
