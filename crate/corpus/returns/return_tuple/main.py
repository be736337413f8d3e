def divide(a, b):
    quotient = a // b
    return quotient, a % b


pair = divide(7, 2)
q, r = divide(9, 4)
