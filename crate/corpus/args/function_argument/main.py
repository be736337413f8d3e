def apply(fn, value):
    out = fn(value)
    return out


def double(n):
    return n * 2


res = apply(double, 21)
