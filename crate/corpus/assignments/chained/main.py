def make(size):
    return [0] * size


a = b = make(2)
c = a
