def swap(p, q):
    return q, p


num, name = swap("one", 1)
first, *rest = [1.0, 2.0, 3.0]
