def make_list(n):
    return list(range(n))
